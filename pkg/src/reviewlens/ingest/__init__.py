"""Review-history acquisition and per-comment context derivation."""

from reviewlens.ingest.dump import (
    FORMAT_VERSION,
    DanglingReference,
    InvalidDump,
    MalformedJson,
    ReviewDump,
    UnsupportedVersion,
    parse_review_dump,
    serialize_review_dump,
)
from reviewlens.ingest.context import (
    NO_TRIGGER_DISTANCE,
    TRIGGER_PROXIMITY,
    ExperienceFeatures,
    ThreadContext,
    TriggerResult,
    change_trigger,
    experience,
    thread_context,
)
from reviewlens.ingest.miner import (
    AuthFailure,
    MinerConfig,
    MineResult,
    NetworkFailure,
    SchemaMismatch,
    mine_incremental,
)

__all__ = [
    "FORMAT_VERSION",
    "DanglingReference",
    "InvalidDump",
    "MalformedJson",
    "ReviewDump",
    "UnsupportedVersion",
    "parse_review_dump",
    "serialize_review_dump",
    "NO_TRIGGER_DISTANCE",
    "TRIGGER_PROXIMITY",
    "ExperienceFeatures",
    "ThreadContext",
    "TriggerResult",
    "change_trigger",
    "experience",
    "thread_context",
    "AuthFailure",
    "MinerConfig",
    "MineResult",
    "NetworkFailure",
    "SchemaMismatch",
    "mine_incremental",
]
