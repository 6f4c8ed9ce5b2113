"""Reviewer and project effectiveness metrics and rankings.

Core counts per entity and period: NR (distinct changes reviewed), NC
(review comments authored), UC (comments judged useful). Derived values:

    CUD = UC / NC                 comment usefulness density
    ID  = UC / NR                 issue density
    RE  = log2(NR + 1) * (CUD + ID)
    RI  = 10 * NR + 17 * UC - 2 * NC

Zero denominators yield 0 so inactive entities still render. Comments a
developer leaves on their own changes never count. The legacy score ranks
entities by NC and CUD with a cutoff N (historically 30): each ranking
contributes N + 1 - position when the position is within N, else 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import datetime

from .model import ReviewChange, ReviewComment

LEGACY_N = 30
CSV_COLUMNS = (
    "developer_id", "period_from", "period_to", "NR", "NC", "UC",
    "CUD", "ID", "RE", "RI", "NC_score", "CUD_score", "review_score",
)
RANK_KEYS = ("RI", "RE", "NC", "CUD", "review_score")


@dataclass(frozen=True)
class Period:
    """Half-open UTC interval [start, end)."""

    start: datetime
    end: datetime

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("period start must precede end")

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end


@dataclass(frozen=True)
class CommentVerdict:
    """A review comment joined with its usefulness verdict.

    is_useful None means no label and no prediction exist yet; such
    comments count toward NC but can never contribute to UC.
    """

    comment: ReviewComment
    change_id: str
    is_useful: bool | None


@dataclass(frozen=True)
class ReviewerPeriodMetrics:
    developer_id: str
    period: Period
    NR: int
    NC: int
    UC: int
    CUD: float
    ID: float
    RE: float
    RI: int
    NC_score: int = 0
    CUD_score: int = 0
    review_score: int = 0


@dataclass(frozen=True)
class RankingResult:
    """Competition-ranked entries: ties share a rank, the next rank skips."""

    key: str
    entries: tuple[tuple[str, float, int], ...]
    N: int = LEGACY_N

    def position_of(self, entity_id: str) -> int | None:
        for eid, _, rank in self.entries:
            if eid == entity_id:
                return rank
        return None


def cud(UC: int, NC: int) -> float:
    return UC / NC if NC > 0 else 0.0


def issue_density(UC: int, NR: int) -> float:
    return UC / NR if NR > 0 else 0.0


def review_efficiency(NR: int, NC: int, UC: int) -> float:
    return math.log2(NR + 1) * (cud(UC, NC) + issue_density(UC, NR))


def review_impact(NR: int, NC: int, UC: int) -> int:
    return 10 * NR + 17 * UC - 2 * NC


def _counts_to_metrics(entity_id: str, period: Period, NR: int, NC: int, UC: int) -> ReviewerPeriodMetrics:
    return ReviewerPeriodMetrics(
        developer_id=entity_id,
        period=period,
        NR=NR,
        NC=NC,
        UC=UC,
        CUD=cud(UC, NC),
        ID=issue_density(UC, NR),
        RE=review_efficiency(NR, NC, UC),
        RI=review_impact(NR, NC, UC),
    )


def _eligible(verdict: CommentVerdict, change: ReviewChange | None, period: Period) -> bool:
    if change is None:
        return False
    if not period.contains(verdict.comment.written_at):
        return False
    return verdict.comment.author_id != change.author_id


def aggregate(
    comments_with_verdicts: list[CommentVerdict],
    changes: dict[str, ReviewChange],
    developer_id: str,
    period: Period,
) -> tuple[int, int, int]:
    """(NR, NC, UC) for one reviewer over a period."""
    reviewed_changes: set[str] = set()
    NC = 0
    UC = 0
    for verdict in comments_with_verdicts:
        if verdict.comment.author_id != developer_id:
            continue
        if not _eligible(verdict, changes.get(verdict.change_id), period):
            continue
        reviewed_changes.add(verdict.change_id)
        NC += 1
        if verdict.is_useful:
            UC += 1
    return len(reviewed_changes), NC, UC


def _group_counts(
    comments_with_verdicts: list[CommentVerdict],
    changes: dict[str, ReviewChange],
    period: Period,
    group_of,
) -> dict[str, tuple[set[str], int, int]]:
    groups: dict[str, tuple[set[str], int, int]] = {}
    for verdict in comments_with_verdicts:
        change = changes.get(verdict.change_id)
        if not _eligible(verdict, change, period):
            continue
        key = group_of(verdict, change)
        seen, NC, UC = groups.get(key, (set(), 0, 0))
        seen.add(verdict.change_id)
        groups[key] = (seen, NC + 1, UC + (1 if verdict.is_useful else 0))
    return groups


def reviewer_metrics(
    comments_with_verdicts: list[CommentVerdict],
    changes: dict[str, ReviewChange],
    period: Period,
    developer_ids: list[str] | None = None,
) -> list[ReviewerPeriodMetrics]:
    """One row per reviewer; `developer_ids` forces zero rows for
    developers with no activity in the period."""
    groups = _group_counts(comments_with_verdicts, changes, period,
                           lambda v, c: v.comment.author_id)
    ids = set(groups)
    if developer_ids is not None:
        ids |= set(developer_ids)
    rows = []
    for entity_id in sorted(ids):
        seen, NC, UC = groups.get(entity_id, (set(), 0, 0))
        rows.append(_counts_to_metrics(entity_id, period, len(seen), NC, UC))
    return rows


def project_metrics(
    comments_with_verdicts: list[CommentVerdict],
    changes: dict[str, ReviewChange],
    period: Period,
    project_ids: list[str] | None = None,
) -> list[ReviewerPeriodMetrics]:
    """Same formulas grouped by the change's project; the entity id field
    carries the project id."""
    groups = _group_counts(comments_with_verdicts, changes, period,
                           lambda v, c: c.project_id)
    ids = set(groups)
    if project_ids is not None:
        ids |= set(project_ids)
    rows = []
    for entity_id in sorted(ids):
        seen, NC, UC = groups.get(entity_id, (set(), 0, 0))
        rows.append(_counts_to_metrics(entity_id, period, len(seen), NC, UC))
    return rows


def _key_value(row: ReviewerPeriodMetrics, key: str) -> float:
    if key not in RANK_KEYS:
        raise KeyError(f"unknown ranking key {key!r}; expected one of {RANK_KEYS}")
    return float(getattr(row, key))


def rank(metrics_list: list[ReviewerPeriodMetrics], key: str = "RI", N: int = LEGACY_N) -> RankingResult:
    """Descending by key; ties share a rank and order by entity id."""
    decorated = sorted(
        ((_key_value(row, key), row.developer_id) for row in metrics_list),
        key=lambda pair: (-pair[0], pair[1]),
    )
    entries = []
    for i, (value, entity_id) in enumerate(decorated):
        if i > 0 and value == decorated[i - 1][0]:
            rank_pos = entries[-1][2]
        else:
            rank_pos = i + 1
        entries.append((entity_id, value, rank_pos))
    return RankingResult(key=key, entries=tuple(entries), N=N)


def legacy_scores(
    metrics_list: list[ReviewerPeriodMetrics], N: int = LEGACY_N
) -> list[ReviewerPeriodMetrics]:
    """Fill NC_score, CUD_score and review_score from the two rankings."""
    nc_rank = rank(metrics_list, "NC", N)
    cud_rank = rank(metrics_list, "CUD", N)

    def score(position: int | None) -> int:
        if position is None or position > N:
            return 0
        return N + 1 - position

    out = []
    for row in metrics_list:
        nc_score = score(nc_rank.position_of(row.developer_id))
        cud_score = score(cud_rank.position_of(row.developer_id))
        out.append(replace(row, NC_score=nc_score, CUD_score=cud_score,
                           review_score=nc_score + cud_score))
    return out


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def metrics_to_csv(rows: list[ReviewerPeriodMetrics]) -> str:
    """CSV in CSV_COLUMNS order; floats fixed to 4 decimals."""
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        cells = [
            row.developer_id,
            row.period.start.strftime("%Y-%m-%dT%H:%M:%SZ"),
            row.period.end.strftime("%Y-%m-%dT%H:%M:%SZ"),
            row.NR, row.NC, row.UC,
            row.CUD, row.ID, row.RE, row.RI,
            row.NC_score, row.CUD_score, row.review_score,
        ]
        lines.append(",".join(_format_cell(c) for c in cells))
    return "\n".join(lines) + "\n"


def usefulness_percent(rows: list[ReviewerPeriodMetrics]) -> float:
    """100 * total UC / total NC across rows; 0 when there are no comments."""
    total_nc = sum(r.NC for r in rows)
    total_uc = sum(r.UC for r in rows)
    return 100.0 * total_uc / total_nc if total_nc else 0.0
