"""Canonical domain types for review histories, labels and identities.

All types are immutable value objects; they can be shared freely between
threads. Structural invariants are checked by :func:`validate_change`,
which reports violations as data instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum


class ChangeStatus(str, Enum):
    OPEN = "open"
    MERGED = "merged"
    ABANDONED = "abandoned"


class CommentCategory(str, Enum):
    """Closed set of review-comment categories with stable wire names."""

    ALTERNATE_OUTPUT = "AlternateOutput"
    DESIGN_DISCUSSION = "DesignDiscussion"
    DOCUMENTATION = "Documentation"
    FALSE_POSITIVE = "FalsePositive"
    INTERFACE = "Interface"
    LARGER_DEFECT = "LargerDefect"
    LOGICAL = "Logical"
    NAMING_CONVENTION = "NamingConvention"
    ORGANIZATION_OF_CODE = "OrganizationOfCode"
    PRAISE = "Praise"
    QUESTION = "Question"
    RESOURCE = "Resource"
    SOLUTION_APPROACH = "SolutionApproach"
    SUPPORT = "Support"
    TIMING = "Timing"
    VALIDATION = "Validation"
    VISUAL_REPRESENTATION = "VisualRepresentation"
    OTHERS = "Others"


@dataclass(frozen=True)
class Developer:
    developer_id: str
    display_name: str


@dataclass(frozen=True)
class Project:
    project_id: str
    name: str


@dataclass(frozen=True)
class FileDiff:
    """Changed lines of one file in one patchset, post-image coordinates."""

    path: str
    changed_new_lines: frozenset[int]


@dataclass(frozen=True)
class Patchset:
    number: int
    uploaded_at: datetime
    files: tuple[FileDiff, ...] = ()


@dataclass(frozen=True)
class ReviewComment:
    comment_id: str
    thread_id: str
    author_id: str
    written_at: datetime
    text: str
    patchset_number: int


@dataclass(frozen=True)
class CommentThread:
    """A comment plus its replies, anchored to one file/line location."""

    thread_id: str
    file_path: str
    line: int
    origin_patchset: int
    comments: tuple[ReviewComment, ...]


@dataclass(frozen=True)
class ReviewChange:
    change_id: str
    project_id: str
    author_id: str
    created_at: datetime
    status: ChangeStatus
    patchsets: tuple[Patchset, ...] = ()
    threads: tuple[CommentThread, ...] = ()

    def patchset(self, number: int) -> Patchset | None:
        for ps in self.patchsets:
            if ps.number == number:
                return ps
        return None

    def max_patchset_number(self) -> int:
        return self.patchsets[-1].number if self.patchsets else 0

    def thread(self, thread_id: str) -> CommentThread | None:
        for t in self.threads:
            if t.thread_id == thread_id:
                return t
        return None

    def all_comments(self) -> list[ReviewComment]:
        return [c for t in self.threads for c in t.comments]


@dataclass(frozen=True)
class UsefulnessLabel:
    comment_id: str
    rater_id: str
    is_useful: bool
    category: CommentCategory
    labeled_at: datetime


@dataclass(frozen=True)
class Violation:
    """One broken invariant: the offending field and the rule it violates."""

    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def comment_sort_key(comment: ReviewComment) -> tuple[datetime, str]:
    """Time order with comment_id as the deterministic tie-break."""
    return (comment.written_at, comment.comment_id)


def ensure_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def validate_change(change: ReviewChange) -> list[Violation]:
    """Check every structural invariant of a change; empty list means valid.

    Pure: identical input yields an identical violation list.
    """
    out: list[Violation] = []
    cid = change.change_id
    if not cid:
        out.append(Violation("change_id", "must be non-empty"))

    numbers = [ps.number for ps in change.patchsets]
    seen: set[int] = set()
    for n in numbers:
        if n in seen:
            out.append(Violation(f"{cid}.patchsets", f"duplicate patchset number {n}"))
        seen.add(n)
        if n < 1:
            out.append(Violation(f"{cid}.patchsets", f"patchset number {n} must be >= 1"))
    if numbers and numbers[0] != 1:
        out.append(Violation(f"{cid}.patchsets", "patchset numbers must start at 1"))
    for prev, cur in zip(numbers, numbers[1:]):
        if cur <= prev:
            out.append(
                Violation(f"{cid}.patchsets", f"patchset numbers must be strictly increasing ({prev} -> {cur})")
            )
    for prev_ps, cur_ps in zip(change.patchsets, change.patchsets[1:]):
        if cur_ps.uploaded_at < prev_ps.uploaded_at:
            out.append(
                Violation(
                    f"{cid}.patchsets[{cur_ps.number}].uploaded_at",
                    "uploaded_at must be non-decreasing with patchset number",
                )
            )

    for ps in change.patchsets:
        for fd in ps.files:
            for line in fd.changed_new_lines:
                if line < 1:
                    out.append(
                        Violation(f"{cid}.patchsets[{ps.number}].files[{fd.path}]", f"line number {line} must be >= 1")
                    )

    if change.status in (ChangeStatus.MERGED, ChangeStatus.ABANDONED) and not change.patchsets:
        out.append(Violation(f"{cid}.status", f"status {change.status.value} requires at least one patchset"))

    valid_numbers = set(numbers)
    for thread in change.threads:
        tid = thread.thread_id
        if thread.origin_patchset not in valid_numbers:
            out.append(
                Violation(f"{cid}.threads[{tid}].origin_patchset", f"dangling patchset reference {thread.origin_patchset}")
            )
        if thread.line < 1:
            out.append(Violation(f"{cid}.threads[{tid}].line", f"line {thread.line} must be >= 1"))
        if not thread.comments:
            out.append(Violation(f"{cid}.threads[{tid}].comments", "thread must contain at least one comment"))
        keys = [comment_sort_key(c) for c in thread.comments]
        if keys != sorted(keys):
            out.append(Violation(f"{cid}.threads[{tid}].comments", "comments must be sorted by written_at"))
        for comment in thread.comments:
            if comment.thread_id != tid:
                out.append(
                    Violation(f"{cid}.threads[{tid}].comments[{comment.comment_id}].thread_id", "must match owning thread")
                )
            if comment.patchset_number not in valid_numbers:
                out.append(
                    Violation(
                        f"{cid}.threads[{tid}].comments[{comment.comment_id}].patchset_number",
                        f"dangling patchset reference {comment.patchset_number}",
                    )
                )
            else:
                ps = change.patchset(comment.patchset_number)
                assert ps is not None
                if comment.written_at < ps.uploaded_at:
                    out.append(
                        Violation(
                            f"{cid}.threads[{tid}].comments[{comment.comment_id}].written_at",
                            "comment precedes its patchset's uploaded_at",
                        )
                    )
    return out
