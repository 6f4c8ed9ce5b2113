"""Per-comment review-context facts derived from a change's history.

Three pure functions: did the comment trigger a later edit near its line,
what did the surrounding thread look like, and how much prior history do
the commenter and the change author have.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from reviewlens.model import (
    ChangeStatus,
    CommentThread,
    ReviewChange,
    ReviewComment,
    comment_sort_key,
)

from .dump import ReviewDump

TRIGGER_PROXIMITY = 5
NO_TRIGGER_DISTANCE = 999


@dataclass(frozen=True)
class TriggerResult:
    """Outcome of the did-this-comment-cause-an-edit heuristic.

    line_change is the minimum absolute distance between the thread's line
    and any line changed on the same file in a later patchset, or
    NO_TRIGGER_DISTANCE when no later patchset touches the file.
    """

    triggered: bool
    line_change: int


@dataclass(frozen=True)
class ThreadContext:
    author_responded: bool
    reply_texts: tuple[str, ...]
    thread_length: int
    num_participant: int
    is_last_patch: bool
    patch_id: int
    num_patches: int
    review_interval: float
    review_status: ChangeStatus


@dataclass(frozen=True)
class ExperienceFeatures:
    code_reviewership: int
    code_ownership: int
    reviewing_experience: int
    developer_experience: int


def _thread_of(comment: ReviewComment, change: ReviewChange) -> CommentThread:
    thread = change.thread(comment.thread_id)
    if thread is None:
        raise ValueError(f"comment {comment.comment_id} has no thread in change {change.change_id}")
    return thread


def change_trigger(comment: ReviewComment, change: ReviewChange) -> TriggerResult:
    """Scan patchsets after the comment's for edits near the thread's line.

    Any later change counts, regardless of who uploaded it. Proximity
    within TRIGGER_PROXIMITY lines (above or below) marks the comment as
    triggering; the real distance is reported even when it exceeds the
    proximity window.
    """
    thread = _thread_of(comment, change)
    best = NO_TRIGGER_DISTANCE
    for patchset in change.patchsets:
        if patchset.number <= comment.patchset_number:
            continue
        for diff in patchset.files:
            if diff.path != thread.file_path:
                continue
            for line in diff.changed_new_lines:
                distance = abs(thread.line - line)
                if distance < best:
                    best = distance
    return TriggerResult(triggered=best <= TRIGGER_PROXIMITY, line_change=best)


def thread_context(comment: ReviewComment, change: ReviewChange) -> ThreadContext:
    thread = _thread_of(comment, change)
    ordered = sorted(thread.comments, key=comment_sort_key)
    replies = [
        c.text
        for c in ordered
        if c.author_id == change.author_id and c.written_at > comment.written_at
    ]
    num_patches = change.max_patchset_number()
    patchset = change.patchset(comment.patchset_number)
    if patchset is None:
        raise ValueError(
            f"comment {comment.comment_id} references missing patchset {comment.patchset_number}"
        )
    interval = (comment.written_at - patchset.uploaded_at).total_seconds()
    return ThreadContext(
        author_responded=bool(replies),
        reply_texts=tuple(replies),
        thread_length=len(ordered),
        num_participant=len({c.author_id for c in ordered}),
        is_last_patch=comment.patchset_number == num_patches,
        patch_id=comment.patchset_number,
        num_patches=num_patches,
        review_interval=max(0.0, interval),
        review_status=change.status,
    )


def _change_touches(change: ReviewChange, file_path: str) -> bool:
    for patchset in change.patchsets:
        for diff in patchset.files:
            if diff.path == file_path:
                return True
    return any(thread.file_path == file_path for thread in change.threads)


def _authored_before(change: ReviewChange, as_of: datetime) -> bool:
    # A change exists "before" a moment once its first upload landed; for
    # changes mined without patchsets, fall back to creation time.
    if change.patchsets:
        return change.patchsets[0].uploaded_at < as_of
    return change.created_at < as_of


def _commented_before(change: ReviewChange, developer_id: str, as_of: datetime) -> bool:
    return any(
        c.author_id == developer_id and c.written_at < as_of for c in change.all_comments()
    )


def experience(
    history: ReviewDump,
    reviewer_id: str,
    author_id: str,
    file_path: str,
    project_id: str,
    as_of: datetime,
) -> ExperienceFeatures:
    """Count prior activity strictly before `as_of`.

    Reviewing a change means having authored at least one comment on it.
    Unknown files or projects simply count zero.
    """
    code_reviewership = 0
    code_ownership = 0
    reviewing_experience = 0
    developer_experience = 0
    for change in history.changes:
        touches = _change_touches(change, file_path)
        if touches and _commented_before(change, reviewer_id, as_of):
            code_reviewership += 1
        if touches and change.author_id == reviewer_id and _authored_before(change, as_of):
            code_ownership += 1
        if change.project_id == project_id:
            if _commented_before(change, reviewer_id, as_of):
                reviewing_experience += 1
            if change.author_id == author_id and _authored_before(change, as_of):
                developer_experience += 1
    return ExperienceFeatures(
        code_reviewership=code_reviewership,
        code_ownership=code_ownership,
        reviewing_experience=reviewing_experience,
        developer_experience=developer_experience,
    )
