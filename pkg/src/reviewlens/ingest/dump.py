"""Canonical portable review-dump format (UTF-8 JSON, format_version 1).

Top-level keys: ``format_version``, ``developers[]``, ``projects[]``,
``changes[]``. Timestamps are ISO-8601 UTC with second precision. Comments
may carry an optional ``code_context`` snippet (up to ~10 source lines
around the commented line) captured at mining time; it feeds the
comment-to-code similarity feature. A JSON-schema description ships in
``reviewlens/data/dump.schema.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from reviewlens.model import (
    ChangeStatus,
    CommentThread,
    Developer,
    FileDiff,
    Patchset,
    Project,
    ReviewChange,
    ReviewComment,
    validate_change,
)

FORMAT_VERSION = 1


class MalformedJson(ValueError):
    """Input is not valid UTF-8 JSON of the expected shape."""


class UnsupportedVersion(ValueError):
    """Dump declares a format_version this build does not understand."""


class DanglingReference(ValueError):
    """A cross-reference points at an id that is not in the dump."""


class InvalidDump(ValueError):
    """A change in the dump breaks a structural invariant."""


@dataclass(frozen=True)
class ReviewDump:
    """A fully validated, cross-reference-resolved review history."""

    developers: dict[str, Developer]
    projects: dict[str, Project]
    changes: tuple[ReviewChange, ...]
    code_contexts: dict[str, str] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def change_of_comment(self, comment_id: str) -> ReviewChange | None:
        for change in self.changes:
            for thread in change.threads:
                for comment in thread.comments:
                    if comment.comment_id == comment_id:
                        return change
        return None


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(raw: str, where: str) -> datetime:
    try:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except (ValueError, AttributeError, TypeError):
        raise MalformedJson(f"{where}: invalid timestamp {raw!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise MalformedJson(f"{where}: missing key {key!r}")
    return obj[key]


def _parse_change(raw: dict) -> tuple[ReviewChange, dict[str, str]]:
    where = f"change {raw.get('change_id', '?')}"
    change_id = _require(raw, "change_id", where)
    status_raw = _require(raw, "status", where)
    try:
        status = ChangeStatus(status_raw)
    except ValueError:
        raise MalformedJson(f"{where}: unknown status {status_raw!r}") from None

    patchsets = []
    for ps_raw in raw.get("patchsets", []):
        ps_where = f"{where} patchset {ps_raw.get('number', '?')}"
        files = tuple(
            FileDiff(
                path=_require(fd, "path", ps_where),
                changed_new_lines=frozenset(int(x) for x in fd.get("changed_new_lines", [])),
            )
            for fd in ps_raw.get("files", [])
        )
        patchsets.append(
            Patchset(
                number=int(_require(ps_raw, "number", ps_where)),
                uploaded_at=parse_timestamp(_require(ps_raw, "uploaded_at", ps_where), ps_where),
                files=files,
            )
        )

    threads = []
    contexts: dict[str, str] = {}
    for t_raw in raw.get("threads", []):
        t_where = f"{where} thread {t_raw.get('thread_id', '?')}"
        thread_id = _require(t_raw, "thread_id", t_where)
        comments = []
        for c_raw in _require(t_raw, "comments", t_where):
            c_where = f"{t_where} comment {c_raw.get('comment_id', '?')}"
            comment = ReviewComment(
                comment_id=_require(c_raw, "comment_id", c_where),
                thread_id=thread_id,
                author_id=_require(c_raw, "author_id", c_where),
                written_at=parse_timestamp(_require(c_raw, "written_at", c_where), c_where),
                text=_require(c_raw, "text", c_where),
                patchset_number=int(_require(c_raw, "patchset_number", c_where)),
            )
            comments.append(comment)
            if "code_context" in c_raw and c_raw["code_context"] is not None:
                contexts[comment.comment_id] = c_raw["code_context"]
        threads.append(
            CommentThread(
                thread_id=thread_id,
                file_path=_require(t_raw, "file_path", t_where),
                line=int(_require(t_raw, "line", t_where)),
                origin_patchset=int(_require(t_raw, "origin_patchset", t_where)),
                comments=tuple(comments),
            )
        )

    change = ReviewChange(
        change_id=change_id,
        project_id=_require(raw, "project_id", where),
        author_id=_require(raw, "author_id", where),
        created_at=parse_timestamp(_require(raw, "created_at", where), where),
        status=status,
        patchsets=tuple(patchsets),
        threads=tuple(threads),
    )
    return change, contexts


def parse_review_dump(data: bytes | str) -> ReviewDump:
    """Parse and fully validate a canonical dump.

    Raises MalformedJson, UnsupportedVersion, DanglingReference or
    InvalidDump. parse -> serialize -> parse is the identity.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"not UTF-8: {exc}") from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from None
    if not isinstance(raw, dict):
        raise MalformedJson("top level must be a JSON object")

    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"format_version {version!r}, expected {FORMAT_VERSION}")

    developers = {}
    for d in raw.get("developers", []):
        dev = Developer(
            developer_id=_require(d, "developer_id", "developer"),
            display_name=d.get("display_name", ""),
        )
        if not dev.developer_id:
            raise MalformedJson("developer_id must be non-empty")
        developers[dev.developer_id] = dev
    projects = {}
    for p in raw.get("projects", []):
        proj = Project(
            project_id=_require(p, "project_id", "project"),
            name=p.get("name", ""),
        )
        if not proj.project_id:
            raise MalformedJson("project_id must be non-empty")
        projects[proj.project_id] = proj

    changes = []
    contexts: dict[str, str] = {}
    for c_raw in raw.get("changes", []):
        change, ctx = _parse_change(c_raw)
        changes.append(change)
        contexts.update(ctx)

    for change in changes:
        if change.project_id not in projects:
            raise DanglingReference(f"change {change.change_id}: unknown project {change.project_id!r}")
        if change.author_id not in developers:
            raise DanglingReference(f"change {change.change_id}: unknown developer {change.author_id!r}")
        for comment in change.all_comments():
            if comment.author_id not in developers:
                raise DanglingReference(
                    f"comment {comment.comment_id}: unknown developer {comment.author_id!r}"
                )
        violations = validate_change(change)
        if violations:
            raise InvalidDump("; ".join(str(v) for v in violations))

    return ReviewDump(
        developers=developers,
        projects=projects,
        changes=tuple(changes),
        code_contexts=contexts,
    )


def change_to_json_obj(change: ReviewChange, code_contexts: dict[str, str]) -> dict:
    threads = []
    for thread in change.threads:
        comments = []
        for c in thread.comments:
            c_obj = {
                "comment_id": c.comment_id,
                "author_id": c.author_id,
                "written_at": format_timestamp(c.written_at),
                "text": c.text,
                "patchset_number": c.patchset_number,
            }
            if c.comment_id in code_contexts:
                c_obj["code_context"] = code_contexts[c.comment_id]
            comments.append(c_obj)
        threads.append(
            {
                "thread_id": thread.thread_id,
                "file_path": thread.file_path,
                "line": thread.line,
                "origin_patchset": thread.origin_patchset,
                "comments": comments,
            }
        )
    return {
        "change_id": change.change_id,
        "project_id": change.project_id,
        "author_id": change.author_id,
        "created_at": format_timestamp(change.created_at),
        "status": change.status.value,
        "patchsets": [
            {
                "number": ps.number,
                "uploaded_at": format_timestamp(ps.uploaded_at),
                "files": [
                    {"path": fd.path, "changed_new_lines": sorted(fd.changed_new_lines)}
                    for fd in ps.files
                ],
            }
            for ps in change.patchsets
        ],
        "threads": threads,
    }


def change_from_json_obj(obj: dict) -> tuple[ReviewChange, dict[str, str]]:
    """Inverse of change_to_json_obj; returns the change plus its
    per-comment code-context snippets."""
    return _parse_change(obj)


def dump_to_json_obj(dump: ReviewDump) -> dict:
    changes = [
        change_to_json_obj(change, dump.code_contexts)
        for change in sorted(dump.changes, key=lambda c: c.change_id)
    ]
    return {
        "format_version": dump.format_version,
        "developers": [
            {"developer_id": d.developer_id, "display_name": d.display_name}
            for d in sorted(dump.developers.values(), key=lambda d: d.developer_id)
        ],
        "projects": [
            {"project_id": p.project_id, "name": p.name}
            for p in sorted(dump.projects.values(), key=lambda p: p.project_id)
        ],
        "changes": changes,
    }


def serialize_review_dump(dump: ReviewDump) -> bytes:
    return json.dumps(dump_to_json_obj(dump), indent=2, sort_keys=True, ensure_ascii=False).encode("utf-8")
