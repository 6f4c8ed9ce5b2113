"""Incremental miner for Gerrit-style review REST endpoints.

Wire format of the reference adapter (one endpoint, fully materialized
changes):

    GET {base_url}/a/changes/?since=<ISO-8601>&start=<offset>

returns an XSSI-guarded (")]}'" line) JSON array of change objects::

    {
      "id": "...", "project": {"id", "name"}, "owner": {"id", "name"},
      "created": "...", "updated": "...", "status": "NEW|MERGED|ABANDONED",
      "revisions": [{"number", "uploaded", "files": [{"path", "lines"}]}],
      "threads": [{"id", "path", "line", "patchset",
                   "comments": [{"id", "author": {"id", "name"},
                                 "written", "message", "patchset",
                                 "context"?}]}]
    }

The last element of a non-final page carries ``"_more_changes": true``.
Requests authenticate with HTTP basic auth; the password comes from an
environment variable so it never appears in argv or shell history.
Mapping this tool JSON onto a ReviewDump lives in one function
(`_changes_to_dump`) so further adapters stay cheap.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from datetime import datetime

import requests

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

from .dump import ReviewDump, format_timestamp, parse_timestamp

XSSI_PREFIX = ")]}'"
_STATUS_MAP = {
    "NEW": ChangeStatus.OPEN,
    "OPEN": ChangeStatus.OPEN,
    "MERGED": ChangeStatus.MERGED,
    "ABANDONED": ChangeStatus.ABANDONED,
}

MAX_RETRIES = 3
BACKOFF_BASE_SECONDS = 0.2


class AuthFailure(RuntimeError):
    """Endpoint rejected the configured credentials."""


class NetworkFailure(RuntimeError):
    """Endpoint unreachable after bounded retries."""


class SchemaMismatch(RuntimeError):
    """Endpoint answered with a payload this adapter does not recognize."""


@dataclass(frozen=True)
class MinerConfig:
    """Where and how to mine; the credential is named, not stored."""

    base_url: str
    username: str
    password_env: str = "REVIEWLENS_MINER_PASSWORD"
    poll_interval_seconds: float = 900.0

    def resolve_password(self) -> str:
        password = os.environ.get(self.password_env)
        if password is None:
            raise AuthFailure(f"environment variable {self.password_env} is not set")
        return password


@dataclass(frozen=True)
class MineResult:
    dump: ReviewDump
    high_water_mark: datetime


_endpoint_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


def _lock_for(base_url: str) -> threading.Lock:
    with _locks_guard:
        return _endpoint_locks.setdefault(base_url, threading.Lock())


def _get_json(session: requests.Session, url: str, params: dict, auth, sleep) -> object:
    last_error: Exception | None = None
    for attempt in range(MAX_RETRIES + 1):
        try:
            response = session.get(url, params=params, auth=auth, timeout=30)
        except requests.RequestException as exc:
            last_error = exc
        else:
            if response.status_code in (401, 403):
                raise AuthFailure(f"{url}: HTTP {response.status_code}")
            if response.status_code >= 500:
                last_error = RuntimeError(f"HTTP {response.status_code}")
            elif response.status_code != 200:
                raise SchemaMismatch(f"{url}: unexpected HTTP {response.status_code}")
            else:
                text = response.text
                if text.startswith(XSSI_PREFIX):
                    text = text.split("\n", 1)[1] if "\n" in text else ""
                try:
                    return json.loads(text)
                except json.JSONDecodeError as exc:
                    raise SchemaMismatch(f"{url}: body is not JSON: {exc}") from None
        if attempt < MAX_RETRIES:
            sleep(BACKOFF_BASE_SECONDS * (2**attempt))
    raise NetworkFailure(f"{url}: giving up after {MAX_RETRIES + 1} attempts: {last_error}")


def _parse_wire_change(raw: dict) -> tuple[ReviewChange, dict[str, Developer], Project, dict[str, str], datetime]:
    try:
        change_id = raw["id"]
        project = Project(project_id=raw["project"]["id"], name=raw["project"].get("name", ""))
        owner = Developer(developer_id=raw["owner"]["id"], display_name=raw["owner"].get("name", ""))
        status = _STATUS_MAP[raw["status"].upper()]
        created = parse_timestamp(raw["created"], change_id)
        updated = parse_timestamp(raw.get("updated", raw["created"]), change_id)
        developers = {owner.developer_id: owner}
        patchsets = tuple(
            Patchset(
                number=int(rev["number"]),
                uploaded_at=parse_timestamp(rev["uploaded"], change_id),
                files=tuple(
                    FileDiff(path=f["path"], changed_new_lines=frozenset(int(x) for x in f.get("lines", [])))
                    for f in rev.get("files", [])
                ),
            )
            for rev in raw.get("revisions", [])
        )
        threads = []
        contexts: dict[str, str] = {}
        for t_raw in raw.get("threads", []):
            comments = []
            for c_raw in t_raw["comments"]:
                author = Developer(
                    developer_id=c_raw["author"]["id"],
                    display_name=c_raw["author"].get("name", ""),
                )
                developers.setdefault(author.developer_id, author)
                comment = ReviewComment(
                    comment_id=c_raw["id"],
                    thread_id=t_raw["id"],
                    author_id=author.developer_id,
                    written_at=parse_timestamp(c_raw["written"], change_id),
                    text=c_raw.get("message", ""),
                    patchset_number=int(c_raw["patchset"]),
                )
                comments.append(comment)
                if c_raw.get("context"):
                    contexts[comment.comment_id] = c_raw["context"]
            threads.append(
                CommentThread(
                    thread_id=t_raw["id"],
                    file_path=t_raw["path"],
                    line=int(t_raw["line"]),
                    origin_patchset=int(t_raw["patchset"]),
                    comments=tuple(comments),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"unrecognized change payload: {exc!r}") from None
    change = ReviewChange(
        change_id=change_id,
        project_id=project.project_id,
        author_id=owner.developer_id,
        created_at=created,
        status=status,
        patchsets=patchsets,
        threads=tuple(threads),
    )
    return change, developers, project, contexts, updated


def _changes_to_dump(pages: list[dict]) -> tuple[ReviewDump, datetime | None]:
    developers: dict[str, Developer] = {}
    projects: dict[str, Project] = {}
    changes: list[ReviewChange] = []
    contexts: dict[str, str] = {}
    newest: datetime | None = None
    for raw in pages:
        change, devs, project, ctx, updated = _parse_wire_change(raw)
        violations = validate_change(change)
        if violations:
            raise SchemaMismatch(
                f"change {change.change_id} from endpoint is invalid: "
                + "; ".join(str(v) for v in violations)
            )
        changes.append(change)
        developers.update(devs)
        projects[project.project_id] = project
        contexts.update(ctx)
        if newest is None or updated > newest:
            newest = updated
    dump = ReviewDump(
        developers=developers,
        projects=projects,
        changes=tuple(changes),
        code_contexts=contexts,
    )
    return dump, newest


def mine_incremental(
    config: MinerConfig,
    since: datetime,
    session: requests.Session | None = None,
    sleep=time.sleep,
) -> MineResult:
    """Fetch every change updated at or after `since`.

    Paginates until the endpoint stops flagging more results, retries
    transient failures with exponential backoff, and reports the newest
    `updated` timestamp seen as the next high-water mark. Runs are
    single-flight per endpoint: an overlapping call waits its turn.
    """
    auth = (config.username, config.resolve_password())
    own_session = session is None
    if session is None:
        session = requests.Session()
    url = config.base_url.rstrip("/") + "/a/changes/"
    since_utc = parse_timestamp(format_timestamp(since), "since")
    with _lock_for(config.base_url):
        try:
            fetched: list[dict] = []
            start = 0
            while True:
                payload = _get_json(
                    session, url, {"since": format_timestamp(since_utc), "start": start}, auth, sleep
                )
                if not isinstance(payload, list):
                    raise SchemaMismatch(f"{url}: expected a JSON array, got {type(payload).__name__}")
                more = bool(payload) and payload[-1].get("_more_changes", False)
                fetched.extend(payload)
                if not more:
                    break
                start += len(payload)
        finally:
            if own_session:
                session.close()
    # Trust but verify the server-side `since` filter.
    kept = [
        raw
        for raw in fetched
        if "updated" not in raw or parse_timestamp(raw["updated"], "updated") >= since_utc
    ]
    dump, newest = _changes_to_dump(kept)
    return MineResult(dump=dump, high_water_mark=newest or since_utc)
