"""SQLite-backed persistence for review data, verdicts, models and miner
state, plus the author-labeling queue.

One file, one writer at a time (serialized through an in-process lock),
any number of readers. Changes are stored both as canonical JSON (for
lossless reload) and as normalized comment rows (for queries). Labels are
append-only underneath: resubmission supersedes the old row but the full
history stays queryable.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
import threading
from datetime import datetime, timezone
from pathlib import Path

from .ingest.dump import (
    ReviewDump,
    change_from_json_obj,
    change_to_json_obj,
    format_timestamp,
    parse_timestamp,
)
from .metrics import CommentVerdict
from .model import (
    CommentCategory,
    Developer,
    Project,
    ReviewChange,
    ReviewComment,
    UsefulnessLabel,
)

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS developers (
    developer_id TEXT PRIMARY KEY,
    display_name TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS projects (
    project_id TEXT PRIMARY KEY,
    name TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS changes (
    change_id TEXT PRIMARY KEY,
    project_id TEXT NOT NULL REFERENCES projects(project_id),
    author_id TEXT NOT NULL REFERENCES developers(developer_id),
    status TEXT NOT NULL,
    created_at TEXT NOT NULL,
    payload TEXT NOT NULL,
    fingerprint TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS comments (
    comment_id TEXT PRIMARY KEY,
    change_id TEXT NOT NULL REFERENCES changes(change_id),
    thread_id TEXT NOT NULL,
    author_id TEXT NOT NULL REFERENCES developers(developer_id),
    written_at TEXT NOT NULL,
    text TEXT NOT NULL,
    patchset_number INTEGER NOT NULL,
    file_path TEXT NOT NULL,
    line INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_comments_change ON comments(change_id);
CREATE INDEX IF NOT EXISTS idx_comments_written ON comments(written_at);
CREATE TABLE IF NOT EXISTS predictions (
    comment_id TEXT NOT NULL REFERENCES comments(comment_id),
    model_version TEXT NOT NULL,
    label INTEGER NOT NULL,
    probability REAL NOT NULL,
    predicted_at TEXT NOT NULL,
    PRIMARY KEY (comment_id, model_version)
);
CREATE TABLE IF NOT EXISTS labels (
    comment_id TEXT NOT NULL REFERENCES comments(comment_id),
    rater_id TEXT NOT NULL REFERENCES developers(developer_id),
    is_useful INTEGER NOT NULL,
    category TEXT NOT NULL,
    labeled_at TEXT NOT NULL,
    superseded INTEGER NOT NULL DEFAULT 0
);
CREATE INDEX IF NOT EXISTS idx_labels_comment ON labels(comment_id, rater_id);
CREATE TABLE IF NOT EXISTS models (
    model_version TEXT PRIMARY KEY,
    algorithm TEXT NOT NULL,
    created_at TEXT NOT NULL,
    artifact BLOB NOT NULL,
    metadata TEXT NOT NULL DEFAULT '{}'
);
CREATE TABLE IF NOT EXISTS miner_state (
    endpoint TEXT PRIMARY KEY,
    high_water_mark TEXT,
    interval_seconds REAL NOT NULL DEFAULT 900
);
"""


class StorageFailure(RuntimeError):
    """Underlying database rejected an operation."""


class NotChangeAuthor(PermissionError):
    """Only the change author may label comments on their change."""


class UnknownComment(KeyError):
    """Label or prediction references a comment that is not stored."""


def months_before(ts: datetime, months: int) -> datetime:
    """Same day-of-month `months` calendar months earlier, clamped to the
    target month's last day when needed."""
    month_index = ts.year * 12 + (ts.month - 1) - months
    year, month = divmod(month_index, 12)
    month += 1
    day = ts.day
    while day > 28:
        try:
            return ts.replace(year=year, month=month, day=day)
        except ValueError:
            day -= 1
    return ts.replace(year=year, month=month, day=day)


class ReviewStore:
    def __init__(self, path: str | Path = ":memory:"):
        self._path = str(path)
        self._conn = sqlite3.connect(self._path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._write_lock = threading.Lock()
        with self._write_lock, self._conn:
            self._conn.executescript(_SCHEMA)
            self._conn.execute(
                "INSERT OR IGNORE INTO meta (key, value) VALUES ('schema_version', ?)",
                (str(SCHEMA_VERSION),),
            )
        row = self._conn.execute("SELECT value FROM meta WHERE key='schema_version'").fetchone()
        if row is None or int(row["value"]) != SCHEMA_VERSION:
            raise StorageFailure(
                f"store schema version {row['value'] if row else '?'} is not {SCHEMA_VERSION}"
            )

    def close(self) -> None:
        self._conn.close()

    def __enter__(self) -> "ReviewStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- review data ----------------------------------------------------

    def upsert_dump(self, dump: ReviewDump) -> dict[str, int]:
        """Idempotent by change id; counts changed rows only."""
        inserted = 0
        updated = 0
        with self._write_lock, self._conn:
            for dev in dump.developers.values():
                self._conn.execute(
                    "INSERT INTO developers (developer_id, display_name) VALUES (?, ?) "
                    "ON CONFLICT(developer_id) DO UPDATE SET display_name=excluded.display_name",
                    (dev.developer_id, dev.display_name),
                )
            for proj in dump.projects.values():
                self._conn.execute(
                    "INSERT INTO projects (project_id, name) VALUES (?, ?) "
                    "ON CONFLICT(project_id) DO UPDATE SET name=excluded.name",
                    (proj.project_id, proj.name),
                )
            for change in dump.changes:
                payload = json.dumps(
                    change_to_json_obj(change, dump.code_contexts), sort_keys=True
                )
                fingerprint = hashlib.sha256(payload.encode("utf-8")).hexdigest()
                row = self._conn.execute(
                    "SELECT fingerprint FROM changes WHERE change_id=?",
                    (change.change_id,),
                ).fetchone()
                if row is not None and row["fingerprint"] == fingerprint:
                    continue
                self._conn.execute(
                    "INSERT INTO changes (change_id, project_id, author_id, status, created_at,"
                    " payload, fingerprint) VALUES (?, ?, ?, ?, ?, ?, ?) "
                    "ON CONFLICT(change_id) DO UPDATE SET project_id=excluded.project_id,"
                    " author_id=excluded.author_id, status=excluded.status,"
                    " created_at=excluded.created_at, payload=excluded.payload,"
                    " fingerprint=excluded.fingerprint",
                    (
                        change.change_id,
                        change.project_id,
                        change.author_id,
                        change.status.value,
                        format_timestamp(change.created_at),
                        payload,
                        fingerprint,
                    ),
                )
                self._conn.execute(
                    "DELETE FROM comments WHERE change_id=?", (change.change_id,)
                )
                for thread in change.threads:
                    for c in thread.comments:
                        self._conn.execute(
                            "INSERT INTO comments (comment_id, change_id, thread_id, author_id,"
                            " written_at, text, patchset_number, file_path, line)"
                            " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                            (
                                c.comment_id,
                                change.change_id,
                                c.thread_id,
                                c.author_id,
                                format_timestamp(c.written_at),
                                c.text,
                                c.patchset_number,
                                thread.file_path,
                                thread.line,
                            ),
                        )
                if row is None:
                    inserted += 1
                else:
                    updated += 1
        return {"inserted": inserted, "updated": updated}

    def changes(self) -> dict[str, ReviewChange]:
        out = {}
        for row in self._conn.execute("SELECT payload FROM changes ORDER BY change_id"):
            change, _ = change_from_json_obj(json.loads(row["payload"]))
            out[change.change_id] = change
        return out

    def load_dump(self) -> ReviewDump:
        developers = {
            r["developer_id"]: Developer(r["developer_id"], r["display_name"])
            for r in self._conn.execute("SELECT * FROM developers")
        }
        projects = {
            r["project_id"]: Project(r["project_id"], r["name"])
            for r in self._conn.execute("SELECT * FROM projects")
        }
        changes = []
        contexts: dict[str, str] = {}
        for row in self._conn.execute("SELECT payload FROM changes ORDER BY change_id"):
            change, ctx = change_from_json_obj(json.loads(row["payload"]))
            changes.append(change)
            contexts.update(ctx)
        return ReviewDump(
            developers=developers,
            projects=projects,
            changes=tuple(changes),
            code_contexts=contexts,
        )

    def comment_row(self, comment_id: str) -> sqlite3.Row | None:
        return self._conn.execute(
            "SELECT * FROM comments WHERE comment_id=?", (comment_id,)
        ).fetchone()

    def _comment_from_row(self, row: sqlite3.Row) -> ReviewComment:
        return ReviewComment(
            comment_id=row["comment_id"],
            thread_id=row["thread_id"],
            author_id=row["author_id"],
            written_at=parse_timestamp(row["written_at"], row["comment_id"]),
            text=row["text"],
            patchset_number=row["patchset_number"],
        )

    # -- labeling queue -------------------------------------------------

    def eligible_labelers(
        self,
        as_of: datetime | None = None,
        window_months: int = 4,
        min_comments: int = 50,
    ) -> list[str]:
        """Change authors who received at least `min_comments` reviewer
        comments on their changes within the trailing window."""
        end = as_of or datetime.now(timezone.utc)
        start = months_before(end, window_months)
        rows = self._conn.execute(
            "SELECT ch.author_id AS author, COUNT(*) AS received FROM comments c"
            " JOIN changes ch ON ch.change_id = c.change_id"
            " WHERE c.author_id != ch.author_id AND c.written_at >= ? AND c.written_at < ?"
            " GROUP BY ch.author_id HAVING received >= ? ORDER BY ch.author_id",
            (format_timestamp(start), format_timestamp(end), min_comments),
        ).fetchall()
        return [r["author"] for r in rows]

    def _unlabeled_ids(self, rater_id: str) -> list[str]:
        rows = self._conn.execute(
            "SELECT c.comment_id FROM comments c"
            " JOIN changes ch ON ch.change_id = c.change_id"
            " WHERE ch.author_id = ? AND c.author_id != ?"
            " AND NOT EXISTS (SELECT 1 FROM labels l WHERE l.comment_id = c.comment_id"
            "                 AND l.rater_id = ? AND l.superseded = 0)",
            (rater_id, rater_id, rater_id),
        ).fetchall()
        return [r["comment_id"] for r in rows]

    def next_unlabeled(self, rater_id: str, session_seed: int = 0) -> ReviewComment | None:
        """Next comment this rater should label, or None when exhausted.

        Order is a seeded shuffle, stable for a given (seed, rater): each
        candidate is keyed by a hash so the sequence survives restarts yet
        differs between raters.
        """
        candidates = self._unlabeled_ids(rater_id)
        if not candidates:
            return None

        def shuffle_key(comment_id: str) -> str:
            material = f"{session_seed}:{rater_id}:{comment_id}".encode("utf-8")
            return hashlib.sha256(material).hexdigest()

        chosen = min(candidates, key=shuffle_key)
        return self._comment_from_row(self.comment_row(chosen))

    def submit_label(self, label: UsefulnessLabel) -> None:
        row = self.comment_row(label.comment_id)
        if row is None:
            raise UnknownComment(label.comment_id)
        author_row = self._conn.execute(
            "SELECT author_id FROM changes WHERE change_id=?", (row["change_id"],)
        ).fetchone()
        if author_row["author_id"] != label.rater_id:
            raise NotChangeAuthor(
                f"{label.rater_id} did not author the change of comment {label.comment_id}"
            )
        with self._write_lock, self._conn:
            self._conn.execute(
                "UPDATE labels SET superseded=1 WHERE comment_id=? AND rater_id=?",
                (label.comment_id, label.rater_id),
            )
            self._conn.execute(
                "INSERT INTO labels (comment_id, rater_id, is_useful, category, labeled_at)"
                " VALUES (?, ?, ?, ?, ?)",
                (
                    label.comment_id,
                    label.rater_id,
                    int(label.is_useful),
                    label.category.value,
                    format_timestamp(label.labeled_at),
                ),
            )

    def labels(self, include_superseded: bool = False) -> list[UsefulnessLabel]:
        query = "SELECT * FROM labels"
        if not include_superseded:
            query += " WHERE superseded=0"
        query += " ORDER BY labeled_at, comment_id, rater_id"
        return [
            UsefulnessLabel(
                comment_id=r["comment_id"],
                rater_id=r["rater_id"],
                is_useful=bool(r["is_useful"]),
                category=CommentCategory(r["category"]),
                labeled_at=parse_timestamp(r["labeled_at"], r["comment_id"]),
            )
            for r in self._conn.execute(query)
        ]

    def labeling_progress(self, rater_id: str) -> dict[str, int]:
        total_row = self._conn.execute(
            "SELECT COUNT(*) AS n FROM comments c JOIN changes ch ON ch.change_id=c.change_id"
            " WHERE ch.author_id=? AND c.author_id != ?",
            (rater_id, rater_id),
        ).fetchone()
        labeled_row = self._conn.execute(
            "SELECT COUNT(DISTINCT comment_id) AS n FROM labels WHERE rater_id=? AND superseded=0",
            (rater_id,),
        ).fetchone()
        return {"labeled": labeled_row["n"], "total": total_row["n"]}

    # -- predictions ----------------------------------------------------

    def upsert_predictions(
        self,
        rows: list[tuple[str, str, int, float, datetime]],
    ) -> int:
        """Rows are (comment_id, model_version, label, probability, predicted_at)."""
        count = 0
        with self._write_lock, self._conn:
            for comment_id, model_version, label, probability, predicted_at in rows:
                if self.comment_row(comment_id) is None:
                    raise UnknownComment(comment_id)
                self._conn.execute(
                    "INSERT INTO predictions (comment_id, model_version, label, probability,"
                    " predicted_at) VALUES (?, ?, ?, ?, ?)"
                    " ON CONFLICT(comment_id, model_version) DO UPDATE SET"
                    " label=excluded.label, probability=excluded.probability,"
                    " predicted_at=excluded.predicted_at",
                    (comment_id, model_version, int(label), float(probability),
                     format_timestamp(predicted_at)),
                )
                count += 1
        return count

    def unpredicted_comment_ids(self, model_version: str) -> list[str]:
        rows = self._conn.execute(
            "SELECT comment_id FROM comments WHERE comment_id NOT IN"
            " (SELECT comment_id FROM predictions WHERE model_version=?)"
            " ORDER BY comment_id",
            (model_version,),
        ).fetchall()
        return [r["comment_id"] for r in rows]

    # -- verdicts for metrics ------------------------------------------

    def verdicts(self) -> list[CommentVerdict]:
        """Every stored comment joined with its best available verdict.

        Human labels win over predictions; among several labels the most
        recent one wins, among predictions the most recently predicted.
        """
        label_of: dict[str, tuple[str, bool]] = {}
        for r in self._conn.execute(
            "SELECT comment_id, is_useful, labeled_at FROM labels WHERE superseded=0"
            " ORDER BY labeled_at, rowid"
        ):
            label_of[r["comment_id"]] = (r["labeled_at"], bool(r["is_useful"]))
        pred_of: dict[str, tuple[str, bool]] = {}
        for r in self._conn.execute(
            "SELECT comment_id, label, predicted_at FROM predictions ORDER BY predicted_at, rowid"
        ):
            pred_of[r["comment_id"]] = (r["predicted_at"], bool(r["label"]))
        out = []
        for row in self._conn.execute("SELECT * FROM comments ORDER BY comment_id"):
            cid = row["comment_id"]
            if cid in label_of:
                verdict = label_of[cid][1]
            elif cid in pred_of:
                verdict = pred_of[cid][1]
            else:
                verdict = None
            out.append(
                CommentVerdict(
                    comment=self._comment_from_row(row),
                    change_id=row["change_id"],
                    is_useful=verdict,
                )
            )
        return out

    # -- models ---------------------------------------------------------

    def save_model_blob(
        self,
        model_version: str,
        algorithm: str,
        artifact: bytes,
        created_at: datetime,
        metadata: dict | None = None,
    ) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT INTO models (model_version, algorithm, created_at, artifact, metadata)"
                " VALUES (?, ?, ?, ?, ?) ON CONFLICT(model_version) DO UPDATE SET"
                " algorithm=excluded.algorithm, created_at=excluded.created_at,"
                " artifact=excluded.artifact, metadata=excluded.metadata",
                (model_version, algorithm, format_timestamp(created_at), artifact,
                 json.dumps(metadata or {}, sort_keys=True)),
            )

    def load_model_blob(self, model_version: str) -> bytes | None:
        row = self._conn.execute(
            "SELECT artifact FROM models WHERE model_version=?", (model_version,)
        ).fetchone()
        return bytes(row["artifact"]) if row else None

    def latest_model_version(self) -> str | None:
        row = self._conn.execute(
            "SELECT model_version FROM models ORDER BY created_at DESC, model_version DESC LIMIT 1"
        ).fetchone()
        return row["model_version"] if row else None

    # -- miner state ----------------------------------------------------

    def miner_state(self, endpoint: str) -> dict:
        row = self._conn.execute(
            "SELECT * FROM miner_state WHERE endpoint=?", (endpoint,)
        ).fetchone()
        if row is None:
            return {"endpoint": endpoint, "high_water_mark": None, "interval_seconds": 900.0}
        hwm = row["high_water_mark"]
        return {
            "endpoint": endpoint,
            "high_water_mark": parse_timestamp(hwm, "high_water_mark") if hwm else None,
            "interval_seconds": row["interval_seconds"],
        }

    def set_miner_state(
        self,
        endpoint: str,
        high_water_mark: datetime | None = None,
        interval_seconds: float | None = None,
    ) -> None:
        state = self.miner_state(endpoint)
        hwm = high_water_mark if high_water_mark is not None else state["high_water_mark"]
        interval = interval_seconds if interval_seconds is not None else state["interval_seconds"]
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT INTO miner_state (endpoint, high_water_mark, interval_seconds)"
                " VALUES (?, ?, ?) ON CONFLICT(endpoint) DO UPDATE SET"
                " high_water_mark=excluded.high_water_mark,"
                " interval_seconds=excluded.interval_seconds",
                (endpoint, format_timestamp(hwm) if hwm else None, interval),
            )

    # -- exports --------------------------------------------------------

    def labels_csv(self) -> str:
        lines = ["comment_id,rater_id,is_useful,category,labeled_at"]
        for label in self.labels():
            lines.append(
                f"{label.comment_id},{label.rater_id},{int(label.is_useful)},"
                f"{label.category.value},{format_timestamp(label.labeled_at)}"
            )
        return "\n".join(lines) + "\n"
