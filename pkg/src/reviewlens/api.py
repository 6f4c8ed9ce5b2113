"""HTTP/JSON service for dashboards, rankings, labeling and miner admin.

All routes live under /api. Dates are ISO-8601 (date or timestamp) and
periods are half-open [from, to) in UTC. Sessions ride in an HMAC-signed
cookie issued by /api/auth/login; credentials come from environment
variables named in the configuration, so neither the config file nor any
response body ever carries a secret.
"""

from __future__ import annotations

import hashlib
import hmac
import logging
import threading
from datetime import datetime, timedelta, timezone

from fastapi import Cookie, Depends, FastAPI, HTTPException, Query, Response
from pydantic import BaseModel

from . import metrics as metrics_mod
from .config import AppConfig, UserAccount
from .ingest.miner import MinerConfig, mine_incremental
from .metrics import Period
from .model import CommentCategory, UsefulnessLabel
from .store import NotChangeAuthor, ReviewStore, UnknownComment, months_before

log = logging.getLogger(__name__)

SESSION_COOKIE = "rl_session"

ENTITY_KINDS = ("reviewer", "project")


class LoginBody(BaseModel):
    user_id: str
    password: str


class LabelBody(BaseModel):
    comment_id: str
    is_useful: bool
    category: str
    overwrite: bool = False


class IntervalBody(BaseModel):
    interval_seconds: float


def _sign(secret: str, user_id: str) -> str:
    return hmac.new(secret.encode(), user_id.encode(), hashlib.sha256).hexdigest()


def _parse_ts(raw: str, name: str) -> datetime:
    try:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError:
        raise HTTPException(400, f"invalid {name!r} timestamp: {raw}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _iso(ts: datetime) -> str:
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def _month_start(ts: datetime) -> datetime:
    return ts.replace(day=1, hour=0, minute=0, second=0, microsecond=0)


def _add_months(ts: datetime, months: int) -> datetime:
    index = ts.year * 12 + (ts.month - 1) + months
    year, month = divmod(index, 12)
    return ts.replace(year=year, month=month + 1)


def _metrics_row(row: metrics_mod.ReviewerPeriodMetrics) -> dict:
    return {
        "id": row.developer_id,
        "NR": row.NR,
        "NC": row.NC,
        "UC": row.UC,
        "CUD": row.CUD,
        "ID": row.ID,
        "RE": row.RE,
        "RI": row.RI,
        "NC_score": row.NC_score,
        "CUD_score": row.CUD_score,
        "review_score": row.review_score,
    }


def create_app(
    store: ReviewStore,
    config: AppConfig | None = None,
    clock=lambda: datetime.now(timezone.utc),
    miner_runner=None,
) -> FastAPI:
    """Build the service around an open store.

    `clock` and `miner_runner` are injectable for tests. A runner is
    called as runner(config.miner); the default one mines the configured
    endpoint and upserts the result.
    """
    config = config or AppConfig()
    secret = config.resolve_secret()
    app = FastAPI(title="reviewlens", version="1.0.0", docs_url=None, redoc_url=None)
    mine_lock = threading.Lock()

    def default_runner(miner: MinerConfig) -> None:
        state = store.miner_state(miner.base_url)
        since = state["high_water_mark"] or datetime(1970, 1, 1, tzinfo=timezone.utc)
        result = mine_incremental(miner, since)
        store.upsert_dump(result.dump)
        store.set_miner_state(miner.base_url, high_water_mark=result.high_water_mark)

    runner = miner_runner or default_runner

    def current_user(rl_session: str | None = Cookie(default=None)) -> UserAccount:
        if rl_session and "." in rl_session:
            user_id, signature = rl_session.rsplit(".", 1)
            account = config.users.get(user_id)
            if account and hmac.compare_digest(signature, _sign(secret, user_id)):
                return account
        raise HTTPException(401, "not authenticated")

    def admin_user(user: UserAccount = Depends(current_user)) -> UserAccount:
        if user.role != "admin":
            raise HTTPException(403, "admin role required")
        return user

    def period_from_query(from_: str | None, to: str | None) -> Period:
        now = clock()
        end = _parse_ts(to, "to") if to else now
        start = _parse_ts(from_, "from") if from_ else months_before(end, config.dashboard_months)
        if start >= end:
            raise HTTPException(400, "'from' must be before 'to'")
        return Period(start, end)

    def verdicts_and_changes():
        return store.verdicts(), store.changes()

    @app.post("/api/auth/login")
    def login(body: LoginBody, response: Response) -> dict:
        account = config.users.get(body.user_id)
        expected = account.resolve_password() if account else None
        if expected is None or not hmac.compare_digest(body.password, expected):
            raise HTTPException(401, "bad credentials")
        response.set_cookie(SESSION_COOKIE, f"{body.user_id}.{_sign(secret, body.user_id)}",
                            httponly=True, samesite="strict")
        return {"user_id": body.user_id, "role": account.role}

    @app.get("/api/dashboard")
    def dashboard(
        from_: str | None = Query(default=None, alias="from"),
        to: str | None = None,
    ):
        period = period_from_query(from_, to)
        verdicts, changes = verdicts_and_changes()
        reviewer_rows = metrics_mod.reviewer_metrics(verdicts, changes, period)
        project_rows = metrics_mod.project_metrics(verdicts, changes, period)
        active_reviewers = [r for r in reviewer_rows if r.NC > 0]
        active_projects = [r for r in project_rows if r.NC > 0]
        ri_rank = metrics_mod.rank(active_reviewers, "RI")
        best_reviewer = None
        if ri_rank.entries:
            top_id, top_value, _ = ri_rank.entries[0]
            best_reviewer = {"id": top_id, "RI": int(top_value)}
        best_project = None
        if active_projects:
            best = max(active_projects, key=lambda r: (r.CUD, r.developer_id))
            best_project = {"id": best.developer_id, "useful_pct": 100.0 * best.CUD}
        project_rank = metrics_mod.rank(active_projects, "RI")
        by_id_r = {r.developer_id: r for r in reviewer_rows}
        by_id_p = {r.developer_id: r for r in project_rows}
        return {
            "period": {"from": _iso(period.start), "to": _iso(period.end)},
            "best_reviewer": best_reviewer,
            "best_project": best_project,
            "useful_pct": metrics_mod.usefulness_percent(reviewer_rows),
            "top5_reviewers": [
                {"rank": rank, **_metrics_row(by_id_r[eid])}
                for eid, _, rank in ri_rank.entries[:5]
            ],
            "top5_projects": [
                {"rank": rank, **_metrics_row(by_id_p[eid])}
                for eid, _, rank in project_rank.entries[:5]
            ],
        }

    @app.get("/api/rankings")
    def rankings(
        from_: str | None = Query(default=None, alias="from"),
        to: str | None = None,
        entity: str = "reviewer",
        key: str = "RI",
        offset: int = 0,
        limit: int = 100,
    ):
        if entity not in ENTITY_KINDS:
            raise HTTPException(400, f"unknown entity {entity!r}")
        if key not in metrics_mod.RANK_KEYS:
            raise HTTPException(400, f"unknown key {key!r}")
        period = period_from_query(from_, to)
        verdicts, changes = verdicts_and_changes()
        if entity == "reviewer":
            rows = metrics_mod.reviewer_metrics(verdicts, changes, period)
        else:
            rows = metrics_mod.project_metrics(verdicts, changes, period)
        rows = metrics_mod.legacy_scores(rows)
        ranking = metrics_mod.rank(rows, key)
        by_id = {r.developer_id: r for r in rows}
        page = ranking.entries[offset:offset + limit]
        return {
            "period": {"from": _iso(period.start), "to": _iso(period.end)},
            "entity": entity,
            "key": key,
            "total": len(ranking.entries),
            "offset": offset,
            "rows": [{"rank": rank, **_metrics_row(by_id[eid])} for eid, _, rank in page],
        }

    @app.get("/api/entities/{kind}/{entity_id}")
    def entity_timeseries(kind: str, entity_id: str, months: int = 6, end: str | None = None):
        if kind not in ENTITY_KINDS:
            raise HTTPException(400, f"unknown entity kind {kind!r}")
        dump = store.load_dump()
        known = dump.developers if kind == "reviewer" else dump.projects
        if entity_id not in known:
            raise HTTPException(404, f"unknown {kind} {entity_id!r}")
        if months < 1 or months > 120:
            raise HTTPException(400, "months must be in 1..120")
        end_ts = _parse_ts(end, "end") if end else clock()
        verdicts, changes = verdicts_and_changes()
        # The window is half-open, so an end exactly on a month boundary
        # belongs to the previous month.
        last_month = _month_start(end_ts)
        if last_month == end_ts:
            last_month = _add_months(last_month, -1)
        first_month = _add_months(last_month, -(months - 1))
        buckets = []
        for k in range(months):
            start = _add_months(first_month, k)
            stop = min(_add_months(start, 1), end_ts) if k == months - 1 else _add_months(start, 1)
            period = Period(start, stop)
            if kind == "reviewer":
                rows = metrics_mod.reviewer_metrics(verdicts, changes, period, [entity_id])
            else:
                rows = metrics_mod.project_metrics(verdicts, changes, period, [entity_id])
            rows = metrics_mod.legacy_scores(rows)
            mine = next(r for r in rows if r.developer_id == entity_id)
            buckets.append({"month": start.strftime("%Y-%m"), **_metrics_row(mine)})
        return {"id": entity_id, "kind": kind, "buckets": buckets}

    @app.get("/api/labeling/next")
    def labeling_next(seed: int = 0, user: UserAccount = Depends(current_user)):
        comment = store.next_unlabeled(user.user_id, session_seed=seed)
        progress = store.labeling_progress(user.user_id)
        if comment is None:
            return {"comment": None, "done": True, "progress": progress}
        link = None
        if config.gerrit_link_template:
            link = config.gerrit_link_template.format(comment_id=comment.comment_id)
        return {
            "comment": {
                "comment_id": comment.comment_id,
                "text": comment.text,
                "author_id": comment.author_id,
                "written_at": _iso(comment.written_at),
                "link": link,
            },
            "categories": [c.value for c in CommentCategory],
            "done": False,
            "progress": progress,
        }

    @app.post("/api/labeling/submit")
    def labeling_submit(body: LabelBody, user: UserAccount = Depends(current_user)):
        try:
            category = CommentCategory(body.category)
        except ValueError:
            raise HTTPException(400, f"unknown category {body.category!r}") from None
        already = any(
            label.comment_id == body.comment_id and label.rater_id == user.user_id
            for label in store.labels()
        )
        if already and not body.overwrite:
            raise HTTPException(409, "comment already labeled by this rater; set overwrite")
        label = UsefulnessLabel(
            comment_id=body.comment_id,
            rater_id=user.user_id,
            is_useful=body.is_useful,
            category=category,
            labeled_at=clock(),
        )
        try:
            store.submit_label(label)
        except UnknownComment:
            raise HTTPException(404, f"unknown comment {body.comment_id!r}") from None
        except NotChangeAuthor as exc:
            raise HTTPException(403, str(exc)) from None
        return {"ok": True, "progress": store.labeling_progress(user.user_id)}

    @app.get("/api/labeling/progress")
    def labeling_progress(user: UserAccount = Depends(current_user)):
        return store.labeling_progress(user.user_id)

    @app.post("/api/admin/mine/run", status_code=202)
    def mine_run(user: UserAccount = Depends(admin_user)):
        if miner_runner is None and config.miner is None:
            raise HTTPException(400, "no miner endpoint configured")
        if not mine_lock.acquire(blocking=False):
            raise HTTPException(409, "a mining run is already in progress")

        def run():
            try:
                runner(config.miner)
            except Exception:
                log.exception("mining run failed")
            finally:
                mine_lock.release()

        threading.Thread(target=run, daemon=True).start()
        return {"started": True}

    @app.put("/api/admin/mine/interval")
    def mine_interval(body: IntervalBody, user: UserAccount = Depends(admin_user)):
        if body.interval_seconds < 60:
            raise HTTPException(400, "interval must be at least 60 seconds")
        endpoint = config.miner.base_url if config.miner else "default"
        store.set_miner_state(endpoint, interval_seconds=body.interval_seconds)
        return {"endpoint": endpoint, "interval_seconds": body.interval_seconds}

    return app
