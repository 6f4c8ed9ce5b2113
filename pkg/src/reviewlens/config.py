"""Runtime configuration: JSON key-value file plus environment overrides.

Secrets never live in the file or on the command line: the miner password
and the cookie-signing secret are read from environment variables named
here. Documented keys:

    store_path          path to the SQLite store
    model_path          path to the trained model artifact
    seed                default seed for stochastic commands (42)
    log_level           python logging level name
    secret_env          env var holding the cookie-signing secret
    gerrit_link_template  optional deep-link pattern with {comment_id}
    dashboard_months    default dashboard window length (2)
    miner.base_url / miner.username / miner.password_env / miner.poll_interval_seconds
    users               map user_id -> {password_env: ..., role: admin|user}
                        (a list of objects carrying user_id also works)
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .ingest.miner import MinerConfig

ENV_PREFIX = "REVIEWLENS_"
DEFAULT_SECRET_ENV = "REVIEWLENS_SECRET"


class BadConfig(ValueError):
    """Configuration file is missing or malformed."""


@dataclass(frozen=True)
class UserAccount:
    """A dashboard/labeling user; the user id doubles as developer id."""

    user_id: str
    password_env: str
    role: str = "user"

    def resolve_password(self) -> str | None:
        return os.environ.get(self.password_env)


@dataclass(frozen=True)
class AppConfig:
    store_path: str = "reviewlens.db"
    model_path: str = "model.json"
    seed: int = 42
    log_level: str = "INFO"
    secret_env: str = DEFAULT_SECRET_ENV
    gerrit_link_template: str | None = None
    dashboard_months: int = 2
    miner: MinerConfig | None = None
    users: dict[str, UserAccount] = field(default_factory=dict)

    def resolve_secret(self) -> str:
        # A missing secret still yields a working (single-process) server;
        # sessions just do not survive restarts.
        return os.environ.get(self.secret_env, "reviewlens-dev-secret")


def _env_override(key: str, fallback):
    raw = os.environ.get(ENV_PREFIX + key.upper())
    if raw is None:
        return fallback
    if isinstance(fallback, int) and not isinstance(fallback, bool):
        return int(raw)
    return raw


def load_config(path: str | Path | None = None) -> AppConfig:
    obj: dict = {}
    if path is not None:
        try:
            obj = json.loads(Path(path).read_text("utf-8"))
        except FileNotFoundError:
            raise BadConfig(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise BadConfig(f"config file is not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise BadConfig("config top level must be an object")

    miner = None
    miner_obj = obj.get("miner")
    if miner_obj:
        miner = MinerConfig(
            base_url=miner_obj["base_url"],
            username=miner_obj.get("username", ""),
            password_env=miner_obj.get("password_env", "REVIEWLENS_MINER_PASSWORD"),
            poll_interval_seconds=float(miner_obj.get("poll_interval_seconds", 900.0)),
        )

    raw_users = obj.get("users") or {}
    if isinstance(raw_users, list):
        try:
            raw_users = {u["user_id"]: u for u in raw_users}
        except (TypeError, KeyError):
            raise BadConfig("each entry in the users list needs a user_id") from None
    users = {}
    for user_id, user_obj in raw_users.items():
        users[user_id] = UserAccount(
            user_id=user_id,
            password_env=user_obj.get("password_env", f"{ENV_PREFIX}PASSWORD_{user_id.upper()}"),
            role=user_obj.get("role", "user"),
        )

    return AppConfig(
        store_path=_env_override("store_path", obj.get("store_path", "reviewlens.db")),
        model_path=_env_override("model_path", obj.get("model_path", "model.json")),
        seed=_env_override("seed", int(obj.get("seed", 42))),
        log_level=_env_override("log_level", obj.get("log_level", "INFO")),
        secret_env=obj.get("secret_env", DEFAULT_SECRET_ENV),
        gerrit_link_template=obj.get("gerrit_link_template"),
        dashboard_months=int(obj.get("dashboard_months", 2)),
        miner=miner,
        users=users,
    )
