import json
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import pytest

from reviewlens.ingest.miner import (
    AuthFailure,
    MinerConfig,
    NetworkFailure,
    SchemaMismatch,
    mine_incremental,
)

PASSWORD_ENV = "TEST_MINER_PW"


def _wire_change(n, updated="2025-02-01T00:00:00Z", more=False):
    obj = {
        "id": f"chg{n:03d}",
        "project": {"id": "proj", "name": "Proj"},
        "owner": {"id": "auth", "name": "Arthur"},
        "created": "2025-01-01T00:00:00Z",
        "updated": updated,
        "status": "MERGED",
        "revisions": [
            {"number": 1, "uploaded": "2025-01-01T00:00:00Z",
             "files": [{"path": "a.py", "lines": [3, 9]}]},
        ],
        "threads": [
            {"id": f"chg{n:03d}-t", "path": "a.py", "line": 3, "patchset": 1,
             "comments": [
                 {"id": f"chg{n:03d}-c", "author": {"id": "rev", "name": "Reva"},
                  "written": "2025-01-01T06:00:00Z", "message": "tighten this",
                  "patchset": 1, "context": "x = 1\n"},
             ]},
        ],
    }
    if more:
        obj["_more_changes"] = True
    return obj


class _Server:
    """Scriptable endpoint: each request pops the next canned response."""

    def __init__(self, script):
        self.script = list(script)
        self.requests = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *a):
                pass

            def do_GET(self):
                parsed = urlparse(self.path)
                outer.requests.append(
                    {"path": parsed.path, "query": parse_qs(parsed.query),
                     "auth": self.headers.get("Authorization")}
                )
                status, body = outer.script.pop(0) if outer.script else (200, ")]}'\n[]")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.end_headers()
                self.wfile.write(body.encode("utf-8"))

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self):
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


def _body(changes):
    return ")]}'\n" + json.dumps(changes)


@pytest.fixture()
def password(monkeypatch):
    monkeypatch.setenv(PASSWORD_ENV, "hunter2")


def _config(server):
    return MinerConfig(base_url=server.base_url, username="miner", password_env=PASSWORD_ENV)


SINCE = datetime(2025, 1, 1, tzinfo=timezone.utc)


def test_single_page_mine(password):
    server = _Server([(200, _body([_wire_change(1)]))])
    try:
        result = mine_incremental(_config(server), SINCE)
    finally:
        server.close()
    assert len(result.dump.changes) == 1
    change = result.dump.changes[0]
    assert change.change_id == "chg001"
    assert change.threads[0].comments[0].text == "tighten this"
    assert result.dump.code_contexts["chg001-c"] == "x = 1\n"
    assert result.high_water_mark == datetime(2025, 2, 1, tzinfo=timezone.utc)
    q = server.requests[0]["query"]
    assert q["since"] == ["2025-01-01T00:00:00Z"]
    assert server.requests[0]["auth"].startswith("Basic ")


def test_pagination_follows_more_changes(password):
    page1 = [_wire_change(1), _wire_change(2, more=True)]
    page2 = [_wire_change(3)]
    server = _Server([(200, _body(page1)), (200, _body(page2))])
    try:
        result = mine_incremental(_config(server), SINCE)
    finally:
        server.close()
    assert [c.change_id for c in result.dump.changes] == ["chg001", "chg002", "chg003"]
    assert server.requests[1]["query"]["start"] == ["2"]


def test_client_side_since_refilter(password):
    stale = _wire_change(1, updated="2024-12-01T00:00:00Z")
    fresh = _wire_change(2, updated="2025-03-01T00:00:00Z")
    server = _Server([(200, _body([stale, fresh]))])
    try:
        result = mine_incremental(_config(server), SINCE)
    finally:
        server.close()
    assert [c.change_id for c in result.dump.changes] == ["chg002"]


def test_high_water_mark_falls_back_to_since(password):
    server = _Server([(200, _body([]))])
    try:
        result = mine_incremental(_config(server), SINCE)
    finally:
        server.close()
    assert result.dump.changes == ()
    assert result.high_water_mark == SINCE


def test_auth_rejection_is_not_retried(password):
    server = _Server([(401, "denied"), (200, _body([]))])
    try:
        with pytest.raises(AuthFailure):
            mine_incremental(_config(server), SINCE)
        assert len(server.requests) == 1
    finally:
        server.close()


def test_missing_password_env(monkeypatch):
    monkeypatch.delenv(PASSWORD_ENV, raising=False)
    server = _Server([])
    try:
        with pytest.raises(AuthFailure):
            mine_incremental(_config(server), SINCE)
        assert server.requests == []
    finally:
        server.close()


def test_transient_5xx_retried_then_succeeds(password):
    server = _Server([(500, "boom"), (200, _body([_wire_change(1)]))])
    sleeps = []
    try:
        result = mine_incremental(_config(server), SINCE, sleep=sleeps.append)
    finally:
        server.close()
    assert len(result.dump.changes) == 1
    assert sleeps == [0.2]


def test_gives_up_after_bounded_retries(password):
    server = _Server([(500, "x")] * 10)
    sleeps = []
    try:
        with pytest.raises(NetworkFailure):
            mine_incremental(_config(server), SINCE, sleep=sleeps.append)
        assert len(server.requests) == 4  # initial try + 3 retries
    finally:
        server.close()
    assert sleeps == [0.2, 0.4, 0.8]


def test_unrecognized_payload(password):
    server = _Server([(200, _body([{"id": "x", "nope": 1}]))])
    try:
        with pytest.raises(SchemaMismatch):
            mine_incremental(_config(server), SINCE)
    finally:
        server.close()


def test_non_array_payload(password):
    server = _Server([(200, ")]}'\n{}")])
    try:
        with pytest.raises(SchemaMismatch):
            mine_incremental(_config(server), SINCE)
    finally:
        server.close()


def test_invalid_change_rejected(password):
    bad = _wire_change(1)
    bad["revisions"][0]["number"] = 2  # patchsets must start at 1
    server = _Server([(200, _body([bad]))])
    try:
        with pytest.raises(SchemaMismatch):
            mine_incremental(_config(server), SINCE)
    finally:
        server.close()


def test_password_never_in_query(password):
    server = _Server([(200, _body([]))])
    try:
        mine_incremental(_config(server), SINCE)
    finally:
        server.close()
    for req in server.requests:
        assert "hunter2" not in json.dumps(req["query"])
