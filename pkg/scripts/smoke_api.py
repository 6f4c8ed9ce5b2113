"""Smoke run of every HTTP endpoint through fastapi.testclient."""

import json
import os
import sys
import threading
from datetime import datetime, timedelta, timezone
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from fastapi.testclient import TestClient
from synth import make_dump, make_labels

from reviewlens.api import create_app
from reviewlens.config import AppConfig, UserAccount
from reviewlens.store import ReviewStore


def check(name, cond, extra=""):
    print(("PASS " if cond else "FAIL ") + name + ((" :: " + extra) if extra and not cond else ""))
    if not cond:
        raise SystemExit(name)


dump, truth = make_dump(n_changes=16, comments_per_change=3, seed=3)
labels = make_labels(dump, truth)
store = ReviewStore(":memory:")
store.upsert_dump(dump)
for lab in labels[:10]:
    store.submit_label(lab)
now = datetime(2025, 4, 1, tzinfo=timezone.utc)
preds = [(c.comment_id, "mv1", int(truth.get(c.comment_id, False)), 0.7, now)
         for ch in dump.changes for c in ch.all_comments() if c.comment_id in truth]
store.upsert_predictions(preds)

os.environ["RL_PW_ALICE"] = "s3cret"
os.environ["RL_PW_ADMIN"] = "root-pw"
rater = dump.changes[0].author_id
config = AppConfig(
    store_path=":memory:",
    users={
        rater: UserAccount(user_id=rater, password_env="RL_PW_ALICE", role="user"),
        "boss": UserAccount(user_id="boss", password_env="RL_PW_ADMIN", role="admin"),
    },
    gerrit_link_template="https://gerrit.example.com/c/{comment_id}",
)
clock_value = datetime(2025, 3, 15, tzinfo=timezone.utc)
app = create_app(store, config, clock=lambda: clock_value)
client = TestClient(app)

# auth
r = client.post("/api/auth/login", json={"user_id": rater, "password": "wrong"})
check("login bad password 401", r.status_code == 401, str(r.status_code))
r = client.post("/api/auth/login", json={"user_id": "ghost", "password": "x"})
check("login unknown user 401", r.status_code == 401)
r = client.post("/api/auth/login", json={"user_id": rater, "password": "s3cret"})
check("login ok", r.status_code == 200 and "rl_session" in r.cookies, str(r.status_code))

# dashboard
r = client.get("/api/dashboard")
check("dashboard 200", r.status_code == 200, r.text[:300])
d = r.json()
check("dashboard keys", all(k in d for k in ("period", "best_reviewer", "best_project", "useful_pct",
                                             "top5_reviewers", "top5_projects")),
      json.dumps(sorted(d.keys())))
check("dashboard default window", d["period"]["from"] == "2025-01-15T00:00:00Z" and d["period"]["to"] == "2025-03-15T00:00:00Z",
      json.dumps(d["period"]))
check("top reviewers <=5", len(d["top5_reviewers"]) <= 5)
print("  best_reviewer:", json.dumps(d["best_reviewer"])[:160])
r = client.get("/api/dashboard", params={"from": "2025-01-01T00:00:00Z", "to": "2025-03-01T00:00:00Z"})
check("dashboard explicit window", r.status_code == 200 and r.json()["period"]["from"] == "2025-01-01T00:00:00Z")
r = client.get("/api/dashboard", params={"from": "2025-03-01T00:00:00Z", "to": "2025-01-01T00:00:00Z"})
check("dashboard backwards window 400", r.status_code == 400)
r = client.get("/api/dashboard", params={"from": "not-a-date"})
check("dashboard bad date 400", r.status_code == 400)

# rankings
r = client.get("/api/rankings", params={"entity": "reviewer", "key": "RI",
                                        "from": "2025-01-01T00:00:00Z", "to": "2025-04-01T00:00:00Z"})
check("rankings 200", r.status_code == 200, r.text[:300])
rk = r.json()
check("rankings rows", len(rk["rows"]) > 0 and "review_score" in rk["rows"][0], json.dumps(rk)[:200])
positions = [row["rank"] for row in rk["rows"]]
check("rankings sorted", positions == sorted(positions))
r2 = client.get("/api/rankings", params={"entity": "reviewer", "key": "RI",
                                         "from": "2025-01-01T00:00:00Z", "to": "2025-04-01T00:00:00Z",
                                         "offset": 1, "limit": 2})
check("rankings pagination", len(r2.json()["rows"]) == 2 and r2.json()["rows"][0] == rk["rows"][1])
r = client.get("/api/rankings", params={"entity": "nope"})
check("rankings bad entity 400", r.status_code == 400)
r = client.get("/api/rankings", params={"key": "XX"})
check("rankings bad key 400", r.status_code == 400)
r = client.get("/api/rankings", params={"entity": "project", "from": "2025-01-01T00:00:00Z",
                                        "to": "2025-04-01T00:00:00Z"})
check("rankings project 200", r.status_code == 200 and len(r.json()["rows"]) > 0)

# entity timeseries
rev = rk["rows"][0]["developer_id"] if "developer_id" in rk["rows"][0] else rk["rows"][0]["id"]
r = client.get(f"/api/entities/reviewer/{rev}", params={"months": 3, "end": "2025-04-01T00:00:00Z"})
check("timeseries 200", r.status_code == 200, r.text[:300])
ts = r.json()
check("timeseries buckets", len(ts["buckets"]) == 3, json.dumps(ts)[:300])
check("timeseries labels", [b["month"] for b in ts["buckets"]] == ["2025-01", "2025-02", "2025-03"],
      json.dumps([b["month"] for b in ts["buckets"]]))
r = client.get("/api/entities/reviewer/ghost-rev")
check("timeseries unknown 404", r.status_code == 404, str(r.status_code))
r = client.get("/api/entities/cat/x")
check("timeseries bad kind 400", r.status_code == 400)

# labeling requires auth
fresh = TestClient(app)
r = fresh.get("/api/labeling/next")
check("labeling unauthenticated 401", r.status_code == 401, str(r.status_code))

r = client.get("/api/labeling/next", params={"seed": 5})
check("labeling next 200", r.status_code == 200, r.text[:300])
nxt = r.json()
check("labeling next shape", ("comment" in nxt) and ("progress" in nxt) and ("categories" in nxt), json.dumps(nxt)[:200])
if nxt["comment"] is not None:
    check("labeling deep link", nxt["comment"]["link"].startswith("https://gerrit.example.com/c/"))
    cid = nxt["comment"]["comment_id"]
    r = client.post("/api/labeling/submit", json={"comment_id": cid, "is_useful": True, "category": "Logical"})
    check("labeling submit 200", r.status_code == 200, r.text[:200])
    r = client.post("/api/labeling/submit", json={"comment_id": cid, "is_useful": True, "category": "Logical"})
    check("labeling resubmit 409", r.status_code == 409, str(r.status_code))
    r = client.post("/api/labeling/submit", json={"comment_id": cid, "is_useful": False, "category": "Praise", "overwrite": True})
    check("labeling overwrite 200", r.status_code == 200, r.text[:200])
    r = client.post("/api/labeling/submit", json={"comment_id": cid, "is_useful": True, "category": "NotACategory"})
    check("labeling bad category 400", r.status_code == 400)
    r = client.post("/api/labeling/submit", json={"comment_id": "missing", "is_useful": True, "category": "Logical"})
    check("labeling unknown comment 404", r.status_code == 404, str(r.status_code))
r = client.get("/api/labeling/progress")
check("labeling progress", r.status_code == 200 and "labeled" in r.json())

# exhaustion: label everything for this rater, then expect done
while True:
    nxt = client.get("/api/labeling/next").json()
    if nxt["comment"] is None:
        check("labeling exhaustion done flag", nxt.get("done") is True, json.dumps(nxt))
        break
    cid = nxt["comment"]["comment_id"]
    rr = client.post("/api/labeling/submit", json={"comment_id": cid, "is_useful": True, "category": "Logical", "overwrite": True})
    if rr.status_code != 200:
        check("labeling loop submit", False, rr.text[:200])

# admin
r = client.post("/api/admin/mine/run")
check("mine as user 403", r.status_code == 403, str(r.status_code))
r = client.put("/api/admin/mine/interval", json={"interval_seconds": 120})
check("interval as user 403", r.status_code == 403)

boss = TestClient(app)
r = boss.post("/api/auth/login", json={"user_id": "boss", "password": "root-pw"})
check("admin login", r.status_code == 200)
r = boss.put("/api/admin/mine/interval", json={"interval_seconds": 30})
check("interval below floor 400", r.status_code == 400, str(r.status_code))
r = boss.put("/api/admin/mine/interval", json={"interval_seconds": 300})
check("interval ok", r.status_code == 200, r.text[:200])

r = boss.post("/api/admin/mine/run")
check("mine without endpoint 400", r.status_code == 400, str(r.status_code))

ran = threading.Event()
def fake_runner(miner):
    ran.set()

app2 = create_app(store, config, clock=lambda: clock_value, miner_runner=fake_runner)
boss2 = TestClient(app2)
boss2.post("/api/auth/login", json={"user_id": "boss", "password": "root-pw"})
r = boss2.post("/api/admin/mine/run")
check("mine run 202", r.status_code == 202, f"{r.status_code} {r.text[:200]}")
check("mine runner invoked", ran.wait(timeout=5))

print("api smoke all green")
