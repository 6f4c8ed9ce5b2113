"""One-shot smoke run over store, pipeline, config, api, and cli."""

import json
import os
import sys
import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from synth import make_dump, make_labels

from reviewlens import learn, pipeline
from reviewlens.config import AppConfig, load_config
from reviewlens.ingest.dump import serialize_review_dump
from reviewlens.model import CommentCategory, UsefulnessLabel
from reviewlens.store import NotChangeAuthor, ReviewStore, UnknownComment, months_before

def check(name, cond):
    print(("PASS " if cond else "FAIL ") + name)
    if not cond:
        raise SystemExit(name)

dump, truth = make_dump(n_changes=16, comments_per_change=3, seed=3)
labels = make_labels(dump, truth)
print(f"dump: {len(dump.changes)} changes, {sum(len(c.all_comments()) for c in dump.changes)} comments, {len(labels)} labels")

# ---- store ----
store = ReviewStore(":memory:")
counts = store.upsert_dump(dump)
check("store insert counts", counts == {"inserted": len(dump.changes), "updated": 0})
counts2 = store.upsert_dump(dump)
check("store idempotent upsert", counts2 == {"inserted": 0, "updated": 0})

back = store.load_dump()
check("store roundtrip changes", back.changes == dump.changes)
check("store roundtrip contexts", back.code_contexts == dump.code_contexts)
check("store roundtrip devs", back.developers == dump.developers)

as_of = datetime(2025, 3, 1, tzinfo=timezone.utc)
elig = store.eligible_labelers(as_of=as_of, window_months=4, min_comments=3)
check("eligible_labelers nonempty", len(elig) > 0)
elig_strict = store.eligible_labelers(as_of=as_of, min_comments=50)
check("eligible_labelers threshold", elig_strict == [])

rater = dump.changes[0].author_id
first = store.next_unlabeled(rater, session_seed=0)
again = store.next_unlabeled(rater, session_seed=0)
check("next_unlabeled stable", first is not None and first.comment_id == again.comment_id)
other_seed = store.next_unlabeled(rater, session_seed=1)
print(f"  rater={rater} first={first.comment_id} seed1={other_seed.comment_id}")

lab = UsefulnessLabel(first.comment_id, rater, True, CommentCategory.LOGICAL,
                      datetime(2025, 4, 1, tzinfo=timezone.utc))
store.submit_label(lab)
nxt = store.next_unlabeled(rater, session_seed=0)
check("next_unlabeled advances", nxt is None or nxt.comment_id != first.comment_id)

try:
    store.submit_label(UsefulnessLabel(first.comment_id, "rev00", True,
                                       CommentCategory.LOGICAL, datetime(2025, 4, 1, tzinfo=timezone.utc)))
    check("submit_label wrong rater", False)
except NotChangeAuthor:
    check("submit_label wrong rater rejected", True)
try:
    store.submit_label(UsefulnessLabel("nope", rater, True, CommentCategory.LOGICAL,
                                       datetime(2025, 4, 1, tzinfo=timezone.utc)))
    check("submit_label unknown comment", False)
except UnknownComment:
    check("submit_label unknown comment rejected", True)

relab = UsefulnessLabel(first.comment_id, rater, False, CommentCategory.PRAISE,
                        datetime(2025, 4, 2, tzinfo=timezone.utc))
store.submit_label(relab)
live = store.labels()
mine = [l for l in live if l.comment_id == first.comment_id and l.rater_id == rater]
check("relabel supersedes", len(mine) == 1 and mine[0].is_useful is False)
allrows = store.labels(include_superseded=True)
check("audit trail keeps old", len([l for l in allrows if l.comment_id == first.comment_id]) == 2)

prog = store.labeling_progress(rater)
check("labeling_progress", prog["labeled"] == 1 and prog["total"] >= 1)

now = datetime(2025, 5, 1, tzinfo=timezone.utc)
pred_rows = [(c.comment_id, "mv1", 1, 0.9, now) for c in (dump.changes[1].threads[0].comments[0],)]
store.upsert_predictions(pred_rows)
unpred = store.unpredicted_comment_ids("mv1")
check("unpredicted excludes predicted", pred_rows[0][0] not in unpred and len(unpred) > 0)

verdicts = store.verdicts()
by_id = {v.comment.comment_id: v for v in verdicts}
check("verdict label wins", by_id[first.comment_id].is_useful is False)
check("verdict prediction", by_id[pred_rows[0][0]].is_useful is True)
unknown = [v for v in verdicts if v.is_useful is None]
check("verdict unknowns present", len(unknown) > 0)

store.save_model_blob("mv1", "rf", b"{}", now)
check("model blob roundtrip", store.load_model_blob("mv1") == b"{}")
check("latest model", store.latest_model_version() == "mv1")

ep = "https://gerrit.example.com"
st0 = store.miner_state(ep)
check("miner_state empty", st0["high_water_mark"] is None)
hwm = datetime(2025, 2, 2, 3, 4, 5, tzinfo=timezone.utc)
store.set_miner_state(ep, high_water_mark=hwm)
check("miner_state roundtrip", store.miner_state(ep)["high_water_mark"] == hwm)

csv_text = store.labels_csv()
check("labels_csv header", csv_text.splitlines()[0] == "comment_id,rater_id,is_useful,category,labeled_at")

check("months_before clamp", months_before(datetime(2025, 3, 31, tzinfo=timezone.utc), 1)
      == datetime(2025, 2, 28, tzinfo=timezone.utc))

# ---- pipeline ----
labels = make_labels(dump, truth)
artifact, selection = pipeline.train_from_labels(dump, labels, learn.DEFAULT_CONFIGS["rf"],
                                                 seed=42, run_selection=False)
check("artifact algorithm", artifact.algorithm == "random_forest")
check("artifact metadata rows", artifact.metadata["n_training_rows"] == len({l.comment_id for l in labels}))
triples = pipeline.predict_comments(artifact, dump)
check("predict covers roots+replies", len(triples) == sum(len(c.all_comments()) for c in dump.changes))
pred_map = {cid: lab for cid, lab, _ in triples}
agree = sum(1 for cid, want in truth.items() if (pred_map[cid] == pipeline.USEFUL) == want)
print(f"  training-set agreement: {agree}/{len(truth)}")
check("training-set agreement high", agree / len(truth) >= 0.9)

blob = learn.model_to_json(artifact)
again_art = learn.model_from_json(blob)
t2 = pipeline.predict_comments(again_art, dump)
check("artifact roundtrip predictions", t2 == triples)

art_sel, sel = pipeline.train_from_labels(dump, labels, learn.DEFAULT_CONFIGS["dt"],
                                          seed=42, run_selection=True, selection_folds=4)
check("selection ran", sel is not None and len(art_sel.selected_features) <= 26)
print(f"  selected: {len(art_sel.selected_features)} features")

# ---- config ----
cfg = load_config(None)
check("config defaults", cfg.seed == 42 and cfg.dashboard_months == 2)
with tempfile.TemporaryDirectory() as td:
    p = Path(td, "cfg.json")
    p.write_text(json.dumps({"store_path": "/tmp/x.db", "seed": 7,
                             "users": [{"user_id": "auth00", "password_env": "RL_PW_A", "role": "admin"}]}))
    cfg2 = load_config(str(p))
    check("config file values", cfg2.seed == 7 and cfg2.store_path == "/tmp/x.db")
    check("config users", cfg2.users["auth00"].role == "admin")
    os.environ["REVIEWLENS_SEED"] = "9"
    cfg3 = load_config(str(p))
    check("env beats file", cfg3.seed == 9)
    del os.environ["REVIEWLENS_SEED"]

print("store/pipeline/config smoke all green")
