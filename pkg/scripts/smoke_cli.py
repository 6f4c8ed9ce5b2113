"""CLI smoke: import -> train -> predict -> rank -> evaluate plus exit codes."""

import csv
import io
import json
import sys
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from synth import make_dump, make_labels

from reviewlens.cli import main
from reviewlens.ingest.dump import format_timestamp, serialize_review_dump


def check(name, cond, extra=""):
    print(("PASS " if cond else "FAIL ") + name + ((" :: " + str(extra)) if not cond else ""))
    if not cond:
        raise SystemExit(name)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


dump, truth = make_dump(n_changes=16, comments_per_change=3, seed=3)
labels = make_labels(dump, truth)

with tempfile.TemporaryDirectory() as td:
    td = Path(td)
    dump_path = td / "dump.json"
    dump_path.write_bytes(serialize_review_dump(dump))
    labels_path = td / "labels.csv"
    with open(labels_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["comment_id", "rater_id", "is_useful", "category", "labeled_at"])
        for l in labels:
            w.writerow([l.comment_id, l.rater_id, int(l.is_useful), l.category.value,
                        format_timestamp(l.labeled_at)])
    store_arg = f"--store={td / 'store.db'}"

    code, out, err = run(store_arg, "import", str(dump_path))
    check("import exit 0", code == 0, (out, err))
    payload = json.loads(out)
    check("import counts", payload["inserted"] == 16 and payload["changes"] == 16, out)

    code, out, err = run(store_arg, "import", str(dump_path))
    check("re-import idempotent", code == 0 and json.loads(out)["inserted"] == 0, out)

    model_path = td / "model.json"
    code, out, err = run(store_arg, "train", "--labels", str(labels_path),
                         "--algo", "rf", "--out", str(model_path), "--no-selection")
    check("train exit 0", code == 0, (out, err))
    check("train wrote model", model_path.exists())
    tr = json.loads(out)
    check("train summary", tr["algorithm"] == "random_forest" and tr["training_rows"] == len(labels), out)

    blob1 = model_path.read_bytes()
    code, out, err = run(store_arg, "--seed", "42", "train", "--labels", str(labels_path),
                         "--algo", "rf", "--out", str(model_path), "--no-selection")
    check("re-train byte identical", code == 0 and model_path.read_bytes() == blob1)

    code, out, err = run(store_arg, "predict", "--model", str(model_path))
    check("predict exit 0", code == 0, (out, err))
    pr = json.loads(out)
    check("predict count", pr["predicted"] == sum(len(c.all_comments()) for c in dump.changes), out)

    code, out, err = run(store_arg, "predict", "--model", str(model_path), "--all-unpredicted")
    check("predict all-unpredicted empty", code == 0 and json.loads(out)["predicted"] == 0, out)

    code, out, err = run(store_arg, "rank", "--from", "2025-01-01T00:00:00Z",
                         "--to", "2025-04-01T00:00:00Z", "--key", "RI")
    check("rank table exit 0", code == 0, (out, err))
    check("rank table header", out.splitlines()[0].startswith("rank"), out.splitlines()[:2])

    code, out, err = run(store_arg, "rank", "--from", "2025-01-01T00:00:00Z",
                         "--to", "2025-04-01T00:00:00Z", "--key", "RI", "--csv")
    check("rank csv exit 0", code == 0, (out, err))
    head = out.splitlines()[0]
    check("rank csv header", head.startswith("developer_id,period_from,period_to,NR,NC,UC"), head)
    code2, out2, _ = run(store_arg, "rank", "--from", "2025-01-01T00:00:00Z",
                         "--to", "2025-04-01T00:00:00Z", "--key", "RI", "--csv")
    check("rank csv deterministic", out2 == out)

    code, out, err = run(store_arg, "rank", "--from", "2025-01-01T00:00:00Z",
                         "--to", "2025-04-01T00:00:00Z", "--entity", "project", "--csv")
    check("rank project exit 0", code == 0 and "proj0" in out, (out, err))

    code, out, err = run(store_arg, "evaluate", "--labels", str(labels_path),
                         "--algo", "dt", "--repeats", "2", "--folds", "4", "--json")
    check("evaluate exit 0", code == 0, (out, err))
    ev = json.loads(out)
    check("evaluate rows", ev["reports"]["dt"]["rows"] == 8, out)

    code, out, err = run(store_arg, "evaluate", "--labels", str(labels_path),
                         "--repeats", "2", "--folds", "4", "--compare", "dt,lr", "--json")
    check("evaluate compare", code == 0 and len(json.loads(out)["comparisons"]) == 3, (out[:400], err[:400]))

    # exit codes
    code, out, err = run(store_arg, "rank", "--from", "bad")
    check("usage error exit 1", code == 1, (code, err))
    code, out, err = run(store_arg, "rank", "--from", "bad", "--to", "2025-04-01T00:00:00Z")
    check("bad timestamp exit 1", code == 1, (code, err))
    code, out, err = run(store_arg, "nosuchcmd")
    check("unknown command exit 1", code == 1, (code, err))
    code, out, err = run(store_arg, "mine")
    check("mine unconfigured exit 1", code == 1, (code, err))
    code, out, err = run(f"--store={td / 'empty.db'}", "train", "--labels", str(labels_path),
                         "--algo", "dt", "--out", str(td / 'm2.json'))
    check("runtime error exit 2", code == 2, (code, out, err))
    code, out, err = run(store_arg, "rank", "--from", "2025-04-01T00:00:00Z",
                         "--to", "2025-01-01T00:00:00Z")
    check("backwards period exit 1", code == 1, (code, err))

print("cli smoke all green")
