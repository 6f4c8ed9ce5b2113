"""Regenerate the checked-in end-to-end golden files under tests/golden/.

Produces a fixture dump, author labels, a trained model artifact, the
ranking CSV printed by the CLI replay, and the dashboard JSON body. All
five are deterministic, so reruns of this script leave git clean.
"""

import csv
import io
import json
import sys
import tempfile
from contextlib import redirect_stdout
from datetime import datetime, timezone
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from fastapi.testclient import TestClient

from reviewlens.api import create_app
from reviewlens.cli import main
from reviewlens.config import AppConfig
from reviewlens.ingest.dump import format_timestamp, serialize_review_dump
from reviewlens.store import ReviewStore
from synth import make_dump, make_labels

GOLDEN = ROOT / "tests" / "golden"
CLOCK = datetime(2025, 2, 1, tzinfo=timezone.utc)
RANK_ARGS = ("rank", "--from", "2025-01-01T00:00:00Z", "--to", "2025-02-01T00:00:00Z",
             "--key", "RI", "--csv")


def run(*argv) -> str:
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(list(argv))
    if code != 0:
        raise SystemExit(f"command failed ({code}): {argv}\n{out.getvalue()}")
    return out.getvalue()


def main_():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    dump, truth = make_dump(
        n_changes=20, comments_per_change=3, useful_fraction=0.55,
        noise_rate=0.05, seed=33,
    )
    labels = make_labels(dump, truth, seed=12)

    (GOLDEN / "fixture.json").write_bytes(serialize_review_dump(dump))
    with open(GOLDEN / "labels.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["comment_id", "rater_id", "is_useful", "category", "labeled_at"])
        for label in labels:
            writer.writerow([
                label.comment_id, label.rater_id, int(label.is_useful),
                label.category.value, format_timestamp(label.labeled_at),
            ])

    with tempfile.TemporaryDirectory() as td:
        td = Path(td)
        train_store = f"--store={td / 'train.db'}"
        run(train_store, "import", str(GOLDEN / "fixture.json"))
        run(train_store, "--seed", "42", "train",
            "--labels", str(GOLDEN / "labels.csv"),
            "--algo", "rf", "--out", str(GOLDEN / "model.json"))

        replay_db = td / "replay.db"
        replay_store = f"--store={replay_db}"
        run(replay_store, "import", str(GOLDEN / "fixture.json"))
        run(replay_store, "predict", "--model", str(GOLDEN / "model.json"),
            "--all-unpredicted")
        csv_text = run(replay_store, *RANK_ARGS)
        (GOLDEN / "rank.csv").write_bytes(csv_text.encode())

        store = ReviewStore(replay_db)
        app = create_app(store, AppConfig(), clock=lambda: CLOCK)
        body = TestClient(app).get("/api/dashboard").json()
        (GOLDEN / "dashboard.json").write_text(
            json.dumps(body, indent=2, sort_keys=True) + "\n"
        )
        store.close()

    for name in ("fixture.json", "labels.csv", "model.json", "rank.csv", "dashboard.json"):
        print(f"wrote {GOLDEN / name} ({(GOLDEN / name).stat().st_size} bytes)")


if __name__ == "__main__":
    main_()
