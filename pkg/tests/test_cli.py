import csv
import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from reviewlens.cli import main
from reviewlens.ingest.dump import format_timestamp, serialize_review_dump
from synth import make_dump, make_labels


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def env(tmp_path_factory):
    """Workspace with a dump file, labels CSV, loaded store and trained model."""
    td = tmp_path_factory.mktemp("cli")
    dump, truth = make_dump(n_changes=16, comments_per_change=3, seed=3)
    labels = make_labels(dump, truth)

    dump_path = td / "dump.json"
    dump_path.write_bytes(serialize_review_dump(dump))

    labels_path = td / "labels.csv"
    with open(labels_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["comment_id", "rater_id", "is_useful", "category", "labeled_at"])
        for label in labels:
            writer.writerow([
                label.comment_id, label.rater_id, int(label.is_useful),
                label.category.value, format_timestamp(label.labeled_at),
            ])

    store_arg = f"--store={td / 'store.db'}"
    code, out, _ = run(store_arg, "import", str(dump_path))
    assert code == 0

    model_path = td / "model.json"
    code, _, err = run(store_arg, "train", "--labels", str(labels_path),
                       "--algo", "rf", "--out", str(model_path), "--no-selection")
    assert code == 0, err

    return {
        "dir": td,
        "dump": dump,
        "labels": labels,
        "dump_path": dump_path,
        "labels_path": labels_path,
        "store_arg": store_arg,
        "model_path": model_path,
    }


class TestImport:
    def test_counts_reported(self, env, tmp_path):
        store_arg = f"--store={tmp_path / 'fresh.db'}"
        code, out, _ = run(store_arg, "import", str(env["dump_path"]))
        assert code == 0
        payload = json.loads(out)
        assert payload["changes"] == 16
        assert payload["inserted"] == 16
        assert payload["updated"] == 0

    def test_reimport_is_idempotent(self, env):
        code, out, _ = run(env["store_arg"], "import", str(env["dump_path"]))
        assert code == 0
        assert json.loads(out)["inserted"] == 0

    def test_missing_file_is_usage_error(self, env):
        code, _, err = run(env["store_arg"], "import", "/no/such/dump.json")
        assert code == 1
        assert "usage error" in err


class TestTrain:
    def test_model_written_with_summary(self, env):
        assert env["model_path"].exists()
        blob = json.loads(env["model_path"].read_bytes())
        assert blob["algorithm"] == "random_forest"

    def test_summary_fields(self, env, tmp_path):
        out_path = tmp_path / "m.json"
        code, out, _ = run(env["store_arg"], "train", "--labels", str(env["labels_path"]),
                           "--algo", "dt", "--out", str(out_path), "--no-selection")
        assert code == 0
        summary = json.loads(out)
        assert summary["algorithm"] == "decision_tree"
        assert summary["training_rows"] == len(env["labels"])
        assert out_path.exists()

    def test_retrain_is_byte_identical(self, env, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        base = [env["store_arg"], "train", "--labels", str(env["labels_path"]),
                "--algo", "rf", "--no-selection"]
        assert run(*base, "--out", str(p1))[0] == 0
        assert run(*base, "--out", str(p2))[0] == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_store_is_runtime_error(self, env, tmp_path):
        code, _, err = run(f"--store={tmp_path / 'empty.db'}", "train",
                           "--labels", str(env["labels_path"]),
                           "--algo", "dt", "--out", str(tmp_path / "m.json"))
        assert code == 2
        assert "error" in err


class TestPredict:
    def test_predicts_every_comment(self, env):
        code, out, _ = run(env["store_arg"], "predict", "--model", str(env["model_path"]))
        assert code == 0
        expected = sum(len(c.all_comments()) for c in env["dump"].changes)
        assert json.loads(out)["predicted"] == expected

    def test_all_unpredicted_reaches_zero(self, env):
        run(env["store_arg"], "predict", "--model", str(env["model_path"]))
        code, out, _ = run(env["store_arg"], "predict", "--model", str(env["model_path"]),
                           "--all-unpredicted")
        assert code == 0
        assert json.loads(out)["predicted"] == 0

    def test_missing_model_file(self, env):
        code, _, _ = run(env["store_arg"], "predict", "--model", "/no/model.json")
        assert code == 1


RANK_WINDOW = ("--from", "2025-01-01T00:00:00Z", "--to", "2025-04-01T00:00:00Z")


class TestRank:
    def test_table_output(self, env):
        code, out, _ = run(env["store_arg"], "rank", *RANK_WINDOW, "--key", "RI")
        assert code == 0
        assert out.splitlines()[0].startswith("rank")

    def test_csv_shape_and_determinism(self, env):
        code, out, _ = run(env["store_arg"], "rank", *RANK_WINDOW, "--key", "RI", "--csv")
        assert code == 0
        header = out.splitlines()[0]
        assert header == ("developer_id,period_from,period_to,NR,NC,UC,"
                          "CUD,ID,RE,RI,NC_score,CUD_score,review_score")
        again = run(env["store_arg"], "rank", *RANK_WINDOW, "--key", "RI", "--csv")[1]
        assert again == out

    def test_project_entity(self, env):
        code, out, _ = run(env["store_arg"], "rank", *RANK_WINDOW,
                           "--entity", "project", "--csv")
        assert code == 0
        assert "proj0" in out

    def test_bad_key_is_usage_error(self, env):
        code, _, _ = run(env["store_arg"], "rank", *RANK_WINDOW, "--key", "XX")
        assert code == 1

    def test_bad_timestamp_is_usage_error(self, env):
        code, _, err = run(env["store_arg"], "rank", "--from", "bogus",
                           "--to", "2025-04-01T00:00:00Z")
        assert code == 1
        assert "usage error" in err

    def test_backwards_period_is_usage_error(self, env):
        code, _, _ = run(env["store_arg"], "rank", "--from", "2025-04-01T00:00:00Z",
                         "--to", "2025-01-01T00:00:00Z")
        assert code == 1


class TestEvaluate:
    def test_row_count(self, env):
        code, out, _ = run(env["store_arg"], "evaluate", "--labels", str(env["labels_path"]),
                           "--algo", "dt", "--repeats", "2", "--folds", "4", "--json")
        assert code == 0
        report = json.loads(out)["reports"]["dt"]
        assert report["rows"] == 8
        assert 0.0 <= report["accuracy"] <= 1.0

    def test_compare_emits_three_metrics_per_pair(self, env):
        code, out, _ = run(env["store_arg"], "evaluate", "--labels", str(env["labels_path"]),
                           "--repeats", "2", "--folds", "4", "--compare", "dt,lr", "--json")
        assert code == 0
        payload = json.loads(out)
        assert len(payload["comparisons"]) == 3
        metrics = {c["metric"] for c in payload["comparisons"]}
        assert metrics == {"accuracy", "f1_0", "f1_1"}

    def test_table_output_mode(self, env):
        code, out, _ = run(env["store_arg"], "evaluate", "--labels", str(env["labels_path"]),
                           "--algo", "dt", "--repeats", "1", "--folds", "3")
        assert code == 0
        assert "accuracy" in out


class TestExitCodes:
    def test_help_exits_zero(self):
        code, out, _ = run("--help")
        assert code == 0
        assert "Usage" in out

    def test_unknown_command(self, env):
        assert run(env["store_arg"], "nosuchcmd")[0] == 1

    def test_mine_without_endpoint_config(self, env):
        code, _, err = run(env["store_arg"], "mine")
        assert code == 1
        assert "usage error" in err

    def test_serve_registered(self):
        code, out, _ = run("serve", "--help")
        assert code == 0
        assert "--port" in out


class TestConfigFile:
    def test_config_supplies_defaults(self, env, tmp_path):
        config_path = tmp_path / "rl.json"
        store_path = tmp_path / "cfg.db"
        config_path.write_text(json.dumps({"store_path": str(store_path), "seed": 9}))
        code, out, _ = run("--config", str(config_path), "import", str(env["dump_path"]))
        assert code == 0
        assert json.loads(out)["inserted"] == 16
        assert store_path.exists()

    def test_flag_overrides_config(self, env, tmp_path):
        config_path = tmp_path / "rl.json"
        config_path.write_text(json.dumps({"store_path": str(tmp_path / "ignored.db")}))
        override = tmp_path / "wins.db"
        code, _, _ = run("--config", str(config_path), f"--store={override}",
                         "import", str(env["dump_path"]))
        assert code == 0
        assert override.exists()
        assert not (tmp_path / "ignored.db").exists()
