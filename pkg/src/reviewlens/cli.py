"""Operator command line: import/mine review data, train and evaluate
usefulness models, predict, rank, export, and serve the HTTP API.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import features, learn, metrics, pipeline
from .config import AppConfig, load_config
from .ingest.dump import parse_review_dump, parse_timestamp
from .ingest.miner import mine_incremental
from .learn.training import DEFAULT_CONFIGS
from .model import CommentCategory, UsefulnessLabel
from .store import ReviewStore

log = logging.getLogger("reviewlens")

ALGO_CHOICES = ("dt", "rf", "lr")


class RuntimeFailure(click.ClickException):
    exit_code = 2


class TimestampParamType(click.ParamType):
    """ISO-8601 timestamp argument, normalized to UTC."""

    name = "timestamp"

    def convert(self, value, param, ctx):
        if isinstance(value, datetime):
            return value
        try:
            return parse_timestamp(value, param.name if param else "timestamp")
        except Exception as exc:
            self.fail(str(exc), param, ctx)


TIMESTAMP = TimestampParamType()


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; env vars REVIEWLENS_* override.")
@click.option("--store", "store_path", type=click.Path(), default=None,
              help="SQLite store path (overrides config).")
@click.option("--seed", type=int, default=None, help="Seed for stochastic commands.")
@click.option("--log-level", default=None, help="Logging level name.")
@click.pass_context
def cli(ctx, config_path, store_path, seed, log_level):
    """Self-hosted code-review analytics."""
    config = load_config(config_path)
    if store_path is not None:
        config = AppConfig(**{**config.__dict__, "store_path": store_path})
    if seed is not None:
        config = AppConfig(**{**config.__dict__, "seed": seed})
    if log_level is not None:
        config = AppConfig(**{**config.__dict__, "log_level": log_level})
    logging.basicConfig(level=getattr(logging, config.log_level.upper(), logging.INFO))
    ctx.obj = config


def _open_store(config: AppConfig) -> ReviewStore:
    return ReviewStore(config.store_path)


@cli.command("import")
@click.argument("dump_path", type=click.Path(exists=True))
@click.pass_obj
def import_cmd(config: AppConfig, dump_path):
    """Validate and load a canonical dump file into the store."""
    data = Path(dump_path).read_bytes()
    dump = parse_review_dump(data)
    with _open_store(config) as store:
        counts = store.upsert_dump(dump)
    click.echo(json.dumps({"changes": len(dump.changes), **counts}))


@cli.command()
@click.option("--since", type=TIMESTAMP, default=None,
              help="ISO timestamp; default = stored high-water mark.")
@click.pass_obj
def mine(config: AppConfig, since):
    """Fetch changes from the configured endpoint and store them."""
    if config.miner is None:
        raise click.UsageError("no miner endpoint configured (set the 'miner' config key)")
    with _open_store(config) as store:
        if since is not None:
            since_ts = since
        else:
            state = store.miner_state(config.miner.base_url)
            since_ts = state["high_water_mark"] or datetime(1970, 1, 1, tzinfo=timezone.utc)
        result = mine_incremental(config.miner, since_ts)
        counts = store.upsert_dump(result.dump)
        store.set_miner_state(config.miner.base_url, high_water_mark=result.high_water_mark)
    click.echo(json.dumps({
        "changes": len(result.dump.changes),
        "high_water_mark": result.high_water_mark.strftime("%Y-%m-%dT%H:%M:%SZ"),
        **counts,
    }))


def _read_labels_csv(path) -> list[UsefulnessLabel]:
    labels = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            labels.append(UsefulnessLabel(
                comment_id=row["comment_id"],
                rater_id=row["rater_id"],
                is_useful=row["is_useful"].strip().lower() in ("1", "true", "yes"),
                category=CommentCategory(row["category"]),
                labeled_at=parse_timestamp(row["labeled_at"], "labeled_at"),
            ))
    return labels


@cli.command()
@click.option("--labels", "labels_path", type=click.Path(exists=True), required=True,
              help="Labels CSV (comment_id, rater_id, is_useful, category, labeled_at).")
@click.option("--algo", type=click.Choice(ALGO_CHOICES), default="rf")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--no-selection", is_flag=True, help="Skip the feature-selection stages.")
@click.pass_obj
def train(config: AppConfig, labels_path, algo, out_path, no_selection):
    """Train a usefulness classifier from stored reviews plus a label CSV."""
    labels = _read_labels_csv(labels_path)
    with _open_store(config) as store:
        dump = store.load_dump()
    if not dump.changes:
        raise RuntimeFailure("store holds no review data; run 'import' or 'mine' first")
    artifact, _ = pipeline.train_from_labels(
        dump, labels, DEFAULT_CONFIGS[algo], seed=config.seed,
        run_selection=not no_selection,
    )
    learn.save_model(artifact, out_path)
    click.echo(json.dumps({
        "algorithm": artifact.algorithm,
        "training_rows": artifact.metadata["n_training_rows"],
        "selected_features": len(artifact.selected_features),
        "out": str(out_path),
    }))


def _print_report_table(reports: dict[str, learn.EvaluationReport]):
    header = f"{'algorithm':<22}{'accuracy':>10}{'P(not)':>9}{'R(not)':>9}{'F1(not)':>9}{'P(useful)':>11}{'R(useful)':>11}{'F1(useful)':>11}"
    click.echo(header)
    for name, report in reports.items():
        s = report.summary()
        click.echo(
            f"{name:<22}{s['accuracy']:>10.4f}{s['precision_0']:>9.4f}{s['recall_0']:>9.4f}"
            f"{s['f1_0']:>9.4f}{s['precision_1']:>11.4f}{s['recall_1']:>11.4f}{s['f1_1']:>11.4f}"
        )


@cli.command()
@click.option("--labels", "labels_path", type=click.Path(exists=True), required=True)
@click.option("--algo", type=click.Choice(ALGO_CHOICES), default="rf")
@click.option("--repeats", type=int, default=20, show_default=True)
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--explain", is_flag=True,
              help="Run feature selection, print its audit log and feature importances.")
@click.option("--compare", "compare_spec", default=None,
              help="Comma-separated algorithms to evaluate on identical folds, e.g. dt,rf.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_obj
def evaluate(config: AppConfig, labels_path, algo, repeats, folds, explain, compare_spec, as_json):
    """Repeated stratified cross-validation over the labeled comments."""
    labels = _read_labels_csv(labels_path)
    with _open_store(config) as store:
        dump = store.load_dump()
    if not dump.changes:
        raise RuntimeFailure("store holds no review data; run 'import' or 'mine' first")
    verdicts = pipeline.latest_labels(labels)
    lexicons = None
    vectorizer = pipeline.build_vectorizer(dump)
    ids, matrix = pipeline.featurize(dump, vectorizer, lexicons, comment_ids=set(verdicts))
    import numpy as np

    y = np.array([int(verdicts[c]) for c in ids], np.int64)
    discretizer = features.fit_discretizer(matrix)
    binned = discretizer.apply_matrix(matrix)

    selected = features.ALL_FEATURES
    selection_obj = None
    if explain:
        stage1 = features.drop_correlated(binned, y)
        selection_obj = features.rfe_cv(
            binned, y, DEFAULT_CONFIGS[algo], folds=min(folds, int(np.bincount(y).min())),
            seed=config.seed, start_from=stage1,
        )
        selected = selection_obj.final_selected
    X = binned.stack(selected)
    n_scalars = binned.scalar_column_count(selected)
    distance_cols = np.arange(n_scalars)

    algos = [algo]
    if compare_spec:
        algos = [a.strip() for a in compare_spec.split(",") if a.strip()]
        for a in algos:
            if a not in DEFAULT_CONFIGS:
                raise click.UsageError(f"unknown algorithm {a!r} in --compare")
    reports = {}
    for a in algos:
        reports[a] = learn.cross_validate(
            X, y, DEFAULT_CONFIGS[a], repeats=repeats, folds=folds,
            seed=config.seed, distance_columns=distance_cols,
        )

    comparisons = []
    if len(algos) > 1:
        for i in range(len(algos)):
            for j in range(i + 1, len(algos)):
                a, b = algos[i], algos[j]
                for metric in ("accuracy", "f1_0", "f1_1"):
                    result = learn.compare(reports[a].scores(metric), reports[b].scores(metric))
                    comparisons.append({
                        "pair": f"{a} vs {b}",
                        "metric": metric,
                        "mean_delta": result.mean_delta,
                        "p_value": result.p_value,
                        "shapiro_p_a": result.shapiro_p_a,
                        "shapiro_p_b": result.shapiro_p_b,
                    })

    if as_json:
        payload = {
            "reports": {name: {"rows": len(r.rows), **r.summary()} for name, r in reports.items()},
            "comparisons": comparisons,
        }
        if selection_obj is not None:
            payload["selection"] = selection_obj.to_json_obj()
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return

    _print_report_table(reports)
    if comparisons:
        click.echo("")
        click.echo(f"{'pair':<14}{'metric':<12}{'delta':>10}{'p-value':>10}")
        for c in comparisons:
            click.echo(f"{c['pair']:<14}{c['metric']:<12}{c['mean_delta']:>10.4f}{c['p_value']:>10.4f}")
    if selection_obj is not None:
        click.echo("")
        click.echo(json.dumps(selection_obj.to_json_obj(), indent=2, sort_keys=True))


@cli.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--all-unpredicted", is_flag=True,
              help="Only comments without a stored prediction for this model.")
@click.pass_obj
def predict(config: AppConfig, model_path, all_unpredicted):
    """Predict usefulness for stored comments and persist the verdicts."""
    artifact_bytes = Path(model_path).read_bytes()
    artifact = learn.model_from_json(artifact_bytes)
    model_version = hashlib.sha256(artifact_bytes).hexdigest()[:12]
    with _open_store(config) as store:
        dump = store.load_dump()
        if not dump.changes:
            raise RuntimeFailure("store holds no review data")
        wanted = None
        if all_unpredicted:
            wanted = set(store.unpredicted_comment_ids(model_version))
            if not wanted:
                click.echo(json.dumps({"predicted": 0, "model_version": model_version}))
                return
        triples = pipeline.predict_comments(artifact, dump, comment_ids=wanted)
        now = datetime.now(timezone.utc)
        store.upsert_predictions([
            (cid, model_version, 1 if label == pipeline.USEFUL else 0, prob, now)
            for cid, label, prob in triples
        ])
    click.echo(json.dumps({"predicted": len(triples), "model_version": model_version}))


@cli.command()
@click.option("--from", "from_ts", type=TIMESTAMP, required=True,
              help="Period start (inclusive), ISO-8601.")
@click.option("--to", "to_ts", type=TIMESTAMP, required=True,
              help="Period end (exclusive), ISO-8601.")
@click.option("--key", type=click.Choice(metrics.RANK_KEYS), default="RI", show_default=True)
@click.option("--entity", type=click.Choice(("reviewer", "project")), default="reviewer",
              show_default=True)
@click.option("--csv", "as_csv", is_flag=True, help="Emit the metrics CSV instead of a table.")
@click.pass_obj
def rank(config: AppConfig, from_ts, to_ts, key, entity, as_csv):
    """Rank reviewers or projects over a period using stored verdicts."""
    if from_ts >= to_ts:
        raise click.UsageError("--from must be before --to")
    period = metrics.Period(from_ts, to_ts)
    with _open_store(config) as store:
        verdicts = store.verdicts()
        changes = store.changes()
    if entity == "reviewer":
        rows = metrics.reviewer_metrics(verdicts, changes, period)
    else:
        rows = metrics.project_metrics(verdicts, changes, period)
    rows = metrics.legacy_scores(rows)
    ranking = metrics.rank(rows, key)
    by_id = {r.developer_id: r for r in rows}
    ordered = [by_id[eid] for eid, _, _ in ranking.entries]
    if as_csv:
        click.echo(metrics.metrics_to_csv(ordered), nl=False)
        return
    click.echo(f"{'rank':<6}{'id':<24}{key:>12}{'NR':>6}{'NC':>6}{'UC':>6}{'CUD':>8}{'ID':>8}{'RE':>8}{'RI':>8}")
    for eid, value, position in ranking.entries:
        row = by_id[eid]
        click.echo(
            f"{position:<6}{eid:<24}{value:>12.4f}{row.NR:>6}{row.NC:>6}{row.UC:>6}"
            f"{row.CUD:>8.4f}{row.ID:>8.4f}{row.RE:>8.4f}{row.RI:>8}"
        )


@cli.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--frontend", "frontend_dir", type=click.Path(), default="frontend/dist",
              show_default=True, help="Static dashboard bundle to serve at /.")
@click.pass_obj
def serve(config: AppConfig, port, host, frontend_dir):
    """Run the HTTP API (and the dashboard bundle when present)."""
    import uvicorn

    from .api import create_app

    store = ReviewStore(config.store_path)
    app = create_app(store, config)
    frontend = Path(frontend_dir)
    if frontend.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend), html=True), name="dashboard")
    uvicorn.run(app, host=host, port=port, log_level=config.log_level.lower())


def main(argv=None) -> int:
    """Entry point mapping errors onto the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
