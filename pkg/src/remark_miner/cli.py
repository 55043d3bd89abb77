"""Command-line pipeline: extract, trace, szz-compare, features, evaluate,
baseline, export-labels, mine, serve.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .dataset_io import load_dataset, persist_dataset
from .model import DataError


@click.group()
def cli():
    """Mine repository history for review-remark triggers and skip rules."""


@cli.command()
@click.option("--repo", required=True, type=click.Path())
@click.option("--ticket-log", required=True, type=click.Path())
@click.option("--ticket-pattern", required=True)
@click.option("--out", required=True, type=click.Path())
def extract(repo, ticket_log, ticket_pattern, out):
    """Scan a repository and ticket log into a dataset file."""
    from .ingest import (
        assemble_dataset,
        extract_old_contents_from_git,
        ingest_ticket_log,
        scan_repository,
    )

    scan = scan_repository(repo, ticket_pattern)
    events = ingest_ticket_log(ticket_log)
    dataset = assemble_dataset(
        scan.commits,
        events,
        repo_path=os.path.abspath(repo),
        skipped_commits=scan.skipped_commits,
        enrich_old_content=extract_old_contents_from_git(
            repo, [c.commit_id for c in scan.commits]
        ),
    )
    persist_dataset(dataset, out)
    click.echo(
        json.dumps(
            {
                "tickets": len(dataset.tickets),
                "excluded_tickets": len(dataset.excluded_tickets),
                "commits": len(dataset.commit_order),
                "commits_without_ticket": scan.skipped_commits,
                "records": sum(len(t.records) for t in dataset.tickets.values()),
                "remarks": sum(len(t.remarks) for t in dataset.tickets.values()),
            },
            sort_keys=True,
        )
    )


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--exclude-tickets", "exclude_file", type=click.Path(), default=None)
def trace(dataset_path, out, exclude_file):
    """Trace every remark to its potential triggers."""
    from .remarks import clean_dataset
    from .tracing import trace_dataset

    dataset = load_dataset(dataset_path)
    if exclude_file:
        exclusions = []
        with open(exclude_file, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    ticket_id, _, reason = line.strip().partition(" ")
                    exclusions.append((ticket_id, reason or "listed for exclusion"))
        clean_dataset(dataset, exclusions)
    outcomes = trace_dataset(dataset)
    persist_dataset(dataset, out)
    stats: dict[str, int] = {}
    errors = 0
    for outcome in outcomes.values():
        errors += len(outcome.errors)
        for scope, count in outcome.statistics.items():
            stats[scope] = stats.get(scope, 0) + count
    click.echo(json.dumps({"terminal_scopes": stats, "errors": errors}, sort_keys=True))


@cli.command("szz-compare")
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--ext", default="java", show_default=True)
@click.option("--per-raw-part", is_flag=True, default=False)
def szz_compare(dataset_path, out, ext, per_raw_part):
    """Classify agreement between scope-expanding tracing and plain blame."""
    from .szz import format_report, run_comparison, summarize

    dataset = load_dataset(dataset_path)
    if not any(t.trigger_links for t in dataset.tickets.values()):
        raise DataError("dataset has no trigger links; run `trace` first")
    rows = run_comparison(dataset, per_raw_part=per_raw_part)
    report = summarize(rows, extension=ext)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(format_report(report))


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--ngram-order", default=3, show_default=True, type=int)
@click.option("--lambda", "interpolation", default=0.5, show_default=True, type=float)
def features(dataset_path, out, ngram_order, interpolation):
    """Compute the full feature catalog for every change part."""
    from .features import extract_features

    dataset = load_dataset(dataset_path)
    if not any(t.trigger_links for t in dataset.tickets.values()):
        if any(t.remarks for t in dataset.tickets.values()):
            raise DataError("dataset has no trigger links; run `trace` first")
    extract_features(dataset, ngram_order=ngram_order, interpolation=interpolation)
    persist_dataset(dataset, out)
    click.echo(
        json.dumps(
            {
                "records": sum(len(t.records) for t in dataset.tickets.values()),
                "ngram_order": ngram_order,
                "lambda": interpolation,
            },
            sort_keys=True,
        )
    )


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--ruleset", "ruleset_file", required=True, type=click.Path())
@click.option("--java-ext", default="java", show_default=True)
@click.option("--cost-factors", default="10,100,1000", show_default=True)
def evaluate(dataset_path, ruleset_file, java_ext, cost_factors):
    """Evaluate a ruleset file against a traced, featured dataset."""
    from .objectives import EvaluationIndex, break_even, cost
    from .rules import parse_ruleset

    dataset = load_dataset(dataset_path)
    try:
        with open(ruleset_file, encoding="utf-8") as fh:
            ruleset = parse_ruleset(fh.read())
    except OSError as exc:
        raise DataError(f"cannot read ruleset {ruleset_file}: {exc}") from exc
    index = EvaluationIndex(dataset, java_extension=java_ext)
    vector = index.evaluate(ruleset)
    tickets = max(index.ticket_count, 1)
    factors = [float(f) for f in cost_factors.split(",") if f]
    payload = {
        "objectives": vector.as_dict(),
        "break_even": {
            k: (v if v != float("inf") else None)
            for k, v in break_even(vector, tickets).items()
        },
        "costs": {str(f): cost(vector, f, tickets) for f in factors},
    }
    click.echo(json.dumps(payload, sort_keys=True))


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--share", required=True, type=float)
@click.option("--seeds", default=100, show_default=True, type=int)
def baseline(dataset_path, share, seeds):
    """Average objectives of randomly skipping a share of records per ticket."""
    from .objectives import EvaluationIndex, baseline_random

    if not 0 <= share <= 1:
        raise click.UsageError("--share must be within [0, 1]")
    index = EvaluationIndex(load_dataset(dataset_path))
    vector = baseline_random(index, share, seeds)
    click.echo(json.dumps({"share": share, "objectives": vector.as_dict()}, sort_keys=True))


@cli.command("export-labels")
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
def export_labels_cmd(dataset_path, out):
    """Write conservative must-review/no-trigger labels as CSV."""
    from .objectives import export_labels

    rows = export_labels(load_dataset(dataset_path), out)
    click.echo(json.dumps({"rows": rows, "out": str(out)}))


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--iterations", default=50, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path())
def mine(dataset_path, seed, iterations, out):
    """Run the mining loop headless and export the Pareto archive."""
    from .mining import MiningConfig, MiningEngine
    from .rules import print_ruleset

    dataset = load_dataset(dataset_path)
    engine = MiningEngine(dataset, MiningConfig(seed=seed))
    engine.run(iterations)
    lines = [
        json.dumps(
            {
                "kind": "header",
                "seed": seed,
                "iterations": iterations,
                "generation": engine.generation,
                "entries": len(engine.archive.entries),
            },
            sort_keys=True,
        )
    ]
    ordered = sorted(
        engine.archive.entries,
        key=lambda e: (e.vector.complexity, e.vector.feature_count, int(e.rid.split("-")[1])),
    )
    for entry in ordered:
        lines.append(
            json.dumps(
                {
                    "ruleset_id": entry.rid,
                    "objectives": entry.vector.as_dict(),
                    "ruleset": print_ruleset(entry.ruleset),
                },
                sort_keys=True,
            )
        )
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    click.echo(json.dumps({"entries": len(engine.archive.entries)}))


@cli.command()
@click.option("--port", default=None, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--dataset", "dataset_path", default=None, type=click.Path())
def serve(port, host, dataset_path):
    """Start the HTTP session service."""
    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get("REMARK_MINER_PORT", "8327"))
    data_dir = os.environ.get("REMARK_MINER_DATA_DIR")
    if dataset_path is None and data_dir:
        dataset_path = os.path.join(data_dir, "dataset.jsonl")
    app = create_app()
    if dataset_path and os.path.exists(dataset_path):
        click.echo(f"dataset available at {dataset_path}; create a session via POST /session")
    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
