"""Command line entry points: ingest, discover, summarize, serve.

Exit codes: 0 success, 1 validation or ingest failure, 2 I/O failure.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from sqlscope.dataset_io import load_dataset, save_dataset
from sqlscope.errors import ConfigError, IngestError, SchemaError, SqlscopeError
from sqlscope.jobs import JobSpec, run_job
from sqlscope.sql.workload import ingest_workload


@click.group()
@click.version_option()
def main():
    """Subgroup discovery over SQL workloads."""


@main.command()
@click.argument("workload", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Dataset CSV to write (schema sidecar goes next to it).")
@click.option("--strict", is_flag=True, help="Fail on the first malformed line.")
@click.option("--id-key", default="id", show_default=True, help="JSONL key holding the query id.")
def ingest(workload, out, strict, id_key):
    """Parse a JSONL workload into a dataset CSV + schema sidecar."""
    try:
        result = ingest_workload(workload, id_key=id_key, strict=strict)
    except IngestError as exc:
        click.echo(f"ingest failed: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"cannot read workload: {exc}", err=True)
        sys.exit(2)
    try:
        save_dataset(result.table, out)
    except (OSError, SchemaError) as exc:
        click.echo(f"cannot write dataset: {exc}", err=True)
        sys.exit(2)
    click.echo(f"ingested {result.table.row_count} rows ({len(result.skipped)} skipped)")
    for line_no, reason in result.skipped:
        click.echo(f"  skipped line {line_no}: {reason}", err=True)


def _load_job_inputs(dataset, config_path, mode):
    try:
        table = load_dataset(dataset)
    except (OSError, SchemaError) as exc:
        click.echo(f"cannot load dataset: {exc}", err=True)
        sys.exit(2)
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        click.echo(f"cannot read config: {exc}", err=True)
        sys.exit(2)
    except json.JSONDecodeError as exc:
        click.echo(f"config is not valid JSON: {exc}", err=True)
        sys.exit(1)
    raw.setdefault("mode", mode)
    raw.setdefault("dataset_id", Path(dataset).stem)
    try:
        spec = JobSpec.from_json(raw)
    except (ConfigError, SqlscopeError, KeyError, TypeError, ValueError) as exc:
        click.echo(f"bad config: {exc}", err=True)
        sys.exit(1)
    return table, spec


def _run_and_write(table, spec, out):
    try:
        payload = run_job(spec, table)
    except ConfigError as exc:
        click.echo("invalid job config:", err=True)
        for message in exc.messages:
            click.echo(f"  - {message}", err=True)
        sys.exit(1)
    try:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    except OSError as exc:
        click.echo(f"cannot write result: {exc}", err=True)
        sys.exit(2)
    return payload


@main.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def discover(dataset, config_path, out):
    """Run subgroup discovery; writes a ResultSet JSON."""
    table, spec = _load_job_inputs(dataset, config_path, "discover")
    payload = _run_and_write(table, spec, out)
    n = len(payload["subgroups"])
    click.echo(f"found {n} subgroups (explored {payload['nodes_explored']} candidates)")
    if n == 0:
        click.echo("warning: empty result; consider relaxing min_support or exclusions", err=True)
    else:
        top = payload["subgroups"][0]
        description = " and ".join(top["selectors"]) or "<all rows>"
        click.echo(f"top: {description} (quality {top['quality']:.6g}, size {top['size']})")


@main.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def summarize(dataset, config_path, out):
    """Build a rule-list summary; writes JSON plus a text report next to it."""
    table, spec = _load_job_inputs(dataset, config_path, "summarize")
    payload = _run_and_write(table, spec, out)
    report_lines = [f"rule {i}: if {' and '.join(r['selectors']) or '<all rows>'} -> {r['surrogate']} "
                    f"[covers {r['covered_count']}, fidelity {r['fidelity']:.4f}]"
                    for i, r in enumerate(payload["rules"])]
    report_lines.append(
        f"default: {payload['default']} [covers {payload['default_count']}, "
        f"fidelity {payload['default_fidelity']:.4f}]"
    )
    report_lines.append(f"global fidelity: {payload['global_fidelity']:.4f}")
    report = "\n".join(report_lines)
    report_path = Path(out).with_suffix(".txt") if Path(out).suffix == ".json" else Path(str(out) + ".txt")
    try:
        report_path.write_text(report + "\n", encoding="utf-8")
    except OSError as exc:
        click.echo(f"cannot write report: {exc}", err=True)
        sys.exit(2)
    click.echo(report)


@main.command()
@click.option("--state-dir", default=None, type=click.Path(file_okay=False), help="Defaults to $SQLSCOPE_STATE_DIR or ./sqlscope-state.")
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="addr:port to listen on.")
def serve(state_dir, bind):
    """Run the HTTP job service."""
    import uvicorn

    from sqlscope.service import create_app

    state = state_dir or os.environ.get("SQLSCOPE_STATE_DIR") or "sqlscope-state"
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        click.echo(f"bad --bind value {bind!r}, expected addr:port", err=True)
        sys.exit(1)
    app = create_app(Path(state))
    uvicorn.run(app, host=host, port=int(port))


if __name__ == "__main__":
    main()
