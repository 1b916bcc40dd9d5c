"""Command-line front end: check, eval, gen, fmt.

Exit codes: 0 ok, 1 semantic errors, 2 parse/IO/schema errors,
3 unsatisfied requirement (only with --fail-unsatisfied), 4 formatting
diff (only with fmt --check).
"""

from __future__ import annotations

import difflib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .codegen import GenError, generate_with_manifest
from .config import Config, ConfigError, load_config
from .diagnostics import Diagnostic
from .engine import (
    DetectionSnapshot,
    SchemaError,
    UnknownRequirementError,
    evaluate,
    evaluate_all,
)
from .formatter import format_spec
from .model import Specification
from .parser import parse_source
from .validator import validate

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_PARSE_IO = 2
EXIT_UNSATISFIED = 3
EXIT_FORMAT_DIFF = 4


@click.group()
@click.option("--json", "as_json", is_flag=True, help="Machine-readable JSON output.")
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="Config file with extra modalities and plausibility overrides.",
)
@click.option(
    "--modalities",
    default=None,
    help="Comma-separated extra modality names (overrides the config file).",
)
@click.version_option()
@click.pass_context
def main(ctx: click.Context, as_json: bool, config_path: str | None, modalities: str | None):
    """Work with MERLAN multimodal-requirement specifications."""
    ctx.ensure_object(dict)
    ctx.obj["json"] = as_json
    try:
        config = load_config(config_path) if config_path else Config()
    except (OSError, ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_PARSE_IO)
    if modalities is not None:
        extra = frozenset(m.strip().lower() for m in modalities.split(",") if m.strip())
        config = Config(extra, config.plausibility)
    ctx.obj["config"] = config


def _read_source(ctx: click.Context, path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        ctx.exit(EXIT_PARSE_IO)
        raise AssertionError("unreachable")


def _print_diagnostics(
    ctx: click.Context, path: str, diagnostics: tuple[Diagnostic, ...], ok: bool
) -> None:
    if ctx.obj["json"]:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "file": path,
            "ok": ok,
            "diagnostics": [d.to_json_dict() for d in diagnostics],
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        for d in diagnostics:
            click.echo(f"{path}:{d.render()}")


def _load_spec(ctx: click.Context, path: str) -> Specification:
    """Parse and validate or exit with the appropriate code."""
    source = _read_source(ctx, path)
    result = parse_source(source)
    if result.spec is None:
        _print_diagnostics(ctx, path, result.diagnostics, ok=False)
        ctx.exit(EXIT_PARSE_IO)
    report = validate(result.spec, ctx.obj["config"])
    if not report.ok:
        _print_diagnostics(ctx, path, result.diagnostics + report.diagnostics, ok=False)
        ctx.exit(EXIT_SEMANTIC)
    return result.spec


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.pass_context
def check(ctx: click.Context, path: str):
    """Parse and validate a specification file."""
    source = _read_source(ctx, path)
    result = parse_source(source)
    if result.spec is None:
        _print_diagnostics(ctx, path, result.diagnostics, ok=False)
        ctx.exit(EXIT_PARSE_IO)
    report = validate(result.spec, ctx.obj["config"])
    _print_diagnostics(ctx, path, result.diagnostics + report.diagnostics, ok=report.ok)
    ctx.exit(EXIT_OK if report.ok else EXIT_SEMANTIC)


@main.command("eval")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@click.argument("snapshot_paths", type=click.Path(dir_okay=False), nargs=-1, required=True)
@click.option("--requirement", "req_name", default=None, help="Evaluate only this requirement.")
@click.option("--trace", is_flag=True, help="Include the full explanation tree.")
@click.option(
    "--fail-unsatisfied",
    is_flag=True,
    help="Exit 3 when any evaluated requirement is unsatisfied.",
)
@click.option("--jobs", type=int, default=1, help="Evaluate snapshot files in parallel.")
@click.pass_context
def eval_cmd(
    ctx: click.Context,
    spec_path: str,
    snapshot_paths: tuple[str, ...],
    req_name: str | None,
    trace: bool,
    fail_unsatisfied: bool,
    jobs: int,
):
    """Evaluate requirements against detection snapshot files."""
    spec = _load_spec(ctx, spec_path)

    snapshots: list[DetectionSnapshot] = []
    for path in snapshot_paths:
        text = _read_source(ctx, path)
        try:
            snapshots.append(DetectionSnapshot.from_json(text))
        except SchemaError as exc:
            click.echo(f"error: {path}: {exc}", err=True)
            ctx.exit(EXIT_PARSE_IO)

    def run(snapshot: DetectionSnapshot) -> dict:
        if req_name is not None:
            return {req_name: evaluate(spec, req_name, snapshot)}
        return evaluate_all(spec, snapshot)

    try:
        if jobs > 1 and len(snapshots) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                all_results = list(pool.map(run, snapshots))
        else:
            all_results = [run(s) for s in snapshots]
    except UnknownRequirementError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_PARSE_IO)

    rendered = [
        {
            name: res.to_json_dict(include_trace=trace)
            for name, res in results.items()
        }
        for results in all_results
    ]
    if len(snapshot_paths) == 1:
        body: object = rendered[0]
    else:
        body = [
            {"snapshot": path, "results": r}
            for path, r in zip(snapshot_paths, rendered)
        ]
    if ctx.obj["json"]:
        click.echo(json.dumps({"schema_version": SCHEMA_VERSION, "results": body}, indent=2))
    else:
        click.echo(json.dumps(body, indent=2))

    if fail_unsatisfied and any(
        not res.satisfied for results in all_results for res in results.values()
    ):
        ctx.exit(EXIT_UNSATISFIED)
    ctx.exit(EXIT_OK)


@main.command()
@click.argument("spec_path", type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@click.option("--manifest", "manifest_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def gen(ctx: click.Context, spec_path: str, out_path: str | None, manifest_path: str | None):
    """Generate agent trigger-condition code from a specification."""
    spec = _load_spec(ctx, spec_path)
    try:
        code, manifest = generate_with_manifest(spec, ctx.obj["config"])
    except GenError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_SEMANTIC)
        raise AssertionError("unreachable")
    if out_path:
        Path(out_path).write_text(code, encoding="utf-8")
    else:
        click.echo(code, nl=False)
    if manifest_path:
        manifest_out = {"schema_version": SCHEMA_VERSION, **manifest}
        Path(manifest_path).write_text(
            json.dumps(manifest_out, indent=2) + "\n", encoding="utf-8"
        )
    ctx.exit(EXIT_OK)


@main.command()
@click.argument("spec_path", type=click.Path(dir_okay=False))
@click.option("--check", "check_only", is_flag=True, help="Diff instead of rewriting.")
@click.option("--stdout", "to_stdout", is_flag=True, help="Print instead of rewriting.")
@click.pass_context
def fmt(ctx: click.Context, spec_path: str, check_only: bool, to_stdout: bool):
    """Rewrite a specification file in canonical formatting."""
    source = _read_source(ctx, spec_path)
    result = parse_source(source)
    if result.spec is None:
        _print_diagnostics(ctx, spec_path, result.diagnostics, ok=False)
        ctx.exit(EXIT_PARSE_IO)
    formatted = format_spec(result.spec)
    if check_only:
        if formatted == source:
            ctx.exit(EXIT_OK)
        diff = difflib.unified_diff(
            source.splitlines(keepends=True),
            formatted.splitlines(keepends=True),
            fromfile=spec_path,
            tofile=f"{spec_path} (formatted)",
        )
        click.echo("".join(diff), nl=False)
        ctx.exit(EXIT_FORMAT_DIFF)
    if to_stdout:
        click.echo(formatted, nl=False)
    else:
        Path(spec_path).write_text(formatted, encoding="utf-8")
    ctx.exit(EXIT_OK)


if __name__ == "__main__":
    main(prog_name="merlan")
