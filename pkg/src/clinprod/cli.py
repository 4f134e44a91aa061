"""Command-line entry points.

Commands are thin wrappers over the pipeline; with --machine they print
the exact bytes the HTTP API would return for the same request.
"""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import serialize
from .analytics import AnalyticsError, pre_post_report
from .api import ServiceConfig, build_pipeline, create_app, load_service_config
from .domain import DomainError, parse_month, round_half_up
from .engine import EngineConfig
from .pipeline import Pipeline, ProposedService
from .rules import ParseError, SemanticError, parse_rules
from .billing import parse_payers
from .store import KINDS, Store, StoreError


class CliError(click.ClickException):
    exit_code = 2


def _config_from_opts(ctx) -> ServiceConfig:
    opts = ctx.obj
    if opts["store"] is None:
        raise CliError("--store is required (or set CLINPROD_STORE)")
    return ServiceConfig(
        store_path=Path(opts["store"]),
        rules_path=Path(opts["rules"]) if opts["rules"] else None,
        payers_path=Path(opts["payers"]) if opts["payers"] else None,
        engine=EngineConfig(),
    )


def _pipeline(ctx) -> tuple[Store, Pipeline]:
    config = _config_from_opts(ctx)
    try:
        return Store(config.store_path), build_pipeline(config)
    except (ParseError, SemanticError) as err:
        raise CliError(f"config error: {err}")


def _emit(ctx, doc: dict, human: str) -> None:
    if ctx.obj["machine"]:
        click.echo(serialize.dumps(doc), nl=False)
    else:
        click.echo(human)


@click.group()
@click.option("--store", envvar="CLINPROD_STORE", default=None,
              help="Store directory path.")
@click.option("--rules", envvar="CLINPROD_RULES", default=None,
              help="Modifier rules config file.")
@click.option("--payers", envvar="CLINPROD_PAYERS", default=None,
              help="Payer rules config file.")
@click.option("--machine", is_flag=True, envvar="CLINPROD_MACHINE",
              help="Emit machine-readable JSON identical to the API body.")
@click.pass_context
def main(ctx, store, rules, payers, machine):
    """Clinical productivity engine."""
    ctx.obj = {"store": store, "rules": rules, "payers": payers,
               "machine": machine}


@main.command()
@click.argument("kind", type=click.Choice(KINDS))
@click.argument("source", type=click.Path(exists=True))
@click.pass_context
def ingest(ctx, kind, source):
    """Ingest a CSV file of records."""
    store, _ = _pipeline(ctx)
    try:
        report = store.ingest(kind, source)
    except StoreError as err:
        raise CliError(str(err))
    human = (f"{report.source}: accepted {report.accepted}, "
             f"rejected {report.rejected}")
    for line_no, reason in report.rejections:
        human += f"\n  line {line_no}: {reason}"
    _emit(ctx, serialize.ingest_report_doc(report), human)


@main.command()
@click.option("--staff", required=True)
@click.option("--month", required=True)
@click.pass_context
def statement(ctx, staff, month):
    """Monthly statement for one staff member."""
    store, pipeline = _pipeline(ctx)
    try:
        parse_month(month)
        result = pipeline.statement(store.snapshot(), staff, month)
    except (ValueError, DomainError) as err:
        raise CliError(str(err))
    lines = [f"Statement {staff} {month}",
             f"  credit {round_half_up(result.vpu_final_total)} "
             f"of target {round_half_up(result.target)} "
             f"({round_half_up(result.productivity_percentage * 100)}%)"]
    for line in result.lines:
        lines.append(f"  {line.service_id}: base {round_half_up(line.vpu_base)} "
                     f"x {round_half_up(line.modifier_factor)}"
                     + (f" x slicer {round_half_up(line.slicer)}"
                        if line.slicer is not None else "")
                     + f" = {round_half_up(line.vpu_final)}")
    for flag in result.flags:
        lines.append(f"  ! {flag}")
    _emit(ctx, serialize.statement_doc(result), "\n".join(lines))


@main.command()
@click.option("--staff", required=True)
@click.option("--date", "date_text", required=True)
@click.pass_context
def feedback(ctx, staff, date_text):
    """Daily feedback view for one staff member."""
    store, pipeline = _pipeline(ctx)
    try:
        as_of = dt.date.fromisoformat(date_text)
        view = pipeline.feedback(store.snapshot(), staff, as_of)
    except (ValueError, DomainError) as err:
        raise CliError(str(err))
    human = (f"Feedback {staff} as of {as_of.isoformat()}\n"
             f"  month-to-date {round_half_up(view.month_to_date_vpu)} "
             f"of {round_half_up(view.target)} "
             f"(pace {round_half_up(view.pace * 100)}%, "
             f"productivity {round_half_up(view.productivity_percentage * 100)}%)")
    for flag in view.flags:
        human += f"\n  ! {flag}"
    _emit(ctx, serialize.feedback_doc(view), human)


@main.command()
@click.option("--staff", required=True)
@click.option("--month", required=True)
@click.option("--proposed", "proposed_path", type=click.Path(exists=True),
              default=None, help="JSON file with a list of proposed services.")
@click.pass_context
def whatif(ctx, staff, month, proposed_path):
    """Project the month as if proposed services were delivered."""
    store, pipeline = _pipeline(ctx)
    proposed = []
    if proposed_path:
        from .api import _proposed_from_doc
        docs = json.loads(Path(proposed_path).read_text(encoding="utf-8"))
        try:
            proposed = [_proposed_from_doc(d) for d in docs]
        except (KeyError, ValueError, TypeError) as err:
            raise CliError(f"bad proposed services file: {err}")
    try:
        parse_month(month)
        projection = pipeline.whatif(store.snapshot(), staff, month, proposed)
    except (ValueError, DomainError) as err:
        raise CliError(str(err))
    st = projection.statement
    human = (f"Projection {staff} {month}: "
             f"{round_half_up(st.vpu_final_total)} of {round_half_up(st.target)} "
             f"({round_half_up(st.productivity_percentage * 100)}%)")
    for warning in projection.warnings:
        human += f"\n  ! {warning}"
    _emit(ctx, serialize.projection_doc(projection), human)


@main.command()
@click.option("--metric", required=True,
              type=click.Choice(["revenue", "vpu", "productivity"]))
@click.option("--baseline", required=True)
@click.option("--compare", required=True)
@click.option("--out", type=click.Path(), default=None,
              help="Also write the report as a CSV file.")
@click.pass_context
def report(ctx, metric, baseline, compare, out):
    """Pre/post comparison of a per-staff metric between two months."""
    store, pipeline = _pipeline(ctx)
    try:
        parse_month(baseline)
        parse_month(compare)
        series = pipeline.metric_series(store.snapshot(), metric,
                                        [baseline, compare])
        result = pre_post_report(series, baseline, compare, metric=metric)
    except (ValueError, AnalyticsError, DomainError) as err:
        raise CliError(str(err))
    if out:
        doc = serialize.prepost_doc(result)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(",".join(doc.keys()) + "\n")
            fh.write(",".join(
                json.dumps(v) if isinstance(v, list) else str(v)
                for v in doc.values()) + "\n")
    human = (f"{metric}: {baseline} mean {round_half_up(result.baseline_mean)} "
             f"-> {compare} mean {round_half_up(result.compare_mean)} "
             f"({round_half_up(result.pct_change_of_means)}% change of means), "
             f"t({result.test.df}) = {round_half_up(result.test.t, 3)}, "
             f"p = {result.test.p_two_sided:.4g}, n = {result.n_matched}")
    _emit(ctx, serialize.prepost_doc(result), human)


@main.command("validate-config")
@click.pass_context
def validate_config(ctx):
    """Check the modifier and payer rule files; nonzero exit on errors."""
    opts = ctx.obj
    problems = []
    if opts["rules"]:
        try:
            ruleset = parse_rules(Path(opts["rules"]).read_text(encoding="utf-8"))
            click.echo(f"rules: ok ({len(ruleset.rules)} rules)")
        except (ParseError, SemanticError) as err:
            problems.append(f"rules: {err}")
    if opts["payers"]:
        try:
            payers = parse_payers(Path(opts["payers"]).read_text(encoding="utf-8"))
            click.echo(f"payers: ok ({len(payers)} payers)")
        except (ParseError, SemanticError) as err:
            problems.append(f"payers: {err}")
    if not opts["rules"] and not opts["payers"]:
        click.echo("nothing to validate: pass --rules and/or --payers")
    for problem in problems:
        click.echo(problem, err=True)
    if problems:
        sys.exit(2)


@main.command()
@click.option("--listen", default=None, help="host:port to bind.")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="Service config file (key = value).")
@click.option("--token", envvar="CLINPROD_TOKEN", default=None,
              help="Bearer token required on mutation endpoints.")
@click.pass_context
def serve(ctx, listen, config_path, token):
    """Run the HTTP API."""
    import uvicorn

    if config_path:
        config = load_service_config(Path(config_path))
    else:
        config = _config_from_opts(ctx)
    if token:
        config.token = token
    if listen:
        config.listen = listen
    host, _, port = config.listen.partition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8700))


if __name__ == "__main__":
    main()
