"""Batch entry point: ingest checks, overview export, synthetic generation,
and duration-trend reports.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import dataclasses
import sys
from datetime import date
from pathlib import Path
from typing import Optional

import click

from .ingest import IngestError, parse_event_log
from .layout import layout_to_json, render_svg
from .pipeline import OverviewParams, build_model, layout_from_model
from .synthetic import SpecError, generate_csv, load_spec
from .timestats import FilterSpec, ScaleKind, StatsConfig, WEEKDAY_LABELS
from .trend import trend_report
from . import pipeline

_SCALE_CHOICES = [k.value for k in ScaleKind]
_CYCLIC_CHOICES = [k.value for k in ScaleKind if k is not ScaleKind.ABSOLUTE]

_DAY_NAMES = {name.lower(): i for i, name in enumerate(WEEKDAY_LABELS)}


class DataError(click.ClickException):
    """Input data failed parsing or validation; exits with code 2."""

    exit_code = 2


def _parse_date(_ctx, param, value: Optional[str]) -> Optional[date]:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise click.BadParameter(f"{param.name} must be an ISO date") from None


def _parse_days(_ctx, _param, value: Optional[str]) -> Optional[frozenset[int]]:
    if value is None:
        return None
    days: set[int] = set()
    for token in value.split(","):
        token = token.strip()
        if token.lower() in _DAY_NAMES:
            days.add(_DAY_NAMES[token.lower()])
        elif token.isdigit() and 0 <= int(token) <= 6:
            days.add(int(token))
        else:
            raise click.BadParameter(f"bad weekday {token!r}; use Mon..Sun or 0..6")
    return frozenset(days)


def _filter_spec(date_from, date_to, days) -> FilterSpec:
    if date_from is not None and date_to is not None and date_from > date_to:
        raise click.BadParameter("--from must be <= --to")
    return FilterSpec(date_from=date_from, date_to=date_to, days_of_week=days)


def _load_log(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    try:
        return parse_event_log(text)
    except IngestError as exc:
        raise DataError(str(exc)) from None


@click.group()
def cli() -> None:
    """Sequential and time-pattern analytics for time-stamped event logs."""


@cli.command("ingest-check")
@click.argument("input", type=click.Path(dir_okay=False))
def ingest_check(input: str) -> None:
    """Parse and validate an event-log CSV, printing dataset counts."""
    log = _load_log(input)
    types = len(log.type_catalog)
    identifiers = len({r.identifier for r in log.records})
    click.echo(f"records:          {len(log.records)}")
    click.echo(f"event types:      {types}")
    click.echo(f"sequences:        {identifiers}")
    click.echo(
        "time extent:      "
        f"{log.time_extent[0].isoformat()} .. {log.time_extent[1].isoformat()}"
    )


@cli.command("overview")
@click.argument("input", type=click.Path(dir_okay=False))
@click.option("--coverage", type=float, default=pipeline.DEFAULT_COVERAGE,
              show_default=True, help="Cumulative frequency fraction to cover.")
@click.option("--min-freq", type=int, default=pipeline.DEFAULT_MIN_FREQUENCY,
              show_default=True, help="Drop selected rows rarer than this.")
@click.option("--align", multiple=True, metavar="EVENT_TYPE",
              help="Anchor event type; repeat for multiple alignment.")
@click.option("--from", "date_from", callback=_parse_date, default=None,
              metavar="DATE", help="Keep sequences starting on/after this date.")
@click.option("--to", "date_to", callback=_parse_date, default=None,
              metavar="DATE", help="Keep sequences starting on/before this date.")
@click.option("--days", callback=_parse_days, default=None, metavar="DAYS",
              help="Comma-separated weekdays (Mon..Sun or 0..6).")
@click.option("--axis", type=click.Choice(_SCALE_CHOICES), default="hour-of-day",
              show_default=True, help="Vertical time scale.")
@click.option("--color", type=click.Choice(_CYCLIC_CHOICES + ["none"]),
              default="day-of-week", show_default=True, help="Data-point color scale.")
@click.option("--k", type=float, default=1.5, show_default=True,
              help="Tukey fence multiplier.")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output file path.")
@click.option("--format", "fmt", type=click.Choice(["json", "svg"]), default="json",
              show_default=True, help="Output format.")
def overview(
    input: str,
    coverage: float,
    min_freq: int,
    align: tuple[str, ...],
    date_from: Optional[date],
    date_to: Optional[date],
    days: Optional[frozenset[int]],
    axis: str,
    color: str,
    k: float,
    out: str,
    fmt: str,
) -> None:
    """Compute the sequential-and-time-patterns overview and write it out."""
    if not 0 < coverage <= 1:
        raise click.BadParameter("--coverage must be in (0, 1]")
    if min_freq < 1:
        raise click.BadParameter("--min-freq must be >= 1")
    if k <= 0:
        raise click.BadParameter("--k must be > 0")
    log = _load_log(input)
    unknown = [a for a in align if a not in log.type_catalog]
    if unknown:
        raise DataError(f"anchor event types not in the log: {', '.join(unknown)}")
    params = OverviewParams(
        coverage=coverage,
        min_frequency=min_freq,
        anchors=tuple(align),
        filter=_filter_spec(date_from, date_to, days),
        axis=ScaleKind(axis),
        color=None if color == "none" else ScaleKind(color),
        stats=StatsConfig(k=k),
    )
    model = build_model(log, params)
    layout = layout_from_model(model, params)
    if fmt == "svg":
        Path(out).write_text(render_svg(layout), encoding="utf-8")
    else:
        Path(out).write_text(layout_to_json(layout), encoding="utf-8")
    totals = model.totals
    click.echo(f"event types:      {totals['n_event_types']}")
    click.echo(f"sequences:        {totals['n_sequences']}")
    click.echo(f"unique sequences: {totals['n_unique_sequences']}")
    click.echo(f"selected rows:    {totals['n_selected']}")
    click.echo(f"coverage:         {totals['coverage_ratio']:.3f}")
    click.echo(f"wrote {fmt} to {out}")


@cli.command("generate")
@click.argument("spec", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output CSV path.")
@click.option("--seed", type=int, default=None,
              help="Override the spec file's seed.")
def generate(spec: str, out: str, seed: Optional[int]) -> None:
    """Generate a synthetic event log with planted patterns."""
    try:
        synthetic_spec = load_spec(spec)
    except (SpecError, OSError) as exc:
        raise DataError(str(exc)) from None
    if seed is not None:
        synthetic_spec = dataclasses.replace(synthetic_spec, seed=seed)
    csv_text = generate_csv(synthetic_spec)
    Path(out).write_text(csv_text, encoding="utf-8")
    sequences = sum(t.frequency for t in synthetic_spec.templates)
    click.echo(f"wrote {sequences} sequences ({len(csv_text.splitlines()) - 1} events) to {out}")


@cli.command("trend")
@click.argument("input", type=click.Path(dir_okay=False))
@click.option("--event", multiple=True, metavar="EVENT_TYPE",
              help="Event type to report; repeat for several, omit for all.")
@click.option("--axis", type=click.Choice(_SCALE_CHOICES), default="hour-of-day",
              show_default=True, help="Occurrence scale the trend is measured on.")
@click.option("--from", "date_from", callback=_parse_date, default=None, metavar="DATE")
@click.option("--to", "date_to", callback=_parse_date, default=None, metavar="DATE")
@click.option("--days", callback=_parse_days, default=None, metavar="DAYS")
def trend(
    input: str,
    event: tuple[str, ...],
    axis: str,
    date_from: Optional[date],
    date_to: Optional[date],
    days: Optional[frozenset[int]],
) -> None:
    """Report Spearman correlation of duration against time of occurrence."""
    log = _load_log(input)
    filter_spec = _filter_spec(date_from, date_to, days)
    sequences_extent = log.time_extent
    scale = pipeline.resolve_scale(ScaleKind(axis), sequences_extent)
    try:
        entries = trend_report(
            log, scale, event_types=list(event) or None, filter_spec=filter_spec
        )
    except ValueError as exc:
        raise DataError(str(exc)) from None
    for entry in entries:
        click.echo(
            f"{entry.event_type}\tn={entry.n}\tspearman={entry.correlation:+.4f}"
        )


def main(argv: Optional[list[str]] = None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except DataError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
