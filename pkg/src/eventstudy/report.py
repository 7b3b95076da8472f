"""Run orchestration and report rendering.

One run walks the event registry in file order, judges each event over the
five standard windows, and writes a single report.  Events fail
independently: a missing price file or thin history for one event is
logged and recorded, and the run moves on.  If anything failed, the report
is written with a ``.partial`` suffix so downstream consumers can never
mistake an incomplete report for a complete one.

Report bytes are a pure function of inputs and configuration — timing and
throughput live in logs and in the returned :class:`RunOutcome`, never in
the report itself — so re-running a study is expected to reproduce the
file bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .bootstrap import ScenarioDistribution
from .config import RunConfig
from .errors import ConfigError, DataFormatError, EventStudyError
from .inference import EventResult, classify_impact, run_event_study
from .ingest import load_event_registry, load_price_series

__all__ = [
    "REPORT_COLUMNS",
    "ReportRow",
    "RunOutcome",
    "run",
    "render_csv",
    "render_json",
    "emit_histogram",
    "verify_decision_fixture",
]

logger = logging.getLogger(__name__)

#: Column order of every report, CSV and JSON alike.
REPORT_COLUMNS = (
    "company",
    "event_period",
    "car",
    "car_percentile",
    "impact",
    "car_additive",
    "instrument_id",
    "announcement_date",
    "seed",
    "mode",
    "n_scenarios",
    "estimation_days",
    "generator",
    "flags",
)


@dataclass(frozen=True)
class ReportRow:
    """One (event, window) line of the report, ready to render."""

    company: str
    event_period: str
    car: float
    car_percentile: float
    impact: str
    car_additive: float
    instrument_id: str
    announcement_date: str
    seed: int
    mode: str
    n_scenarios: int
    estimation_days: int
    generator: str
    flags: str

    @classmethod
    def from_result(cls, result: EventResult) -> ReportRow:
        event = result.event
        prov = result.provenance
        return cls(
            company=event.label or event.instrument_id,
            event_period=result.window.label,
            car=result.car,
            car_percentile=result.percentile,
            impact=result.impact.value,
            car_additive=result.car_additive,
            instrument_id=event.instrument_id,
            announcement_date=event.announcement_date.isoformat(),
            seed=prov.seed,
            mode=prov.mode,
            n_scenarios=prov.n_scenarios,
            estimation_days=prov.estimation_days,
            generator=prov.generator,
            flags=";".join(prov.flags),
        )


def _formatted(row: ReportRow) -> dict[str, str]:
    values = asdict(row)
    values["car"] = f"{row.car:.9f}"
    values["car_percentile"] = f"{row.car_percentile:.5f}"
    values["car_additive"] = f"{row.car_additive:.9f}"
    return {key: str(values[key]) for key in REPORT_COLUMNS}


def render_csv(rows: list[ReportRow]) -> str:
    """Render rows as CSV: CARs to 9 decimals, percentiles to 5."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(_formatted(row))
    return buffer.getvalue()


def render_json(rows: list[ReportRow]) -> str:
    """Render rows as JSON, keeping floats at full precision."""
    payload = {"rows": [{key: asdict(row)[key] for key in REPORT_COLUMNS} for row in rows]}
    return json.dumps(payload, indent=2) + "\n"


@dataclass
class RunOutcome:
    """What a run produced, for callers and exit-code decisions."""

    rows: list[ReportRow]
    errors: list[tuple[str, str]]
    report_path: Path
    wrote_partial: bool
    n_events: int
    elapsed_seconds: float
    scenarios_per_second: float | None


def run(config: RunConfig) -> RunOutcome:
    """Execute a full study run and write its report.

    Raises :class:`ConfigError` when referenced inputs are missing and
    :class:`DataFormatError` when the market file itself is unusable; a
    broken *event* (bad price file, thin history, degenerate fit) is
    recorded in the outcome instead and flips the report to ``.partial``.
    """
    started = time.perf_counter()
    if not config.price_dir.is_dir():
        raise ConfigError(f"price_dir {config.price_dir} is not a directory")
    for name in ("market_file", "events_file"):
        target = getattr(config, name)
        if not target.is_file():
            raise ConfigError(f"{name} {target} does not exist")

    events = load_event_registry(config.events_file)
    if not events:
        logger.warning("event registry %s is empty; writing a header-only report",
                       config.events_file)
    market = load_price_series(config.market_file)

    settings = config.settings
    rows: list[ReportRow] = []
    errors: list[tuple[str, str]] = []
    for event in events:
        price_file = config.price_dir / f"{event.instrument_id}.csv"
        try:
            stock = load_price_series(price_file, instrument_id=event.instrument_id)
            results = run_event_study(event, stock, market, settings)
        except EventStudyError as exc:
            logger.warning("skipping %s: %s", event.key, exc)
            errors.append((event.key, str(exc)))
            continue
        rows.extend(ReportRow.from_result(result) for result in results)
        logger.info("judged %s over %d windows", event.key, len(results))

    wrote_partial = bool(errors)
    report_path = (
        Path(f"{config.output}.partial") if wrote_partial else config.output
    )
    content = render_csv(rows) if config.format == "csv" else render_json(rows)
    if report_path.parent and not report_path.parent.exists():
        report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(content, encoding="utf-8")

    elapsed = time.perf_counter() - started
    scenarios_done = len(rows) * config.n_scenarios
    throughput = scenarios_done / elapsed if elapsed > 0 and scenarios_done else None
    logger.info(
        "wrote %s: %d rows, %d failed events, %.2fs%s",
        report_path,
        len(rows),
        len(errors),
        elapsed,
        f", {throughput:,.0f} scenarios/s" if throughput else "",
    )
    return RunOutcome(
        rows=rows,
        errors=errors,
        report_path=report_path,
        wrote_partial=wrote_partial,
        n_events=len(events),
        elapsed_seconds=elapsed,
        scenarios_per_second=throughput,
    )


def emit_histogram(distribution: ScenarioDistribution, path: str | Path) -> Path:
    """Write a distribution's histogram as ``bin_low,bin_high,count`` CSV."""
    if distribution.histogram is None:
        raise ValueError(
            "distribution carries no histogram; generate it with histogram_bins set"
        )
    hist = distribution.histogram
    path = Path(path)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("bin_low", "bin_high", "count"))
    for i in range(hist.counts.size):
        writer.writerow((repr(float(hist.edges[i])), repr(float(hist.edges[i + 1])),
                         int(hist.counts[i])))
    path.write_text(buffer.getvalue(), encoding="utf-8")
    return path


def verify_decision_fixture(path: str | Path) -> tuple[int, list[str]]:
    """Re-derive the impact label of every fixture row from its CAR and percentile.

    The fixture CSV needs columns ``company``, ``event_period``, ``car``,
    ``percentile``, ``impact``.  Returns the number of rows checked and a
    list of human-readable mismatch descriptions (empty when the decision
    rule reproduces every published label).
    """
    path = Path(path)
    required = ("company", "event_period", "car", "percentile", "impact")
    valid_labels = {"Negative", "None", "Positive"}
    mismatches: list[str] = []
    total = 0
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"{path}: cannot read file ({exc})") from exc
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or any(col not in reader.fieldnames for col in required):
            raise DataFormatError(
                f"{path}: header must contain {', '.join(required)}"
            )
        for record in reader:
            line = reader.line_num
            expected = (record["impact"] or "").strip()
            if expected not in valid_labels:
                raise DataFormatError(
                    f"{path}: row {line}: impact must be one of {sorted(valid_labels)}, "
                    f"got {expected!r}"
                )
            try:
                car = float(record["car"])
                percentile = float(record["percentile"])
            except (TypeError, ValueError) as exc:
                raise DataFormatError(f"{path}: row {line}: unparsable number") from exc
            total += 1
            computed = classify_impact(car, percentile).value
            if computed != expected:
                mismatches.append(
                    f"row {line}: {record['company']} {record['event_period']}: "
                    f"published {expected}, computed {computed} "
                    f"(car={car}, percentile={percentile})"
                )
    return total, mismatches
