"""Event windows, the percentile decision rule, and the per-event pipeline.

An event window always opens one trading day before the announcement (to
catch leakage) and closes 0, 1, 3, 5, or 10 days after it in a standard
run.  For each window the pipeline compares the observed cumulative
abnormal return against a resampled no-impact distribution of the same
length and classifies the event:

* ``Negative`` — the CAR is below zero *and* sits below the low percentile
  threshold (default 10th).
* ``Positive`` — the CAR is above zero *and* sits above the high threshold
  (default 90th).
* ``None`` — everything else; the move is within the ordinary noise.

Both conditions are strict: landing exactly on a threshold is not enough.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .bootstrap import (
    DEFAULT_N_SCENARIOS,
    STANDARD_DRAWS,
    ScenarioDistribution,
    ScenarioSpec,
    cumulative_abnormal_return,
    derive_seed,
    generate_distribution,
    percentile_of,
)
from .errors import HistoryError
from .ingest import AlignedReturns, EventRecord, PriceSeries, align, resolve_event_day
from .model import (
    DEFAULT_ESTIMATION_DAYS,
    AdditiveFit,
    ModelFit,
    abnormal_return,
    additive_abnormal_return,
    estimation_window,
    fit_additive_model,
    fit_market_model,
)

__all__ = [
    "Impact",
    "EventWindow",
    "STANDARD_WINDOWS",
    "parse_window_label",
    "classify_impact",
    "actual_window_car",
    "additive_baseline",
    "StudySettings",
    "Provenance",
    "EventResult",
    "run_event_study",
    "event_scenario_distribution",
]


class Impact(enum.Enum):
    """Classification of one event window."""

    NEGATIVE = "Negative"
    NONE = "None"
    POSITIVE = "Positive"

    def __str__(self) -> str:  # report-friendly
        return self.value


@dataclass(frozen=True)
class EventWindow:
    """A window of trading days around the announcement, in day offsets.

    Offset 0 is the announcement's trading day.  The start is pinned at
    -1: the day before the announcement is always included.
    """

    end_offset: int
    start_offset: int = -1

    def __post_init__(self) -> None:
        if self.start_offset != -1:
            raise ValueError(
                f"event windows open the day before the announcement "
                f"(start_offset -1), got {self.start_offset}"
            )
        if self.end_offset < self.start_offset:
            raise ValueError(
                f"end_offset {self.end_offset} precedes start_offset {self.start_offset}"
            )

    @property
    def n_days(self) -> int:
        """Trading days in the window — also the draws per scenario."""
        return self.end_offset - self.start_offset + 1

    @property
    def label(self) -> str:
        return f"[{self.start_offset},{self.end_offset}]"


#: The five standard event windows: 2, 3, 5, 7, and 12 trading days.
STANDARD_WINDOWS: tuple[EventWindow, ...] = (
    EventWindow(0),
    EventWindow(1),
    EventWindow(3),
    EventWindow(5),
    EventWindow(10),
)

_LABEL_PATTERN = re.compile(r"\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


def parse_window_label(label: str) -> EventWindow:
    """Parse a window label like ``[-1,5]`` back into an :class:`EventWindow`."""
    match = _LABEL_PATTERN.fullmatch(label.strip())
    if not match:
        raise ValueError(f"unparsable window label {label!r} (expected like '[-1,5]')")
    start, end = int(match.group(1)), int(match.group(2))
    return EventWindow(end_offset=end, start_offset=start)


def classify_impact(
    car: float, percentile: float, threshold_lo: float = 10.0, threshold_hi: float = 90.0
) -> Impact:
    """Apply the two-sided percentile decision rule to one window.

    Sign and rank must agree: a negative CAR in the extreme low tail is
    ``Negative``, a positive CAR in the extreme high tail is ``Positive``,
    anything else — including ties with a threshold — is ``None``.
    """
    if not 0.0 < threshold_lo < threshold_hi < 100.0:
        raise ValueError(
            f"thresholds must satisfy 0 < lo < hi < 100, got {threshold_lo}, {threshold_hi}"
        )
    if not 0.0 <= percentile <= 100.0:
        raise ValueError(f"percentile must be in [0, 100], got {percentile}")
    if car < 0.0 and percentile < threshold_lo:
        return Impact.NEGATIVE
    if car > 0.0 and percentile > threshold_hi:
        return Impact.POSITIVE
    return Impact.NONE


def _window_bounds(
    aligned: AlignedReturns, event_index: int, window: EventWindow
) -> tuple[int, int]:
    lo = event_index + window.start_offset
    hi = event_index + window.end_offset
    if lo < 0 or hi >= len(aligned):
        raise HistoryError(
            f"window {window.label} around event index {event_index} extends "
            f"beyond the available {len(aligned)} return days"
        )
    return lo, hi


def actual_window_car(
    aligned: AlignedReturns, fit: ModelFit, event_index: int, window: EventWindow
) -> float:
    """Observed cumulative abnormal return over one event window."""
    lo, hi = _window_bounds(aligned, event_index, window)
    ars = abnormal_return(
        aligned.stock_returns[lo : hi + 1], aligned.market_returns[lo : hi + 1], fit
    )
    return cumulative_abnormal_return(ars)


def additive_baseline(
    aligned: AlignedReturns, fit: AdditiveFit, event_index: int, window: EventWindow
) -> float:
    """Observed CAR under the additive comparison model (plain sum)."""
    lo, hi = _window_bounds(aligned, event_index, window)
    ars = additive_abnormal_return(
        aligned.stock_returns[lo : hi + 1], aligned.market_returns[lo : hi + 1], fit
    )
    return float(ars.sum())


@dataclass(frozen=True)
class StudySettings:
    """Tunable knobs of a study, with standard-run defaults."""

    n_scenarios: int = DEFAULT_N_SCENARIOS
    seed: int = 0
    mode: str = "iid"
    threshold_lo: float = 10.0
    threshold_hi: float = 90.0
    estimation_days: int = DEFAULT_ESTIMATION_DAYS
    workers: int = 1

    def __post_init__(self) -> None:
        # ScenarioSpec re-validates n_scenarios/seed/mode later; checking here
        # means a bad setting fails at construction, not mid-run.
        ScenarioSpec(draws_k=1, n_scenarios=self.n_scenarios, seed=self.seed, mode=self.mode)
        if not 0.0 < self.threshold_lo < self.threshold_hi < 100.0:
            raise ValueError(
                f"thresholds must satisfy 0 < lo < hi < 100, "
                f"got {self.threshold_lo}, {self.threshold_hi}"
            )
        if self.estimation_days < 3:
            raise ValueError(f"estimation_days must be >= 3, got {self.estimation_days}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class Provenance:
    """Everything needed to reproduce a result row bit for bit."""

    seed: int
    mode: str
    n_scenarios: int
    estimation_days: int
    generator: str = "philox4x64"
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class EventResult:
    """One event judged over one window."""

    event: EventRecord
    window: EventWindow
    car: float
    percentile: float
    impact: Impact
    car_additive: float
    provenance: Provenance


def _provenance(settings: StudySettings, window: EventWindow) -> Provenance:
    flags: list[str] = []
    if settings.estimation_days != DEFAULT_ESTIMATION_DAYS:
        flags.append("nonstandard_estimation")
    if window.n_days not in STANDARD_DRAWS:
        flags.append("nonstandard_window")
    return Provenance(
        seed=settings.seed,
        mode=settings.mode,
        n_scenarios=settings.n_scenarios,
        estimation_days=settings.estimation_days,
        flags=tuple(flags),
    )


def _prepare_event(
    event: EventRecord,
    stock: PriceSeries,
    market: PriceSeries,
    settings: StudySettings,
    windows: tuple[EventWindow, ...],
) -> tuple[AlignedReturns, int, ModelFit, AdditiveFit]:
    """Align, place the event, and fit both models — shared by all windows."""
    if not windows:
        raise ValueError("need at least one event window")
    aligned = align(stock, market)
    event_index = resolve_event_day(
        event,
        aligned.dates,
        min_prior_days=settings.estimation_days + 1,
        min_following_days=max(w.end_offset for w in windows),
    )
    window_data = estimation_window(aligned, event_index, settings.estimation_days)
    return aligned, event_index, fit_market_model(window_data), fit_additive_model(window_data)


def _window_seed(settings: StudySettings, event: EventRecord, window: EventWindow) -> int:
    return derive_seed(settings.seed, event.key, window.label)


def run_event_study(
    event: EventRecord,
    stock: PriceSeries,
    market: PriceSeries,
    settings: StudySettings = StudySettings(),
    windows: tuple[EventWindow, ...] = STANDARD_WINDOWS,
) -> list[EventResult]:
    """Judge one event over every window; all results or an exception.

    Each window gets its own scenario distribution, seeded independently
    from (root seed, event key, window label), so adding or removing
    windows never perturbs the others' randomness.  Any failure raises —
    a partial result list is never returned.
    """
    aligned, event_index, fit, fit_add = _prepare_event(event, stock, market, settings, windows)
    results: list[EventResult] = []
    for window in windows:
        car = actual_window_car(aligned, fit, event_index, window)
        spec = ScenarioSpec(
            draws_k=window.n_days,
            n_scenarios=settings.n_scenarios,
            seed=_window_seed(settings, event, window),
            mode=settings.mode,
        )
        distribution = generate_distribution(
            fit.abnormal_returns, spec, references=(car,), workers=settings.workers
        )
        percentile = percentile_of(distribution, car)
        results.append(
            EventResult(
                event=event,
                window=window,
                car=car,
                percentile=percentile,
                impact=classify_impact(
                    car, percentile, settings.threshold_lo, settings.threshold_hi
                ),
                car_additive=additive_baseline(aligned, fit_add, event_index, window),
                provenance=_provenance(settings, window),
            )
        )
    return results


def event_scenario_distribution(
    event: EventRecord,
    stock: PriceSeries,
    market: PriceSeries,
    window: EventWindow,
    settings: StudySettings = StudySettings(),
    *,
    histogram_bins: int | None = None,
) -> tuple[ScenarioDistribution, float]:
    """The scenario distribution and observed CAR for one (event, window).

    Uses the same seed derivation as :func:`run_event_study`, so the
    distribution examined here is the one the study actually used.
    """
    aligned, event_index, fit, _ = _prepare_event(event, stock, market, settings, (window,))
    car = actual_window_car(aligned, fit, event_index, window)
    spec = ScenarioSpec(
        draws_k=window.n_days,
        n_scenarios=settings.n_scenarios,
        seed=_window_seed(settings, event, window),
        mode=settings.mode,
    )
    distribution = generate_distribution(
        fit.abnormal_returns,
        spec,
        references=(car,),
        histogram_bins=histogram_bins,
        workers=settings.workers,
    )
    return distribution, car
