"""Empirical scenario distributions for multi-day cumulative abnormal returns.

The idea: the estimation window leaves a pool of one-day abnormal returns
that are, by construction, plain-vanilla noise.  Resampling ``k`` of them
and compounding gives one synthetic ``k``-day cumulative abnormal return
(CAR); repeating millions of times maps out what "no impact" looks like
for a window of that length.  An observed event-window CAR is then judged
by its percentile inside that distribution.

Two resampling modes are supported:

* ``iid`` — every draw picks an independent pool day (with replacement).
* ``block`` — one draw picks a start day and the scenario takes ``k``
  consecutive pool days, preserving short-range dependence.

Determinism and scale
---------------------
Distributions run to millions of scenarios, so CARs are never stored.
Instead the generator streams chunks and keeps only reductions: exact
below/equal counts for registered reference values, the observed min/max,
and (optionally) fixed-bin histogram counts.

Randomness comes from a counter-based generator (Philox, 4x64).  Scenario
``i`` owns the counter blocks ``[i * bps, (i + 1) * bps)`` of the keyed
stream, where ``bps`` is the number of 4-output blocks a scenario needs.
Chunks position themselves with ``advance`` and never share blocks, so
the resulting distribution is a pure function of (pool, spec, references,
histogram_bins) — chunk size and worker count cannot change a single bit
of it.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "STANDARD_DRAWS",
    "DEFAULT_N_SCENARIOS",
    "ScenarioSpec",
    "Histogram",
    "ScenarioDistribution",
    "cumulative_abnormal_return",
    "generate_distribution",
    "percentile_of",
    "derive_seed",
]

#: Draw counts used by the five standard event windows.
STANDARD_DRAWS = frozenset({2, 3, 5, 7, 12})

#: Scenario count for a standard run.
DEFAULT_N_SCENARIOS = 5_000_000

#: Scenarios per chunk: large enough to amortise generator setup, small
#: enough that a chunk's draw matrix stays a few megabytes.
DEFAULT_CHUNK_SIZE = 1 << 17

_MAX_SEED = 2**64 - 1
_OUTPUTS_PER_BLOCK = 4  # Philox 4x64 emits four 64-bit words per counter tick


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything that determines a scenario distribution besides the pool."""

    draws_k: int
    n_scenarios: int = DEFAULT_N_SCENARIOS
    seed: int = 0
    mode: str = "iid"

    def __post_init__(self) -> None:
        if self.draws_k < 1:
            raise ValueError(f"draws_k must be >= 1, got {self.draws_k}")
        if self.n_scenarios < 1:
            raise ValueError(f"n_scenarios must be >= 1, got {self.n_scenarios}")
        if not 0 <= self.seed <= _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.mode not in ("iid", "block"):
            raise ValueError(f"mode must be 'iid' or 'block', got {self.mode!r}")

    @property
    def is_standard_draws(self) -> bool:
        """Whether ``draws_k`` matches one of the five standard windows."""
        return self.draws_k in STANDARD_DRAWS


@dataclass(frozen=True)
class Histogram:
    """Fixed-bin counts over the generated CARs.

    ``edges`` has one more entry than ``counts``; bin ``i`` spans
    ``[edges[i], edges[i+1])`` with the last bin closed on the right, so
    every generated CAR lands in exactly one bin.
    """

    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        edges = np.asarray(self.edges, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)
        if edges.size != counts.size + 1:
            raise ValueError(f"{edges.size} edges for {counts.size} bins")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ScenarioDistribution:
    """Streaming summary of one generated scenario distribution.

    The raw CARs are gone by the time this object exists; what remains is
    exact: ``n``, the observed ``min_car``/``max_car``, and precise
    below/equal counts for every reference value registered when the
    distribution was generated.  Asking about an unregistered value strictly
    inside the observed range raises ``KeyError`` rather than guessing.
    """

    n: int
    min_car: float
    max_car: float
    spec: ScenarioSpec
    references: Mapping[float, tuple[int, int]] = field(repr=False)
    histogram: Histogram | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.min_car <= self.max_car:
            raise ValueError(f"min_car {self.min_car} exceeds max_car {self.max_car}")
        for value, (below, equal) in self.references.items():
            if not 0 <= below <= self.n or not 0 <= equal <= self.n - below:
                raise ValueError(f"impossible counts for reference {value}")

    def count_below(self, value: float) -> int:
        """Exact number of generated CARs strictly below ``value``."""
        v = float(value)
        if v in self.references:
            return self.references[v][0]
        if v <= self.min_car:
            return 0
        if v > self.max_car:
            return self.n
        raise KeyError(
            f"{v!r} was not registered as a reference value when this "
            f"distribution was generated"
        )

    def count_equal(self, value: float) -> int:
        """Exact number of generated CARs equal to ``value``."""
        v = float(value)
        if v in self.references:
            return self.references[v][1]
        if v < self.min_car or v > self.max_car:
            return 0
        if self.min_car == self.max_car:  # degenerate: every CAR is min_car
            return self.n if v == self.min_car else 0
        raise KeyError(
            f"{v!r} was not registered as a reference value when this "
            f"distribution was generated"
        )


def cumulative_abnormal_return(abnormal_returns: Iterable[float] | np.ndarray) -> float:
    """Compound one-day abnormal returns into a cumulative abnormal return.

    Gross abnormal returns multiply across days: ``prod(1 + ar) - 1``.
    Compounding +10% with -10% therefore nets -1%, not zero — the whole
    reason the pipeline is multiplicative.
    """
    arr = np.asarray(abnormal_returns, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty window: need at least one abnormal return")
    if not np.all(np.isfinite(arr)):
        raise ValueError("abnormal returns must be finite")
    if np.any(arr <= -1.0):
        raise ValueError("abnormal return <= -1 leaves no value to compound")
    return float(np.prod(1.0 + arr) - 1.0)


def derive_seed(root_seed: int, *components: str) -> int:
    """Derive a stable 64-bit stream key from a root seed and text labels.

    Hashing (root seed, labels...) gives every (event, window) pair its own
    independent generator stream while keeping the whole run reproducible
    from one root seed.
    """
    payload = "\x1f".join([str(int(root_seed)), *components]).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "big")


def _blocks_per_scenario(draws_per_scenario: int) -> int:
    return -(-draws_per_scenario // _OUTPUTS_PER_BLOCK)


def _chunk_cars(
    pool_gross: np.ndarray,
    spec: ScenarioSpec,
    start: int,
    count: int,
) -> np.ndarray:
    """Generate the CARs of scenarios ``[start, start + count)``.

    Depends only on (pool_gross, spec, start, count): the generator is
    advanced to the chunk's own counter blocks, so any partition of the
    scenario range into chunks yields the same per-scenario values.
    """
    draws = spec.draws_k if spec.mode == "iid" else 1
    bps = _blocks_per_scenario(draws)
    gen = np.random.Philox(key=spec.seed)
    if start:
        gen.advance(start * bps)
    raw = gen.random_raw(count * bps * _OUTPUTS_PER_BLOCK)
    raw = raw.reshape(count, bps * _OUTPUTS_PER_BLOCK)

    pool_len = pool_gross.size
    if spec.mode == "iid":
        # Index by modulo; with a 64-bit word and pools of a few hundred
        # days the selection bias is below 1e-16 per draw.
        idx = (raw[:, : spec.draws_k] % np.uint64(pool_len)).astype(np.intp)
        factors = pool_gross[idx]
    else:
        n_starts = pool_len - spec.draws_k + 1
        starts = (raw[:, 0] % np.uint64(n_starts)).astype(np.intp)
        idx = starts[:, None] + np.arange(spec.draws_k, dtype=np.intp)[None, :]
        factors = pool_gross[idx]
    return factors.prod(axis=1) - 1.0


def _chunk_bounds(n: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk_size, n)) for lo in range(0, n, chunk_size)]


def generate_distribution(
    pool: Iterable[float] | np.ndarray,
    spec: ScenarioSpec,
    *,
    references: Iterable[float] = (),
    histogram_bins: int | None = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> ScenarioDistribution:
    """Stream ``spec.n_scenarios`` synthetic CARs into an exact summary.

    ``references`` are the values whose below/equal counts must be exact
    (typically the observed event-window CAR).  ``histogram_bins`` adds a
    fixed-bin histogram spanning the observed range; it costs a second
    generation pass, which is cheap and keeps the summary exact.
    ``workers`` and ``chunk_size`` are purely operational knobs — the
    result is bit-for-bit identical for any setting of either.
    """
    pool_arr = np.asarray(pool, dtype=np.float64)
    if pool_arr.size == 0:
        raise ValueError("empty abnormal-return pool")
    if not np.all(np.isfinite(pool_arr)):
        raise ValueError("abnormal-return pool must be finite")
    if np.any(pool_arr <= -1.0):
        raise ValueError("abnormal-return pool contains a value <= -1")
    if spec.mode == "block" and pool_arr.size < spec.draws_k:
        raise ValueError(
            f"pool of {pool_arr.size} days is too short for consecutive "
            f"blocks of {spec.draws_k}"
        )
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    if histogram_bins is not None and histogram_bins < 1:
        raise ValueError(f"histogram_bins must be >= 1, got {histogram_bins}")

    refs = tuple(sorted({float(v) for v in references}))
    pool_gross = 1.0 + pool_arr
    bounds = _chunk_bounds(spec.n_scenarios, chunk_size)

    def count_pass(bound: tuple[int, int]) -> tuple[np.ndarray, np.ndarray, float, float]:
        lo, hi = bound
        cars = _chunk_cars(pool_gross, spec, lo, hi - lo)
        below = np.array([(cars < v).sum() for v in refs], dtype=np.int64)
        equal = np.array([(cars == v).sum() for v in refs], dtype=np.int64)
        return below, equal, float(cars.min()), float(cars.max())

    if workers == 1:
        counted = [count_pass(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool_exec:
            counted = list(pool_exec.map(count_pass, bounds))

    below_total = np.zeros(len(refs), dtype=np.int64)
    equal_total = np.zeros(len(refs), dtype=np.int64)
    min_car = np.inf
    max_car = -np.inf
    for below, equal, cmin, cmax in counted:
        below_total += below
        equal_total += equal
        min_car = min(min_car, cmin)
        max_car = max(max_car, cmax)

    histogram: Histogram | None = None
    if histogram_bins is not None:
        if min_car == max_car:
            histogram = Histogram(
                edges=np.array([min_car, max_car]),
                counts=np.array([spec.n_scenarios]),
            )
        else:
            edges = np.histogram_bin_edges(
                np.empty(0), bins=histogram_bins, range=(min_car, max_car)
            )

            def hist_pass(bound: tuple[int, int]) -> np.ndarray:
                lo, hi = bound
                cars = _chunk_cars(pool_gross, spec, lo, hi - lo)
                counts, _ = np.histogram(cars, bins=edges)
                return counts.astype(np.int64)

            if workers == 1:
                hist_counts = [hist_pass(b) for b in bounds]
            else:
                with ThreadPoolExecutor(max_workers=workers) as pool_exec:
                    hist_counts = list(pool_exec.map(hist_pass, bounds))
            histogram = Histogram(edges=edges, counts=sum(hist_counts))

    return ScenarioDistribution(
        n=spec.n_scenarios,
        min_car=float(min_car),
        max_car=float(max_car),
        spec=spec,
        references={v: (int(b), int(e)) for v, b, e in zip(refs, below_total, equal_total)},
        histogram=histogram,
    )


def percentile_of(distribution: ScenarioDistribution, value: float) -> float:
    """Midrank percentile of ``value`` inside a generated distribution.

    Counts strictly-below plus half the ties, scaled to 0–100.  With ``n``
    scenarios the result moves in steps of ``100 / (2n)``, so five million
    scenarios resolve one two-hundred-thousandth of a percentile.
    """
    below = distribution.count_below(value)
    equal = distribution.count_equal(value)
    return 100.0 * (below + 0.5 * equal) / distribution.n
