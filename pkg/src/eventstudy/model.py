"""Market-model fits and daily abnormal returns.

The primary model is multiplicative: a stock's gross daily return is
``alpha * (1 + market_return) ** beta``.  Taking logs turns that into a
straight line, so ``beta`` comes from a closed-form least-squares fit of
log gross stock returns on log gross market returns.  The level ``alpha``
is then re-estimated on the original scale as a ratio of sums, which makes
the fitted gross returns average out to the observed ones exactly — the
property the whole pipeline leans on when it treats estimation-period
abnormal returns as mean-one noise.

An additive fit (ordinary least squares on plain returns) is also provided
as a comparison baseline.  It is deliberately kept as a separate code path
with its own arithmetic; the two models are supposed to disagree on
multi-day windows, and collapsing them would hide exactly the effect the
multiplicative model exists to capture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from math import sqrt

import numpy as np

from .errors import DegenerateModelError, HistoryError
from .ingest import AlignedReturns

__all__ = [
    "EstimationWindow",
    "ModelFit",
    "AdditiveFit",
    "estimation_window",
    "fit_market_model",
    "fit_additive_model",
    "abnormal_return",
    "additive_abnormal_return",
]

#: Trading days in a standard estimation window.
DEFAULT_ESTIMATION_DAYS = 200


@dataclass(frozen=True)
class EstimationWindow:
    """The pre-event slice of aligned returns a model is fitted on."""

    dates: tuple[date, ...]
    stock_returns: np.ndarray = field(repr=False)
    market_returns: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        stock = np.asarray(self.stock_returns, dtype=np.float64)
        market = np.asarray(self.market_returns, dtype=np.float64)
        object.__setattr__(self, "stock_returns", stock)
        object.__setattr__(self, "market_returns", market)
        if not (len(self.dates) == stock.size == market.size):
            raise ValueError(
                f"length mismatch: {len(self.dates)} dates, "
                f"{stock.size} stock returns, {market.size} market returns"
            )

    @property
    def n_days(self) -> int:
        return len(self.dates)


def estimation_window(
    aligned: AlignedReturns, event_index: int, days: int = DEFAULT_ESTIMATION_DAYS
) -> EstimationWindow:
    """Cut the ``days`` return days ending two days before the event.

    The window deliberately stops at offset -2 so the day immediately
    before the announcement — where information can leak — stays out of
    the fit and inside the event windows instead.
    """
    if days < 3:
        raise ValueError(f"estimation window needs at least 3 days, got {days}")
    start = event_index - (days + 1)
    stop = event_index - 2  # inclusive
    if start < 0:
        raise HistoryError(
            f"insufficient history before event index {event_index}: a {days}-day "
            f"estimation window ending 2 days before it starts at index {start}"
        )
    return EstimationWindow(
        dates=aligned.dates[start : stop + 1],
        stock_returns=aligned.stock_returns[start : stop + 1],
        market_returns=aligned.market_returns[start : stop + 1],
    )


@dataclass(frozen=True)
class ModelFit:
    """A fitted multiplicative market model plus its estimation residuals.

    ``abnormal_returns`` holds the one-day abnormal returns over the
    estimation window itself — the empirical pool later resampled into
    synthetic multi-day scenarios.
    """

    alpha: float
    beta: float
    log_alpha: float
    beta_stderr: float
    n_days: int
    abnormal_returns: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "abnormal_returns", np.asarray(self.abnormal_returns, dtype=np.float64)
        )
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.abnormal_returns.size != self.n_days:
            raise ValueError(
                f"{self.abnormal_returns.size} abnormal returns for {self.n_days} days"
            )


@dataclass(frozen=True)
class AdditiveFit:
    """An ordinary least-squares fit of plain returns: ``r_i = a + b * r_m``."""

    alpha: float
    beta: float
    beta_stderr: float
    n_days: int


def _check_gross_positive(window: EstimationWindow) -> None:
    if np.any(window.stock_returns <= -1.0) or np.any(window.market_returns <= -1.0):
        raise DegenerateModelError(
            "invalid return in estimation window: gross return 1 + r must be positive"
        )


def fit_market_model(window: EstimationWindow) -> ModelFit:
    """Fit the multiplicative model on an estimation window.

    Raises :class:`DegenerateModelError` for windows shorter than 3 days,
    any non-positive gross return (its log is undefined), or a market leg
    with zero variance (the slope is unidentifiable).
    """
    if window.n_days < 3:
        raise DegenerateModelError(
            f"need at least 3 estimation days to fit, got {window.n_days}"
        )
    _check_gross_positive(window)

    x = np.log1p(window.market_returns)
    y = np.log1p(window.stock_returns)
    x_dev = x - x.mean()
    s_xx = float(x_dev @ x_dev)
    if s_xx == 0.0:
        raise DegenerateModelError(
            "degenerate regressor: market returns are constant over the estimation window"
        )
    beta = float(x_dev @ (y - y.mean())) / s_xx
    log_alpha = float(y.mean() - beta * x.mean())

    # Level estimate on the original scale: with this alpha the fitted gross
    # returns sum to the observed gross returns exactly.
    gross_market_pow = np.power(1.0 + window.market_returns, beta)
    alpha = float((1.0 + window.stock_returns).sum() / gross_market_pow.sum())

    residuals = y - (log_alpha + beta * x)
    dof = window.n_days - 2
    beta_stderr = sqrt(float(residuals @ residuals) / dof / s_xx) if dof > 0 else float("nan")

    # Same arithmetic as abnormal_return(); inlined because the fit object
    # does not exist yet.
    pool = (1.0 + window.stock_returns) / (alpha * gross_market_pow) - 1.0

    return ModelFit(
        alpha=alpha,
        beta=beta,
        log_alpha=log_alpha,
        beta_stderr=beta_stderr,
        n_days=window.n_days,
        abnormal_returns=pool,
    )


def fit_additive_model(window: EstimationWindow) -> AdditiveFit:
    """Fit the additive comparison model on the same window."""
    if window.n_days < 3:
        raise DegenerateModelError(
            f"need at least 3 estimation days to fit, got {window.n_days}"
        )
    x = window.market_returns
    y = window.stock_returns
    x_dev = x - x.mean()
    s_xx = float(x_dev @ x_dev)
    if s_xx == 0.0:
        raise DegenerateModelError(
            "degenerate regressor: market returns are constant over the estimation window"
        )
    beta = float(x_dev @ (y - y.mean())) / s_xx
    alpha = float(y.mean() - beta * x.mean())
    residuals = y - (alpha + beta * x)
    dof = window.n_days - 2
    beta_stderr = sqrt(float(residuals @ residuals) / dof / s_xx) if dof > 0 else float("nan")
    return AdditiveFit(alpha=alpha, beta=beta, beta_stderr=beta_stderr, n_days=window.n_days)


def abnormal_return(
    stock_returns: float | np.ndarray,
    market_returns: float | np.ndarray,
    fit: ModelFit,
) -> float | np.ndarray:
    """One-day abnormal return(s) under a multiplicative fit.

    The realised gross return is divided by the model's predicted gross
    return; the abnormal return is that ratio minus one.  Accepts scalars
    or arrays (elementwise).
    """
    stock = np.asarray(stock_returns, dtype=np.float64)
    market = np.asarray(market_returns, dtype=np.float64)
    if np.any(stock <= -1.0) or np.any(market <= -1.0):
        raise ValueError("returns must be greater than -1")
    predicted_gross = fit.alpha * np.power(1.0 + market, fit.beta)
    result = (1.0 + stock) / predicted_gross - 1.0
    if np.isscalar(stock_returns) and np.isscalar(market_returns):
        return float(result)
    return result


def additive_abnormal_return(
    stock_returns: float | np.ndarray,
    market_returns: float | np.ndarray,
    fit: AdditiveFit,
) -> float | np.ndarray:
    """One-day abnormal return(s) under the additive comparison fit."""
    stock = np.asarray(stock_returns, dtype=np.float64)
    market = np.asarray(market_returns, dtype=np.float64)
    result = stock - (fit.alpha + fit.beta * market)
    if np.isscalar(stock_returns) and np.isscalar(market_returns):
        return float(result)
    return result
