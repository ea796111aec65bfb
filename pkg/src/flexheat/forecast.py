"""Kernel smoothing of overlapping short-horizon forecasts.

Forecast providers issue a fresh 1..H hour forecast every few hours, so
each valid time is covered by several overlapping predictions that can
jump at issue boundaries.  The smoother fits, for every output hour, a
locally weighted regression (Epanechnikov kernel over time distance times
an exponential short-horizon preference) on a cubic B-spline basis of the
hour of day plus coarse day/month indicators, and evaluates the fit at
that hour.

Also dispenses the penalty vectors for the three forecast cases used by
the controller: perfect knowledge, ingested forecasts, and a constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.interpolate import BSpline

IDEAL = "ideal"
REAL = "real"
TRIVIAL = "trivial"
CASES = (IDEAL, REAL, TRIVIAL)


class GapError(ValueError):
    """Output times that no weighted observation covers."""


class SingularDesignError(ValueError):
    """Weighted design matrix is rank deficient."""


class CoverageError(ValueError):
    """Requested window not covered by the loaded data."""


@dataclass(frozen=True)
class ForecastPoint:
    valid_time: pd.Timestamp
    horizon: int          # hours ahead at issue time, >= 1
    value: float

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True)
class SmoothingConfig:
    a: float = 1.5            # horizon-decay coefficient
    b: float = 7.0            # kernel bandwidth, samples (hours)
    df: int = 7               # spline degrees of freedom
    clamp_nonnegative: bool = False

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be > 0")
        if self.df < 3:
            raise ValueError("df must be >= 3")


def epanechnikov(u):
    """Epanechnikov kernel 0.75 (1 - u^2), zero outside |u| < 1."""
    u = np.asarray(u, dtype=float)
    w = np.where(u < 1.0, 0.75 * (1.0 - u ** 2), 0.0)
    return w if w.ndim else float(w)


def horizon_weight(a: float, h):
    """Short-horizon preference exp(-a (h - 1)); heaviest at h = 1."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 1):
        raise ValueError("horizon must be >= 1")
    w = np.exp(-a * (h - 1.0))
    return w if w.ndim else float(w)


def weighted_least_squares(X: np.ndarray, w: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve min ||sqrt(W)(y - X beta)||^2 via QR on the scaled system."""
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] != w.size or w.size != y.size:
        raise ValueError("X, w, y row counts differ")
    active = w > 0
    Xa, wa, ya = X[active], w[active], y[active]
    sw = np.sqrt(wa)
    Xs = Xa * sw[:, None]
    rank = np.linalg.matrix_rank(Xs, tol=1e-10)
    if rank < X.shape[1]:
        _, _, vt = np.linalg.svd(Xs)
        null = vt[-1]
        raise SingularDesignError(
            f"weighted design rank {rank} < {X.shape[1]} columns; "
            f"null direction {np.round(null, 6)}")
    beta, *_ = np.linalg.lstsq(Xs, ya * sw, rcond=None)
    return beta


def bspline_basis(hour_of_day, df: int) -> np.ndarray:
    """Cubic B-spline basis over [0, 24) with clamped ends and ``df`` columns.

    Basis values are nonnegative and sum to one at every hour.
    """
    if df < 3:
        raise ValueError("df must be >= 3")
    hours = np.atleast_1d(np.asarray(hour_of_day, dtype=float))
    if np.any(hours < 0) or np.any(hours >= 24):
        raise ValueError("hour must lie in [0, 24)")
    k = 3
    interior = np.linspace(0.0, 24.0, df - k + 1)[1:-1]
    knots = np.concatenate([[0.0] * (k + 1), interior, [24.0] * (k + 1)])
    design = BSpline.design_matrix(hours, knots, k).toarray()
    return design if np.ndim(hour_of_day) else design[0]


def _calendar_columns(times: pd.DatetimeIndex, ref: pd.Timestamp) -> np.ndarray:
    """Coarse day/month indicator columns, zero at the reference time.

    Only levels differing from the reference get a column, so designs stay
    full rank inside narrow smoothing windows.
    """
    cols = []
    for values, ref_value in (
        (times.dayofyear.to_numpy(), ref.dayofyear),
        (times.month.to_numpy(), ref.month),
    ):
        for level in sorted(set(values) - {ref_value}):
            cols.append((values == level).astype(float))
    if not cols:
        return np.empty((len(times), 0))
    return np.column_stack(cols)


def smooth_series(forecasts: Sequence[ForecastPoint],
                  config: SmoothingConfig = SmoothingConfig()) -> pd.Series:
    """Single gap-free hourly series estimated from overlapping forecasts."""
    if not forecasts:
        raise GapError("no forecast points supplied")
    times = pd.DatetimeIndex([p.valid_time for p in forecasts])
    horizons = np.array([p.horizon for p in forecasts], dtype=float)
    values = np.array([p.value for p in forecasts], dtype=float)
    out_times = pd.DatetimeIndex(sorted(times.unique()))

    hours_num = times.view("int64") / 3.6e12   # sample index in hours
    w_h = horizon_weight(config.a, horizons)
    spline_all = bspline_basis((hours_num % 24.0), config.df)

    fitted = np.empty(out_times.size)
    gaps = []
    for i, t in enumerate(out_times):
        t_num = t.value / 3.6e12
        w_t = epanechnikov(np.abs(hours_num - t_num) / config.b)
        w = w_t * w_h
        if not np.any(w > 0):
            gaps.append(t)
            continue
        active = w > 0
        cal = _calendar_columns(times[active], t)
        X = np.column_stack([spline_all[active], cal])
        x_t = np.concatenate([bspline_basis(t_num % 24.0, config.df),
                              np.zeros(cal.shape[1])])
        # Narrow windows zero out far-away spline columns and can make
        # calendar indicators collinear; fit on an independent subset.
        keep = _independent_columns(X * np.sqrt(w[active])[:, None])
        beta = weighted_least_squares(X[:, keep], w[active], values[active])
        fitted[i] = x_t[keep] @ beta
    if gaps:
        raise GapError(f"no weighted data at {[str(t) for t in gaps]}")
    if config.clamp_nonnegative:
        fitted = np.maximum(fitted, 0.0)
    return pd.Series(fitted, index=out_times)


def stitched_series(forecasts: Sequence[ForecastPoint]) -> pd.Series:
    """Raw series taking, per valid time, the shortest-horizon forecast."""
    best: dict[pd.Timestamp, tuple[int, float]] = {}
    for p in forecasts:
        cur = best.get(p.valid_time)
        if cur is None or p.horizon < cur[0]:
            best[p.valid_time] = (p.horizon, p.value)
    times = sorted(best)
    return pd.Series([best[t][1] for t in times], index=pd.DatetimeIndex(times))


@dataclass(frozen=True)
class PenaltyData:
    """Realized penalty series plus (optionally) its forecast table."""

    realized: pd.Series                     # hourly, monotone index
    forecasts: pd.DataFrame | None = None   # columns valid_time, horizon_h, value


def penalty_for_case(case: str, t: pd.Timestamp, N: int,
                     data: PenaltyData) -> np.ndarray:
    """Penalty vector for hours t+1 .. t+N under the given forecast case."""
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    targets = pd.date_range(t, periods=N + 1, freq="h")[1:]
    if case == TRIVIAL:
        return np.ones(N)
    if case == IDEAL:
        missing = targets.difference(data.realized.index)
        if len(missing):
            raise CoverageError(f"realized penalties missing at {list(missing)}")
        return data.realized.loc[targets].to_numpy()
    if data.forecasts is None:
        raise CoverageError("no penalty forecasts loaded for the real case")
    fc = data.forecasts
    out = np.empty(N)
    for i, tau in enumerate(targets):
        rows = fc[fc["valid_time"] == tau]
        # issued at valid_time - horizon; usable when issued at or before t
        usable = rows[rows["valid_time"] - pd.to_timedelta(rows["horizon_h"], "h") <= t]
        if usable.empty:
            raise CoverageError(f"no forecast issued by {t} for {tau}")
        out[i] = usable.loc[usable["horizon_h"].idxmin(), "value"]
    return out


def forecast_points_from_frame(frame: pd.DataFrame) -> list[ForecastPoint]:
    """Build forecast points from a (valid_time, horizon_h, value) table."""
    return [ForecastPoint(pd.Timestamp(r.valid_time), int(r.horizon_h), float(r.value))
            for r in frame.itertuples(index=False)]
