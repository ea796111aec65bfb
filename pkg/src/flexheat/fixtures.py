"""Synthetic year-long weather and penalty fixtures.

The study's emission and weather data are proprietary, so the repo ships
deterministic synthetic stand-ins with the same qualitative structure:
a diurnal penalty with an early-morning peak, a nightly minimum and a
winter amplitude bump; a seasonal + diurnal ambient temperature; and a
clear-sky-shaped solar irradiance.  All generators are seeded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .forecast import ForecastPoint

DEFAULT_START = "2017-06-01 00:00"
DEFAULT_HOURS = 8688      # matches the study's evaluation period length
DEFAULT_SEED = 20170601


def _index(start: str, hours: int) -> pd.DatetimeIndex:
    return pd.date_range(start, periods=hours, freq="h")


def penalty_series(hours: int = DEFAULT_HOURS, start: str = DEFAULT_START,
                   seed: int = DEFAULT_SEED) -> pd.Series:
    """Marginal-emission penalty, kg CO2-eq/MWh.

    Diurnal shape: minimum around midnight, steep peak at 04:00, elevated
    morning/evening shoulders; amplitude grows in winter.
    """
    idx = _index(start, hours)
    rng = np.random.default_rng(seed)
    hod = idx.hour.to_numpy()
    doy = idx.dayofyear.to_numpy()

    morning_peak = np.exp(-0.5 * ((hod - 4.0) / 1.8) ** 2)
    evening_bump = 0.45 * np.exp(-0.5 * ((hod - 18.0) / 2.5) ** 2)
    night_dip = -0.5 * np.exp(-0.5 * (((hod - 0.5) % 24.0 - 0.5) / 2.0) ** 2)
    diurnal = morning_peak + evening_bump + night_dip

    winter = 1.0 + 0.6 * np.cos(2.0 * np.pi * (doy - 15) / 365.0)
    noise = rng.normal(0.0, 12.0, hours)
    lam = 300.0 + 130.0 * diurnal * winter + noise
    return pd.Series(np.maximum(lam, 20.0), index=idx, name="lambda")


def temperature_series(hours: int = DEFAULT_HOURS, start: str = DEFAULT_START,
                       seed: int = DEFAULT_SEED + 1) -> pd.Series:
    """Ambient temperature, degC: annual and diurnal sinusoids plus slow noise."""
    idx = _index(start, hours)
    rng = np.random.default_rng(seed)
    hod = idx.hour.to_numpy()
    doy = idx.dayofyear.to_numpy()
    annual = 8.0 - 9.0 * np.cos(2.0 * np.pi * (doy - 200) / 365.0)
    diurnal = 3.0 * np.sin(2.0 * np.pi * (hod - 9) / 24.0)
    # slowly varying weather systems: AR(1) over days
    daily = rng.normal(0.0, 2.2, hours // 24 + 2)
    for i in range(1, daily.size):
        daily[i] = 0.75 * daily[i - 1] + daily[i]
    slow = np.repeat(daily, 24)[:hours]
    return pd.Series(annual + diurnal + slow, index=idx, name="T_a")


def solar_series(hours: int = DEFAULT_HOURS, start: str = DEFAULT_START,
                 seed: int = DEFAULT_SEED + 2) -> pd.Series:
    """Global irradiance on the windows, kW/m^2, clear-sky shape with clouds."""
    idx = _index(start, hours)
    rng = np.random.default_rng(seed)
    hod = idx.hour.to_numpy()
    doy = idx.dayofyear.to_numpy()
    elevation = np.maximum(0.0, np.sin(np.pi * (hod - 6.0) / 12.0))
    season = 0.45 - 0.35 * np.cos(2.0 * np.pi * (doy - 172) / 365.0)
    cloud_daily = np.clip(rng.beta(3.0, 1.6, hours // 24 + 1), 0.15, 1.0)
    clouds = np.repeat(cloud_daily, 24)[:hours]
    return pd.Series(elevation * season * clouds, index=idx, name="solar")


def solar_forecast_points(day: str = "2017-06-21", issues_per_day: int = 4,
                          horizon: int = 6, n_days: int = 1,
                          seed: int = DEFAULT_SEED + 3) -> list[ForecastPoint]:
    """Overlapping short-horizon solar forecasts mimicking the issue cadence.

    Issues at 02/08/14/20; each horizon adds bias and noise, so the raw
    shortest-horizon stitching jumps at issue boundaries.
    """
    rng = np.random.default_rng(seed)
    start = pd.Timestamp(day)
    truth = solar_series(hours=24 * (n_days + 1), start=str(start - pd.Timedelta(hours=6)),
                         seed=seed + 7)
    points = []
    issue_hours = np.linspace(0, 24, issues_per_day, endpoint=False).astype(int) + 2
    for d in range(n_days):
        for issue_h in issue_hours:
            issue = start + pd.Timedelta(days=d, hours=int(issue_h))
            bias = rng.normal(0.0, 0.05)
            for h in range(1, horizon + 1):
                valid = issue + pd.Timedelta(hours=h)
                if valid not in truth.index:
                    continue
                base = float(truth.loc[valid])
                err = bias * h / horizon + rng.normal(0.0, 0.012 * h)
                value = max(0.0, base + err * (base > 0))
                points.append(ForecastPoint(valid, h, value))
    return points


def penalty_forecast_frame(realized: pd.Series, horizon: int = 24,
                           issue_every: int = 6,
                           seed: int = DEFAULT_SEED + 4) -> pd.DataFrame:
    """Penalty forecasts as (valid_time, horizon_h, value), noisier at range."""
    rng = np.random.default_rng(seed)
    rows = []
    times = realized.index
    for i0 in range(0, len(times), issue_every):
        issue = times[i0]
        for h in range(1, horizon + 1):
            i = i0 + h
            if i >= len(times):
                break
            value = realized.iloc[i] + rng.normal(0.0, 4.0 + 2.0 * h)
            rows.append((times[i], h, max(value, 0.0)))
    return pd.DataFrame(rows, columns=["valid_time", "horizon_h", "value"])


def write_fixture_csvs(out_dir, hours: int = DEFAULT_HOURS,
                       start: str = DEFAULT_START,
                       seed: int = DEFAULT_SEED) -> dict[str, str]:
    """Write the committed fixture CSVs; returns name -> path."""
    from pathlib import Path
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, series in (("lambda", penalty_series(hours, start, seed)),
                         ("temperature", temperature_series(hours, start, seed + 1)),
                         ("solar", solar_series(hours, start, seed + 2))):
        path = out / f"{name}.csv"
        frame = series.reset_index()
        frame.columns = ["time", "value"]
        frame.to_csv(path, index=False)
        paths[name] = str(path)
    return paths
