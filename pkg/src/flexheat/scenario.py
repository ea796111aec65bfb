"""Scenario configuration and data ingestion.

Scenario files are line-oriented ``key = value`` text with explicit units
in the key names (unit mistakes are the dominant failure mode in this
domain).  Unknown keys are errors, not warnings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import envelope as env
from .envelope import (FAMILY_HOUSE, OFFICE, BuildingGeometry, EnvelopeParams,
                       derive_params, geometry_from_footprint,
                       load_building_codes, load_materials, stacks_for_code)
from .experiments import RunSpec
from .forecast import CASES, IDEAL, PenaltyData
from .heatpump import HeatPumpSpec, size_from_heat_loss
from .mpc import ComfortSchedule, MpcConfig, SimulationData, default_slack_penalty
from .thermal import FLOOR, RADIATOR, build_continuous, discretize


class ConfigError(ValueError):
    """Invalid scenario configuration."""


class DataError(ValueError):
    """Invalid or incomplete input data."""


def load_timeseries(path: str | Path) -> pd.Series:
    """Hourly (time, value) CSV with strictly increasing timestamps.

    Gaps are tolerated but reported on the returned series via the
    ``gaps`` attribute; duplicates and non-monotone rows are errors with
    the offending line number.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    try:
        frame = pd.read_csv(path)
    except Exception as exc:
        raise DataError(f"{path}: {exc}") from exc
    if list(frame.columns[:2]) != ["time", "value"]:
        raise DataError(f"{path}: expected columns (time, value)")
    times = pd.to_datetime(frame["time"], utc=False)
    for i in range(1, len(times)):
        if times[i] == times[i - 1]:
            raise DataError(f"{path}: duplicate timestamp at line {i + 2}")
        if times[i] < times[i - 1]:
            raise DataError(f"{path}: non-monotone timestamp at line {i + 2}")
    series = pd.Series(frame["value"].to_numpy(dtype=float),
                       index=pd.DatetimeIndex(times))
    if len(series) > 1:
        expected = pd.date_range(series.index[0], series.index[-1], freq="h")
        gaps = expected.difference(series.index)
        series.attrs["gaps"] = [str(t) for t in gaps]
    else:
        series.attrs["gaps"] = []
    return series


_KNOWN_KEYS = {
    "building", "heating", "code_year", "concrete_mm",
    "length_m", "width_m", "height_m", "window_to_wall", "door_to_wall",
    "hp_p_max_kw", "hp_eta", "hp_supply_c",
    "horizon_steps", "case", "slack_penalty",
    "comfort_day_c", "comfort_night_c", "comfort_max_c",
    "timezone_offset_hours", "psi_s",
    "lambda_realized_csv", "lambda_forecast_csv",
    "temperature_csv", "solar_csv",
    "materials_csv", "codes_csv",
}

_DEFAULTS = {
    "building": "family",
    "heating": "floor",
    "code_year": "2018",
    "concrete_mm": "50",
    "hp_eta": "0.5",
    "hp_supply_c": "40",
    "horizon_steps": "24",
    "case": "ideal",
    "comfort_day_c": "20",
    "comfort_night_c": "18",
    "comfort_max_c": "24",
    "timezone_offset_hours": "1",
    "psi_s": "0.1",
}


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario file; raw values plus the resolved file paths."""

    values: dict[str, str]
    base_dir: Path

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.values.get(key, _DEFAULTS.get(key, default))

    def get_float(self, key: str, default: str | None = None) -> float:
        raw = self.get(key, default)
        if raw is None:
            raise ConfigError(f"missing required key {key!r}")
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: not a number: {raw!r}") from exc

    def path(self, key: str) -> Path | None:
        raw = self.values.get(key)
        if raw is None:
            return None
        p = Path(raw)
        return p if p.is_absolute() else self.base_dir / p


def parse_scenario(path: str | Path) -> Scenario:
    """Strict key = value parser; '#' starts a comment."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: scenario file not found")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return Scenario(values=values, base_dir=path.parent)


@dataclass(frozen=True)
class BuiltScenario:
    """Everything derived from a scenario: model, data, controller config."""

    scenario: Scenario
    geometry: BuildingGeometry
    params: EnvelopeParams
    hp: HeatPumpSpec
    schedule: ComfortSchedule
    cfg: MpcConfig
    system: str
    building: str
    sizing: dict[str, float]
    data: SimulationData | None = None


def _geometry_for(scenario: Scenario) -> tuple[str, BuildingGeometry]:
    building = scenario.get("building")
    if building == "family":
        return building, FAMILY_HOUSE
    if building == "office":
        return building, OFFICE
    if building == "custom":
        return building, geometry_from_footprint(
            scenario.get_float("length_m"),
            scenario.get_float("width_m"),
            scenario.get_float("height_m", "2.5"),
            scenario.get_float("window_to_wall", "0.11"),
            scenario.get_float("door_to_wall", "0.04"),
        )
    raise ConfigError(f"unknown building {building!r}")


def _schedule_for(scenario: Scenario, building: str) -> ComfortSchedule:
    day = scenario.get_float("comfort_day_c")
    night = scenario.get_float("comfort_night_c")
    t_max = scenario.get_float("comfort_max_c")
    night_hours = ([18, 19, 20, 21, 22, 23, 0, 1, 2, 3, 4, 5, 6]
                   if building == "office" else [23, 0, 1, 2, 3, 4])
    return ComfortSchedule.from_setback(day, night, night_hours, t_max=t_max)


def build_scenario(scenario: Scenario, load_data: bool = True,
                   lam_max_hint: float | None = None) -> BuiltScenario:
    """Resolve a scenario into model parameters, heat pump and data."""
    building, geometry = _geometry_for(scenario)
    system = scenario.get("heating")
    if system not in (RADIATOR, FLOOR):
        raise ConfigError(f"unknown heating system {system!r}")

    materials = load_materials(scenario.path("materials_csv"))
    codes = load_building_codes(scenario.path("codes_csv"))
    year = scenario.get("code_year")
    if year not in codes:
        raise ConfigError(f"code year {year!r} not in the building-code table")
    code = codes[year]

    concrete_m = scenario.get_float("concrete_mm") / 1000.0
    stacks = stacks_for_code(materials, code, concrete_m=concrete_m)
    window_u, window_g = code.window_props()
    params = derive_params(geometry, stacks, window_u, code.u_door)

    sizing = size_from_heat_loss(
        geometry,
        {"wall": code.u_wall, "roof": code.u_roof,
         "window": window_u, "door": code.u_door},
        T_hot=scenario.get_float("hp_supply_c"),
        eta=scenario.get_float("hp_eta"),
    )
    p_max = (scenario.get_float("hp_p_max_kw")
             if "hp_p_max_kw" in scenario.values else sizing["P_max"])
    hp = HeatPumpSpec(P_max=p_max, T_hot=scenario.get_float("hp_supply_c"),
                      eta=scenario.get_float("hp_eta"))

    schedule = _schedule_for(scenario, building)

    data = None
    lam_max = lam_max_hint or 1.0
    if load_data:
        lam_path = scenario.path("lambda_realized_csv")
        ta_path = scenario.path("temperature_csv")
        solar_path = scenario.path("solar_csv")
        if not (lam_path and ta_path and solar_path):
            raise ConfigError(
                "lambda_realized_csv, temperature_csv and solar_csv are required")
        lam = load_timeseries(lam_path)
        ta = load_timeseries(ta_path)
        solar = load_timeseries(solar_path)
        common = lam.index.intersection(ta.index).intersection(solar.index)
        if len(common) == 0:
            raise DataError("input series share no timestamps")
        forecasts = None
        fc_path = scenario.path("lambda_forecast_csv")
        if fc_path is not None:
            frame = pd.read_csv(fc_path)
            frame["valid_time"] = pd.to_datetime(frame["valid_time"])
            forecasts = frame
        gain = solar.loc[common].to_numpy() * window_g * geometry.window_area
        data = SimulationData(
            time=pd.DatetimeIndex(common),
            T_a=ta.loc[common].to_numpy(),
            solar_gain=gain,
            penalties=PenaltyData(realized=lam, forecasts=forecasts),
            tz_offset_hours=int(scenario.get_float("timezone_offset_hours")),
        )
        lam_max = float(lam.max())

    cfg = MpcConfig(
        N=int(scenario.get_float("horizon_steps")),
        p_v=(scenario.get_float("slack_penalty")
             if "slack_penalty" in scenario.values
             else default_slack_penalty(lam_max, hp.P_max)),
        case=_validated_case(scenario.get("case")),
    )
    return BuiltScenario(scenario=scenario, geometry=geometry, params=params,
                         hp=hp, schedule=schedule, cfg=cfg, system=system,
                         building=building, sizing=sizing, data=data)


def _validated_case(case: str) -> str:
    if case not in CASES:
        raise ConfigError(f"unknown forecast case {case!r}")
    return case


def run_spec_from(built: BuiltScenario, psi_s: float | None = None) -> RunSpec:
    """Discretized model plus run inputs for the experiment layer."""
    if built.data is None:
        raise ConfigError("scenario was built without data")
    psi = psi_s if psi_s is not None else built.scenario.get_float("psi_s")
    model = discretize(build_continuous(built.params, built.system, psi_s=psi))
    return RunSpec(model=model, data=built.data, schedule=built.schedule,
                   hp=built.hp, cfg=built.cfg, system=built.system,
                   building=built.building)
