"""Emission accounting, savings metric, parameter sweeps and load profiles."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd

from . import mpc as mpc_mod
from .forecast import IDEAL, REAL, TRIVIAL
from .heatpump import HeatPumpSpec
from .mpc import ComfortSchedule, MpcConfig, SimulationData, closed_loop
from .results import RunResult
from .thermal import DiscreteModel

BURN_IN_HOURS = 48

SWEEP_COLUMNS = ["sweep_param", "case", "system", "building",
                 "savings", "emissions_kg", "energy_kwh", "slack_hours"]


class WindowError(ValueError):
    """Emission window n - N is empty."""


def total_emissions(result: RunResult, N: int) -> float:
    """Total emissions over steps 1 .. n-N, kg CO2-eq (power kW, lam kg/MWh)."""
    n = len(result)
    if n <= N:
        raise WindowError(f"run of {n} steps cannot drop a horizon of {N}")
    window = slice(0, n - N)
    return float(np.sum(result.power[window] * result.lam[window]) / 1000.0)


def savings(trivial_emissions: float, case_emissions: float) -> float:
    """Relative emission saving against the trivial baseline; may be negative."""
    if trivial_emissions == 0:
        raise ZeroDivisionError("trivial baseline emissions are zero")
    return (trivial_emissions - case_emissions) / trivial_emissions


def hourly_load_profile(results: list[RunResult]) -> pd.DataFrame:
    """Mean power and penalty per hour of day across all runs and days."""
    if not results or all(len(r) < 24 for r in results):
        raise ValueError("need at least one full day of records")
    frames = [pd.DataFrame({"hour": r.time.hour, "power_kw": r.power,
                            "lambda": r.lam}) for r in results]
    merged = pd.concat(frames, ignore_index=True)
    profile = merged.groupby("hour", as_index=False).mean()
    return profile.rename(columns={"power_kw": "mean_power_kw",
                                   "lambda": "mean_lambda"})


@dataclass(frozen=True)
class RunSpec:
    """Everything needed to simulate one sweep cell."""

    model: DiscreteModel
    data: SimulationData
    schedule: ComfortSchedule
    hp: HeatPumpSpec
    cfg: MpcConfig
    system: str = "floor"
    building: str = "family"
    burn_in: int = BURN_IN_HOURS


def run_case(spec: RunSpec) -> RunResult:
    """Closed-loop run with the burn-in stripped from the records."""
    result = closed_loop(spec.model, spec.data, spec.schedule, spec.hp, spec.cfg)
    if spec.burn_in:
        sl = slice(spec.burn_in, None)
        result = RunResult(result.time[sl], result.T_i[sl], result.T_f[sl],
                           result.T_e[sl], result.heat[sl], result.power[sl],
                           result.slack[sl], result.lam[sl])
    return result


def evaluate(spec: RunSpec, trivial_result: RunResult | None = None
             ) -> dict[str, float]:
    """Emissions, energy and savings of one cell against its trivial baseline."""
    result = run_case(spec)
    if trivial_result is None:
        trivial_result = run_case(replace(spec, cfg=MpcConfig(
            N=1, p_v=spec.cfg.p_v, case=TRIVIAL)))
    emis = total_emissions(result, spec.cfg.N)
    emis_trivial = total_emissions(trivial_result, spec.cfg.N)
    return {
        "savings": savings(emis_trivial, emis),
        "emissions_kg": emis,
        "energy_kwh": result.energy_kwh,
        "slack_hours": result.slack_hours,
    }


def _cell_row(spec: RunSpec, sweep_param, trivial_result=None) -> dict:
    row = {"sweep_param": sweep_param, "case": spec.cfg.case,
           "system": spec.system, "building": spec.building}
    row.update(evaluate(spec, trivial_result))
    return row


def _run_cells(cells: list[tuple[RunSpec, object]],
               workers: int = 1) -> pd.DataFrame:
    """Run sweep cells (optionally in parallel) in deterministic order."""
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cell_row, [c[0] for c in cells],
                                 [c[1] for c in cells]))
    else:
        rows = [_cell_row(spec, param) for spec, param in cells]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def sweep_horizon(base: RunSpec, horizons: list[int], cases: list[str] | None = None,
                  workers: int = 1) -> pd.DataFrame:
    """Savings per (horizon, case); one closed-loop run per cell."""
    cases = cases or [base.cfg.case]
    cells = []
    for N in horizons:
        if not (1 <= N <= 48):
            raise ValueError(f"horizon {N} outside [1, 48]")
        for case in cases:
            cfg = MpcConfig(N=N, p_v=base.cfg.p_v, case=case)
            cells.append((replace(base, cfg=cfg), N))
    return _run_cells(cells, workers)


def sweep_heatpump(base: RunSpec, p_max_list: list[float],
                   workers: int = 1) -> pd.DataFrame:
    """Savings per electrical capacity; everything else fixed."""
    cells = []
    for p_max in p_max_list:
        hp = HeatPumpSpec(P_max=p_max, T_hot=base.hp.T_hot, eta=base.hp.eta)
        cells.append((replace(base, hp=hp), p_max))
    return _run_cells(cells, workers)


def sweep_codes(make_spec, code_years: list[str], concrete_mm: list[float],
                workers: int = 1) -> pd.DataFrame:
    """Savings per (code year, floor concrete thickness).

    ``make_spec(code_year, concrete_m)`` rebuilds the cell's RunSpec: it
    re-derives the envelope through the code's insulation targets and
    re-sizes the heat pump.  Infeasible cells are recorded and skipped.
    """
    cells = []
    failures = []
    for year in code_years:
        for mm in concrete_mm:
            if mm <= 0:
                raise ValueError("concrete thickness must be > 0")
            try:
                spec = make_spec(year, mm / 1000.0)
            except Exception as exc:  # infeasible insulation target etc.
                failures.append({"sweep_param": f"{year}/{mm}mm", "error": str(exc)})
                continue
            cells.append((spec, f"{year}/{mm}mm"))
    table = _run_cells(cells, workers)
    for failure in failures:
        table = pd.concat([table, pd.DataFrame([{**failure, "case": "failed"}])],
                          ignore_index=True)
    return table


def write_outputs(table: pd.DataFrame, out_dir: str | Path, name: str) -> Path:
    """Long-format CSV plus a JSON summary next to it."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    table.to_csv(csv_path, index=False)
    numeric = table.select_dtypes("number")
    summary = {
        "rows": int(len(table)),
        "columns": list(table.columns),
        "savings_min": float(numeric["savings"].min()) if "savings" in numeric else None,
        "savings_max": float(numeric["savings"].max()) if "savings" in numeric else None,
    }
    (out_dir / f"{name}.json").write_text(json.dumps(summary, indent=2))
    return csv_path
