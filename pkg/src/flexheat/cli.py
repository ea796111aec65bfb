"""Command-line surface.

Usage: flexheat <subcommand> [scenario] [options].  Exit codes: 0 success,
2 configuration error, 3 data error.  Flags can also be set through
environment variables with the FLEXHEAT_ prefix (e.g. FLEXHEAT_OUT_DIR).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from . import experiments, fixtures
from .forecast import CASES, SmoothingConfig, forecast_points_from_frame, smooth_series
from .mpc import MpcConfig
from .scenario import (ConfigError, DataError, build_scenario, parse_scenario,
                       run_spec_from)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def _env_default(name: str, fallback):
    return os.environ.get(f"FLEXHEAT_{name.upper().replace('-', '_')}", fallback)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexheat",
        description="Heat-pump building simulation with emission-aware MPC")
    parser.add_argument("--out-dir", default=_env_default("out_dir", "out"),
                        help="directory for output tables")
    parser.add_argument("--workers", type=int,
                        default=int(_env_default("workers", "1")))
    parser.add_argument("--seed", type=int,
                        default=int(_env_default("seed", str(fixtures.DEFAULT_SEED))),
                        help="seed for fixture generation commands")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", help="scenario file")
        return p

    scenario_cmd("simulate", "one closed-loop run per requested case")
    p = scenario_cmd("sweep-horizon", "savings vs. control horizon")
    p.add_argument("--horizons", default="2,4,8,12,24",
                   help="comma-separated horizon list")
    p = scenario_cmd("sweep-heatpump", "savings vs. heat pump size")
    p.add_argument("--p-max", default="0.5,1,2,4,8",
                   help="comma-separated electrical capacities, kW")
    p = scenario_cmd("sweep-codes", "savings vs. building code and concrete")
    p.add_argument("--years", default="1977,1979,2008,2018,Rockwool")
    p.add_argument("--concrete-mm", default="10,50,100,200")
    scenario_cmd("profile", "mean load and penalty per hour of day")
    scenario_cmd("derive-params", "print RC parameters and heat pump sizing")

    p = sub.add_parser("smooth-forecast",
                       help="kernel-smooth a (valid_time,horizon_h,value) CSV")
    p.add_argument("forecast_csv")
    p.add_argument("--bandwidth", type=float, default=7.0)
    p.add_argument("--decay", type=float, default=1.5)
    p.add_argument("--df", type=int, default=7)
    p.add_argument("--nonnegative", action="store_true")

    p = sub.add_parser("make-fixtures", help="write the synthetic fixture CSVs")
    p.add_argument("--hours", type=int, default=fixtures.DEFAULT_HOURS)
    return parser


def _parse_list(text: str, cast):
    return [cast(x) for x in text.split(",") if x.strip()]


def _cmd_derive_params(args) -> int:
    built = build_scenario(parse_scenario(args.scenario), load_data=False)
    p = built.params
    print(f"building:  {built.building}  ({built.system} heating)")
    print(f"R_ea  {p.R_ea:8.3f} K/kW")
    print(f"R_ie  {p.R_ie:8.3f} K/kW")
    print(f"R_fi  {p.R_fi:8.3f} K/kW")
    print(f"C_e   {p.C_e:8.3f} kWh/K")
    print(f"C_f   {p.C_f:8.3f} kWh/K")
    print(f"C_i   {p.C_i:8.3f} kWh/K")
    print(f"Q_loss {built.sizing['Q_loss']:7.3f} kW   "
          f"P_max {built.sizing['P_max']:6.3f} kW")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    built = build_scenario(parse_scenario(args.scenario))
    spec = run_spec_from(built)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(built.data.time) <= spec.cfg.N:
        (out_dir / "trajectory.csv").write_text(
            "time,T_i,T_f,T_e,heat_kw,power_kw,slack_degC,lambda\n")
        print("empty period; wrote empty trajectory")
        return EXIT_OK
    result = experiments.run_case(spec)
    frame = result.to_frame()
    frame.to_csv(out_dir / f"trajectory_{spec.cfg.case}.csv", index=False)
    emis = experiments.total_emissions(result, spec.cfg.N)
    print(f"case={spec.cfg.case} N={spec.cfg.N} "
          f"energy={result.energy_kwh:.1f} kWh emissions={emis:.1f} kg "
          f"slack_hours={result.slack_hours:.0f}")
    return EXIT_OK


def _cmd_sweep_horizon(args) -> int:
    built = build_scenario(parse_scenario(args.scenario))
    spec = run_spec_from(built)
    table = experiments.sweep_horizon(spec, _parse_list(args.horizons, int),
                                      workers=args.workers)
    path = experiments.write_outputs(table, args.out_dir, "sweep_horizon")
    print(table.to_string(index=False))
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_sweep_heatpump(args) -> int:
    built = build_scenario(parse_scenario(args.scenario))
    spec = run_spec_from(built)
    table = experiments.sweep_heatpump(spec, _parse_list(args.p_max, float),
                                       workers=args.workers)
    path = experiments.write_outputs(table, args.out_dir, "sweep_heatpump")
    print(table.to_string(index=False))
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_sweep_codes(args) -> int:
    scenario = parse_scenario(args.scenario)

    def make_spec(year: str, concrete_m: float):
        values = dict(scenario.values)
        values["code_year"] = year
        values["concrete_mm"] = str(concrete_m * 1000.0)
        built = build_scenario(replace(scenario, values=values))
        return run_spec_from(built)

    table = experiments.sweep_codes(make_spec, _parse_list(args.years, str),
                                    _parse_list(args.concrete_mm, float),
                                    workers=args.workers)
    path = experiments.write_outputs(table, args.out_dir, "sweep_codes")
    print(table.to_string(index=False))
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_profile(args) -> int:
    built = build_scenario(parse_scenario(args.scenario))
    spec = run_spec_from(built)
    result = experiments.run_case(spec)
    profile = experiments.hourly_load_profile([result])
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    profile.to_csv(out_dir / "load_profile.csv", index=False)
    print(profile.to_string(index=False))
    return EXIT_OK


def _cmd_smooth_forecast(args) -> int:
    frame = pd.read_csv(args.forecast_csv)
    frame["valid_time"] = pd.to_datetime(frame["valid_time"])
    points = forecast_points_from_frame(frame)
    config = SmoothingConfig(a=args.decay, b=args.bandwidth, df=args.df,
                             clamp_nonnegative=args.nonnegative)
    smoothed = smooth_series(points, config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = smoothed.reset_index()
    out.columns = ["time", "value"]
    out.to_csv(out_dir / "smoothed.csv", index=False)
    print(f"wrote {out_dir / 'smoothed.csv'} ({len(out)} rows)")
    return EXIT_OK


def _cmd_make_fixtures(args) -> int:
    paths = fixtures.write_fixture_csvs(args.out_dir, hours=args.hours,
                                        seed=args.seed)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep-horizon": _cmd_sweep_horizon,
    "sweep-heatpump": _cmd_sweep_heatpump,
    "sweep-codes": _cmd_sweep_codes,
    "profile": _cmd_profile,
    "derive-params": _cmd_derive_params,
    "smooth-forecast": _cmd_smooth_forecast,
    "make-fixtures": _cmd_make_fixtures,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
