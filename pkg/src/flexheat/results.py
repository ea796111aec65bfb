"""Closed-loop run records shared by the controller and the experiment layer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class RunResult:
    """Per-step trajectory of one closed-loop run plus simple totals."""

    time: pd.DatetimeIndex
    T_i: np.ndarray
    T_f: np.ndarray
    T_e: np.ndarray
    heat: np.ndarray      # delivered heat, kW
    power: np.ndarray     # electrical power, kW
    slack: np.ndarray     # planned comfort slack, degC
    lam: np.ndarray       # realized penalty at each step

    def __len__(self) -> int:
        return len(self.time)

    @property
    def energy_kwh(self) -> float:
        return float(np.sum(self.power))

    @property
    def slack_hours(self) -> float:
        return float(np.count_nonzero(self.slack > 1e-6))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "time": self.time,
            "T_i": self.T_i,
            "T_f": self.T_f,
            "T_e": self.T_e,
            "heat_kw": self.heat,
            "power_kw": self.power,
            "slack_degC": self.slack,
            "lambda": self.lam,
        })

    def tail_trimmed(self, n_steps: int) -> "RunResult":
        """First ``n_steps`` records (the emission evaluation window)."""
        sl = slice(0, n_steps)
        return RunResult(self.time[sl], self.T_i[sl], self.T_f[sl], self.T_e[sl],
                         self.heat[sl], self.power[sl], self.slack[sl], self.lam[sl])
