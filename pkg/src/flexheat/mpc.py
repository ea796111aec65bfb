"""Receding-horizon controller: LP assembly, planning and closed-loop runs.

Decision variables are the per-step *delivered heat* q_s >= 0 and comfort
slack v_s >= 0 over the horizon.  The dynamics are condensed by forward
substitution, so only (q, v) appear in the LP.  The power bound and the
penalty weighting convert heat back to electrical power through the
ambient-dependent COP, which keeps the objective identical to the
power-formulated program while the discrete model stays time-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import lp as lp_mod
from .forecast import CASES, IDEAL, REAL, TRIVIAL, PenaltyData, penalty_for_case
from .heatpump import HeatPumpSpec
from .lp import LinearProgram, LpSolution
from .results import RunResult
from .thermal import BuildingState, DiscreteModel, Disturbance, step


class HorizonError(ValueError):
    """Horizon / data-length mismatch in the LP assembly."""


class DataCoverageError(ValueError):
    """Realized series do not cover the simulation period plus horizon."""


@dataclass(frozen=True)
class ComfortSchedule:
    """Hour-of-day comfort band in local time."""

    t_min: np.ndarray     # (24,)
    t_max: np.ndarray     # (24,)

    def __post_init__(self):
        t_min = np.asarray(self.t_min, dtype=float)
        t_max = np.asarray(self.t_max, dtype=float)
        object.__setattr__(self, "t_min", t_min)
        object.__setattr__(self, "t_max", t_max)
        if t_min.shape != (24,) or t_max.shape != (24,):
            raise ValueError("comfort schedules need 24 hourly values")
        if np.any(t_min >= t_max):
            raise ValueError("t_min must stay below t_max at every hour")

    @staticmethod
    def from_setback(day_c: float, night_c: float,
                     night_hours: list[int], t_max: float = 24.0) -> "ComfortSchedule":
        t_min = np.full(24, day_c)
        t_min[night_hours] = night_c
        return ComfortSchedule(t_min=t_min, t_max=np.full(24, t_max))

    @staticmethod
    def family_house() -> "ComfortSchedule":
        # nightly setback 23:00-05:00 local
        return ComfortSchedule.from_setback(20.0, 18.0, [23, 0, 1, 2, 3, 4])

    @staticmethod
    def office() -> "ComfortSchedule":
        # setback 18:00-07:00 local
        return ComfortSchedule.from_setback(
            20.0, 18.0, [18, 19, 20, 21, 22, 23, 0, 1, 2, 3, 4, 5, 6])

    def bounds_at(self, local_hours: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(local_hours, dtype=int) % 24
        return self.t_min[idx], self.t_max[idx]


@dataclass(frozen=True)
class MpcConfig:
    N: int                      # horizon steps
    p_v: float                  # slack penalty per (degC * step)
    case: str = IDEAL

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("horizon must be >= 1")
        if self.p_v <= 0:
            raise ValueError("slack penalty must be > 0")
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}")


def default_slack_penalty(lam_max: float, p_max_kw: float) -> float:
    """Slack weight dominating any achievable emission saving."""
    return 1e3 * lam_max * p_max_kw


@dataclass(frozen=True)
class CondensedDynamics:
    """Horizon-independent pieces of the condensed LP, reusable across steps."""

    model: DiscreteModel
    N: int
    G: np.ndarray          # (N, N) lower-triangular response of T_i to heat
    powers: np.ndarray     # (N + 1, 3, 3) A_d^k

    @staticmethod
    def build(model: DiscreteModel, N: int) -> "CondensedDynamics":
        powers = np.empty((N + 1, 3, 3))
        powers[0] = np.eye(3)
        for k in range(1, N + 1):
            powers[k] = powers[k - 1] @ model.A_d
        G = np.zeros((N, N))
        c_row = np.array([1.0, 0.0, 0.0])
        for s in range(N):
            for j in range(s + 1):
                G[s, j] = c_row @ powers[s - j] @ model.B_d
        return CondensedDynamics(model=model, N=N, G=G, powers=powers)

    def free_response(self, x0: np.ndarray, d: np.ndarray) -> np.ndarray:
        """T_i of states 1..N with zero heating; d is (N, 2)."""
        out = np.empty(self.N)
        x = x0
        for s in range(self.N):
            x = self.model.A_d @ x + self.model.E_d @ d[s]
            out[s] = x[0]
        return out


@dataclass(frozen=True)
class Plan:
    heat: np.ndarray      # kW delivered per step
    power: np.ndarray     # kW electrical per step
    slack: np.ndarray
    objective: float


def assemble(model: DiscreteModel, x_t: BuildingState, lam: np.ndarray,
             d_forecast: np.ndarray, t_min: np.ndarray, t_max: np.ndarray,
             hp: HeatPumpSpec, cfg: MpcConfig,
             dyn: CondensedDynamics | None = None) -> LinearProgram:
    """Condensed LP over the horizon.

    ``d_forecast`` is (N, 2) with columns (T_a, solar gain kW); comfort
    bounds apply to the N successor states.
    """
    N = cfg.N
    lam = np.asarray(lam, dtype=float)
    d_forecast = np.asarray(d_forecast, dtype=float).reshape(-1, 2)
    if lam.size != N or d_forecast.shape[0] != N or len(t_min) != N or len(t_max) != N:
        raise HorizonError(
            f"horizon {N} but lam={lam.size}, d={d_forecast.shape[0]}, "
            f"t_min={len(t_min)}, t_max={len(t_max)}")
    if dyn is None or dyn.N != N:
        dyn = CondensedDynamics.build(model, N)

    free = dyn.free_response(x_t.as_array(), d_forecast)
    cops = np.array([hp.cop_at(ta) for ta in d_forecast[:, 0]])

    # variables: q_0..q_{N-1}, v_0..v_{N-1}
    eye = np.eye(N)
    A_ub = np.vstack([
        np.hstack([-dyn.G, -eye]),    # T_min_s - v_s <= T_i(s+1)
        np.hstack([dyn.G, -eye]),     # T_i(s+1) - v_s <= T_max_s
    ])
    b_ub = np.concatenate([free - t_min, t_max - free])
    c = np.concatenate([lam / cops, np.full(N, cfg.p_v)])
    bounds = tuple((0.0, cops[s] * hp.P_max) for s in range(N)) \
        + tuple((0.0, None) for _ in range(N))
    return LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub, bounds=bounds)


def plan(model: DiscreteModel, x_t: BuildingState, lam: np.ndarray,
         d_forecast: np.ndarray, t_min: np.ndarray, t_max: np.ndarray,
         hp: HeatPumpSpec, cfg: MpcConfig,
         dyn: CondensedDynamics | None = None) -> Plan:
    """Assemble and solve; slack keeps the LP feasible by construction."""
    program = assemble(model, x_t, lam, d_forecast, t_min, t_max, hp, cfg, dyn)
    sol = lp_mod.solve(program)
    if sol.status != lp_mod.OPTIMAL:
        raise RuntimeError(f"MPC subproblem unexpectedly {sol.status}")
    N = cfg.N
    heat = sol.x[:N]
    cops = np.array([hp.cop_at(ta) for ta in np.asarray(d_forecast).reshape(-1, 2)[:, 0]])
    return Plan(heat=heat, power=heat / cops, slack=sol.x[N:], objective=sol.objective)


def trivial_controller(model: DiscreteModel, x_t: BuildingState,
                       d_next: Disturbance, t_min: float, t_max: float,
                       hp: HeatPumpSpec, p_v: float) -> Plan:
    """One-step minimum-heat plan holding the next state above T_min."""
    cfg = MpcConfig(N=1, p_v=p_v, case=TRIVIAL)
    return plan(model, x_t, np.array([1.0]), d_next.as_array()[None, :],
                np.array([t_min]), np.array([t_max]), hp, cfg)


@dataclass(frozen=True)
class SimulationData:
    """Hourly realized series driving a closed-loop run."""

    time: pd.DatetimeIndex
    T_a: np.ndarray
    solar_gain: np.ndarray       # kW through the windows (already scaled)
    penalties: PenaltyData
    tz_offset_hours: int = 1     # comfort schedules are local time

    def __post_init__(self):
        n = len(self.time)
        if len(self.T_a) != n or len(self.solar_gain) != n:
            raise DataCoverageError("weather series lengths differ from the index")

    @property
    def local_hours(self) -> np.ndarray:
        return (self.time.hour.to_numpy() + self.tz_offset_hours) % 24

    def disturbances(self) -> np.ndarray:
        return np.column_stack([self.T_a, self.solar_gain])


def closed_loop(model: DiscreteModel, data: SimulationData,
                schedule: ComfortSchedule, hp: HeatPumpSpec, cfg: MpcConfig,
                x0: BuildingState | None = None,
                n_steps: int | None = None) -> RunResult:
    """Receding-horizon simulation over ``n_steps`` hours.

    At each hour the controller plans over N future steps (trivial case:
    one step with unit penalty), applies the first action, and the state
    advances with the *realized* disturbances.  The data must cover the
    period plus the horizon.
    """
    N = cfg.N
    total = len(data.time)
    if n_steps is None:
        n_steps = total - N
    if n_steps < 0 or n_steps + N > total:
        raise DataCoverageError(
            f"need {n_steps + N} hours of data, have {total}")

    d_all = data.disturbances()
    local = data.local_hours
    if x0 is None:
        t_min0, _ = schedule.bounds_at(np.array([local[0]]))
        x0 = BuildingState.uniform(float(t_min0[0]))

    horizon = 1 if cfg.case == TRIVIAL else N
    dyn = CondensedDynamics.build(model, horizon)
    sub_cfg = MpcConfig(N=horizon, p_v=cfg.p_v, case=cfg.case)

    realized = data.penalties.realized
    aligned = realized.reindex(data.time)
    if aligned.isna().any():
        missing = data.time[aligned.isna().to_numpy()]
        raise DataCoverageError(f"realized penalties missing at {list(missing[:5])}")
    lam_all = aligned.to_numpy()

    x = x0
    T = np.empty((n_steps, 3))
    heat = np.empty(n_steps)
    power = np.empty(n_steps)
    slack = np.empty(n_steps)
    for t in range(n_steps):
        d_slice = d_all[t:t + horizon]
        hours = local[t + 1:t + 1 + horizon]
        t_min, t_max = schedule.bounds_at(hours)
        # Action s of this plan runs during hour t+s, so its cost carries
        # lambda_{t+s}; forecasts for the real case are those already issued.
        if cfg.case == TRIVIAL:
            lam = np.ones(1)
        elif cfg.case == IDEAL:
            lam = lam_all[t:t + horizon]
        else:
            lam = penalty_for_case(
                cfg.case, data.time[t] - pd.Timedelta(hours=1), horizon,
                data.penalties)
        p = plan(model, x, lam, d_slice, t_min, t_max, hp, sub_cfg, dyn)
        q = float(p.heat[0])
        T[t] = x.as_array()
        heat[t] = q
        power[t] = float(p.power[0])
        slack[t] = float(p.slack[0])
        x = step(model, x, q, Disturbance(d_all[t, 0], d_all[t, 1]))

    return RunResult(time=data.time[:n_steps], T_i=T[:, 0], T_f=T[:, 1],
                     T_e=T[:, 2], heat=heat, power=power, slack=slack,
                     lam=lam_all[:n_steps])
