"""Three-state RC thermal model: continuous form, discretization, simulation.

State order is fixed as (T_i, T_f, T_e): interior air, floor mass, inner
envelope mass.  Time unit is hours, heat input is delivered heat in kW
(the electrical-power conversion through the COP lives in the controller,
keeping the discrete model time-invariant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envelope import EnvelopeParams

STATE_NAMES = ("T_i", "T_f", "T_e")

RADIATOR = "radiator"
FLOOR = "floor"


@dataclass(frozen=True)
class BuildingState:
    T_i: float
    T_f: float
    T_e: float

    def __post_init__(self):
        if not all(np.isfinite([self.T_i, self.T_f, self.T_e])):
            raise ValueError("building state must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.T_i, self.T_f, self.T_e])

    @staticmethod
    def from_array(x: np.ndarray) -> "BuildingState":
        return BuildingState(float(x[0]), float(x[1]), float(x[2]))

    @staticmethod
    def uniform(temperature: float) -> "BuildingState":
        return BuildingState(temperature, temperature, temperature)


@dataclass(frozen=True)
class Disturbance:
    """Ambient temperature (degC) and solar gain through the windows (kW)."""

    T_a: float
    solar_gain: float = 0.0

    def __post_init__(self):
        if self.solar_gain < 0:
            raise ValueError("solar gain must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.T_a, self.solar_gain])


@dataclass(frozen=True)
class ContinuousModel:
    """dx/dt = A x + B q + E d with x = (T_i, T_f, T_e), q in kW."""

    A: np.ndarray        # (3, 3), 1/h
    B: np.ndarray        # (3,)
    E: np.ndarray        # (3, 2) columns (T_a, solar_gain)
    C_out: np.ndarray    # (3,) output selector, picks T_i


@dataclass(frozen=True)
class DiscreteModel:
    A_d: np.ndarray      # (3, 3)
    B_d: np.ndarray      # (3,)
    E_d: np.ndarray      # (3, 2)
    dt: float            # hours


def build_continuous(params: EnvelopeParams, system: str,
                     psi_s: float = 0.1, gA: float = 1.0) -> ContinuousModel:
    """RC network matrices for a radiator or floor-heating building.

    ``psi_s`` is the fraction of window solar gain deposited directly in
    the interior node (the rest lands in the floor); radiators deposit all
    heat in the interior node, floor heating all of it in the floor node.
    ``gA`` scales the raw solar disturbance (glazing factor times window
    area) when the input series is irradiance rather than gain.
    """
    if not (0.0 <= psi_s <= 1.0):
        raise ValueError("psi_s must lie in [0, 1]")
    if system not in (RADIATOR, FLOOR):
        raise ValueError(f"unknown heating system {system!r}")
    psi_h = 1.0 if system == RADIATOR else 0.0

    R_fi, R_ie, R_ea = params.R_fi, params.R_ie, params.R_ea
    C_i, C_f, C_e = params.C_i, params.C_f, params.C_e

    A = np.array([
        [-(1.0 / R_fi + 1.0 / R_ie) / C_i, 1.0 / (C_i * R_fi), 1.0 / (C_i * R_ie)],
        [1.0 / (C_f * R_fi), -1.0 / (C_f * R_fi), 0.0],
        [1.0 / (C_e * R_ie), 0.0, -(1.0 / R_ie + 1.0 / R_ea) / C_e],
    ])
    B = np.array([psi_h / C_i, (1.0 - psi_h) / C_f, 0.0])
    E = np.array([
        [0.0, gA * psi_s / C_i],
        [0.0, gA * (1.0 - psi_s) / C_f],
        [1.0 / (C_e * R_ea), 0.0],
    ])
    C_out = np.array([1.0, 0.0, 0.0])
    return ContinuousModel(A=A, B=B, E=E, C_out=C_out)


def _expm(M: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring of the truncated series."""
    norm = np.linalg.norm(M, ord=np.inf)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    Ms = M / (2.0 ** squarings)
    n = M.shape[0]
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 60):
        term = term @ Ms / k
        result = result + term
        if np.max(np.abs(term)) < tol:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def discretize(model: ContinuousModel, dt: float = 1.0) -> DiscreteModel:
    """Zero-order-hold discretization over ``dt`` hours.

    Uses the augmented-matrix exponential, so no inversion of A is needed
    and singular A (e.g. the lossless limit) is handled exactly.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    BE = np.column_stack([model.B, model.E])    # (3, 3)
    n, m = BE.shape
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = model.A * dt
    aug[:n, n:] = BE * dt
    phi = _expm(aug)
    A_d = phi[:n, :n]
    BE_d = phi[:n, n:]
    return DiscreteModel(A_d=A_d, B_d=BE_d[:, 0], E_d=BE_d[:, 1:], dt=dt)


def step(model: DiscreteModel, state: BuildingState, heat: float,
         d: Disturbance) -> BuildingState:
    """One discrete simulation step; ``heat`` is delivered heat in kW."""
    if heat < 0:
        raise ValueError("heat must be >= 0")
    x = model.A_d @ state.as_array() + model.B_d * heat + model.E_d @ d.as_array()
    return BuildingState.from_array(x)


def steady_state(model: ContinuousModel, heat: float, d: Disturbance) -> BuildingState:
    """Equilibrium temperatures for constant inputs: solve A x = -(B q + E d)."""
    rhs = -(model.B * heat + model.E @ d.as_array())
    try:
        x = np.linalg.solve(model.A, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular dynamics; no unique steady state") from exc
    return BuildingState.from_array(x)
