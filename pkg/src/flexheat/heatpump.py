"""Heat pump efficiency model and sizing from design-day heat loss."""

from __future__ import annotations

from dataclasses import dataclass

from .envelope import BuildingGeometry

KELVIN = 273.15

DEFAULT_SUPPLY_C = 40.0   # condensation / supply water temperature
DEFAULT_ETA = 0.5         # conservative Carnot derating
DESIGN_DAY_C = -12.0      # coldest-day ambient temperature
DESIGN_DT = 32.0          # design temperature difference (20 minus -12)


@dataclass(frozen=True)
class HeatPumpSpec:
    """Electrical capacity and efficiency of the heat pump."""

    P_max: float                 # kW electrical
    T_hot: float = DEFAULT_SUPPLY_C
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if self.P_max <= 0:
            raise ValueError("P_max must be > 0")
        if not (0 < self.eta <= 1):
            raise ValueError("eta must lie in (0, 1]")

    def cop_at(self, T_cold: float) -> float:
        return cop(self.T_hot, T_cold, self.eta)

    def max_heat_at(self, T_cold: float) -> float:
        """Maximum delivered heat at ambient T_cold, kW."""
        return self.P_max * self.cop_at(T_cold)


def cop_carnot(T_hot: float, T_cold: float) -> float:
    """Ideal (Carnot) coefficient of performance; temperatures in degC."""
    hot_k = T_hot + KELVIN
    cold_k = T_cold + KELVIN
    if cold_k >= hot_k:
        raise ValueError(f"T_cold={T_cold} must be below T_hot={T_hot}")
    return hot_k / (hot_k - cold_k)


def cop(T_hot: float, T_cold: float, eta: float = DEFAULT_ETA) -> float:
    """Realistic COP: the Carnot value derated by efficiency ``eta``."""
    if not (0 < eta <= 1):
        raise ValueError("eta must lie in (0, 1]")
    return eta * cop_carnot(T_hot, T_cold)


def size_from_heat_loss(geometry: BuildingGeometry,
                        u_values: dict[str, float],
                        dT: float = DESIGN_DT,
                        T_hot: float = DEFAULT_SUPPLY_C,
                        eta: float = DEFAULT_ETA) -> dict[str, float]:
    """Design-day heat loss and matching electrical capacity.

    ``u_values`` carries the code values for wall, roof, window, door in
    W/(m^2 K).  The floor is excluded (no ground-loss branch in the model).
    Returns Q_loss (kW thermal) and P_max (kW electrical) so that
    P_max * COP(design day) equals Q_loss exactly.
    """
    if dT <= 0:
        raise ValueError("dT must be > 0")
    ua = (u_values["wall"] * geometry.wall_area
          + u_values["roof"] * geometry.roof_area
          + u_values["window"] * geometry.window_area
          + u_values["door"] * geometry.door_area)       # W/K
    q_loss = ua * dT / 1000.0
    design_cop = cop(T_hot, DESIGN_DAY_C, eta)
    return {"Q_loss": q_loss, "P_max": q_loss / design_cop}
