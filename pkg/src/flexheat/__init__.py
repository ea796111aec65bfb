"""flexheat: heat-pump building simulation with emission-aware LP-MPC.

A three-state RC thermal model of a heat-pump-heated building, driven by
a receding-horizon linear program that schedules heating against a
marginal-CO2 penalty signal.  Includes the envelope parameter derivation
from material stacks and building codes, a self-contained simplex solver,
kernel smoothing of overlapping weather forecasts, and the scenario
sweeps used to map the flexibility savings.
"""

from .envelope import (BuildingCode, BuildingGeometry, EnvelopeParams,
                       LayerStack, MaterialLayer, derive_params,
                       geometry_from_footprint, insulation_for_code,
                       layer_resistance, load_building_codes, load_materials,
                       window_props_from_eref)
from .heatpump import HeatPumpSpec, cop, cop_carnot, size_from_heat_loss
from .lp import LinearProgram, LpSolution, solve
from .mpc import ComfortSchedule, MpcConfig, SimulationData, closed_loop, plan
from .results import RunResult
from .thermal import (BuildingState, ContinuousModel, DiscreteModel,
                      Disturbance, build_continuous, discretize, steady_state,
                      step)

__version__ = "0.1.0"
