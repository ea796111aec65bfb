"""Building envelope: material stacks, building codes and lumped RC parameters.

The building is described by three layered assemblies (wall, roof, floor)
plus window/door openings.  From those this module derives the lumped
parameters of the three-state RC network:

  R_ea  envelope -> ambient resistance      [K/kW]
  R_ie  interior -> envelope resistance     [K/kW]
  R_fi  floor -> interior resistance        [K/kW]
  C_e   envelope thermal mass               [kWh/K]
  C_f   floor thermal mass                  [kWh/K]
  C_i   interior (air + furniture) mass     [kWh/K]

Thermal-mass layers contribute half their conductive resistance to each
side of the node they define (the "half mass" split); the roof air gap is
counted on both sides of the roof concrete, which is what the published
parameter set requires to be reproduced.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path


J_PER_KWH = 3.6e6

# Interior heat capacity per floor area (air, furniture, ...), J/(K*m^2).
INTERIOR_CAPACITY_KEY = 20e3


class EnvelopeError(ValueError):
    """Base class for envelope construction errors."""


class InvalidMaterialError(EnvelopeError):
    pass


class StackError(EnvelopeError):
    pass


class InvalidGeometryError(EnvelopeError):
    pass


class InfeasibleTargetError(EnvelopeError):
    pass


class NoSolutionError(EnvelopeError):
    pass


@dataclass(frozen=True)
class MaterialLayer:
    """One physical layer of a building part.

    ``fixed_resistance`` overrides the conductive zeta/k resistance; it is
    used for surface films, air gaps and the waterproof layer, whose
    resistances are tabulated directly.
    """

    name: str
    thickness_m: float = 0.0
    density: float = 0.0           # kg/m^3
    specific_heat: float = 0.0     # J/(kg K)
    conductivity: float = 0.0      # W/(m K)
    fixed_resistance: float | None = None  # m^2 K / W
    tag: str = ""

    def __post_init__(self):
        if self.thickness_m < 0 or self.density < 0 or self.specific_heat < 0:
            raise InvalidMaterialError(f"{self.name}: negative physical property")
        if self.fixed_resistance is None and self.conductivity <= 0:
            raise InvalidMaterialError(
                f"{self.name}: conductivity must be > 0 without a fixed resistance"
            )

    @property
    def resistance(self) -> float:
        """Area-specific thermal resistance, m^2 K / W."""
        if self.fixed_resistance is not None:
            return self.fixed_resistance
        return self.thickness_m / self.conductivity

    @property
    def areal_capacity(self) -> float:
        """Heat capacity per unit area, J/(K m^2)."""
        return self.thickness_m * self.density * self.specific_heat


def layer_resistance(layer: MaterialLayer) -> float:
    """Thermal resistance of a single layer (zeta/k or the fixed value)."""
    return layer.resistance


_MASS_TAGS = {"wall": "inner_mass", "roof": "inner_mass", "floor": "storage_mass"}


@dataclass(frozen=True)
class LayerStack:
    """Ordered layers of one building part, inside surface -> outside surface."""

    part: str  # wall | roof | floor
    layers: tuple[MaterialLayer, ...]

    def __post_init__(self):
        if self.part not in _MASS_TAGS:
            raise StackError(f"unknown building part {self.part!r}")
        if sum(1 for l in self.layers if l.tag == "insulation") != 1:
            raise StackError(f"{self.part}: exactly one insulation layer required")
        mass_tag = _MASS_TAGS[self.part]
        if sum(1 for l in self.layers if l.tag == mass_tag) != 1:
            raise StackError(f"{self.part}: exactly one {mass_tag!r} layer required")

    def _index(self, tag: str) -> int:
        for i, l in enumerate(self.layers):
            if l.tag == tag:
                return i
        raise StackError(f"{self.part}: no layer tagged {tag!r}")

    @property
    def insulation_index(self) -> int:
        return self._index("insulation")

    @property
    def mass_index(self) -> int:
        return self._index(_MASS_TAGS[self.part])

    @property
    def mass_layer(self) -> MaterialLayer:
        return self.layers[self.mass_index]

    def outer_branch_resistance(self) -> float:
        """Resistance from the mass-layer midpoint to the outside, m^2 K/W."""
        i = self.mass_index
        r = self.mass_layer.resistance / 2.0
        r += sum(l.resistance for l in self.layers[i + 1:])
        return r

    def inner_branch_resistance(self) -> float:
        """Resistance from the mass-layer midpoint to the room, m^2 K/W.

        Air-gap layers sit outside the mass but are also counted here;
        this double booking reproduces the published parameter set.
        """
        i = self.mass_index
        r = self.mass_layer.resistance / 2.0
        r += sum(l.resistance for l in self.layers[:i])
        r += sum(l.resistance for l in self.layers if l.tag == "air")
        return r

    def assembly_resistance(self) -> float:
        """Full series resistance, inside surface film to outside, m^2 K/W."""
        return sum(l.resistance for l in self.layers)

    def interior_side_capacity(self) -> float:
        """Areal capacity of all material layers inside the insulation, J/(K m^2)."""
        i = self.insulation_index
        return sum(l.areal_capacity for l in self.layers[:i] if l.tag != "surface")

    def with_insulation_thickness(self, thickness_m: float) -> "LayerStack":
        if thickness_m <= 0:
            raise StackError(f"{self.part}: insulation thickness must be > 0")
        i = self.insulation_index
        layers = list(self.layers)
        layers[i] = replace(layers[i], thickness_m=thickness_m)
        return LayerStack(self.part, tuple(layers))

    def with_layer_thickness(self, tag: str, thickness_m: float) -> "LayerStack":
        i = self._index(tag)
        layers = list(self.layers)
        layers[i] = replace(layers[i], thickness_m=thickness_m)
        return LayerStack(self.part, tuple(layers))


@dataclass(frozen=True)
class BuildingGeometry:
    """Areas of one single-story, flat-roof building. All in m^2 except height."""

    floor_area: float
    wall_area: float       # opaque wall, openings excluded
    roof_area: float
    window_area: float
    door_area: float
    height: float

    def __post_init__(self):
        for name in ("floor_area", "wall_area", "roof_area", "height"):
            if getattr(self, name) <= 0:
                raise InvalidGeometryError(f"{name} must be > 0")
        if self.window_area < 0 or self.door_area < 0:
            raise InvalidGeometryError("opening areas must be >= 0")


def geometry_from_footprint(length: float, width: float, height: float,
                            window_to_wall: float = 0.11,
                            door_to_wall: float = 0.04) -> BuildingGeometry:
    """Exact real-valued areas of a rectangular single-story building.

    Windows and doors are carved out of the gross wall area
    (perimeter x height) by the given ratios.
    """
    if length <= 0 or width <= 0 or height <= 0:
        raise InvalidGeometryError("dimensions must be > 0")
    if not (0 <= window_to_wall < 1) or not (0 <= door_to_wall < 1):
        raise InvalidGeometryError("ratios must lie in [0, 1)")
    if window_to_wall + door_to_wall >= 1:
        raise InvalidGeometryError("window and door ratios must sum below 1")
    floor = length * width
    gross_wall = 2.0 * (length + width) * height
    windows = window_to_wall * gross_wall
    doors = door_to_wall * gross_wall
    return BuildingGeometry(
        floor_area=floor,
        wall_area=gross_wall - windows - doors,
        roof_area=floor,
        window_area=windows,
        door_area=doors,
        height=height,
    )


@dataclass(frozen=True)
class BuildingCode:
    """U-value requirements of one building-regulation year."""

    year_label: str
    u_wall: float
    u_roof: float
    u_door: float
    u_window: float | None = None
    e_ref: float | None = None
    g: float | None = None

    def __post_init__(self):
        for name in ("u_wall", "u_roof", "u_door"):
            if getattr(self, name) <= 0:
                raise EnvelopeError(f"{self.year_label}: {name} must be > 0")
        if self.g is not None and not (0 < self.g <= 1):
            raise EnvelopeError(f"{self.year_label}: g must lie in (0, 1]")
        if self.u_window is None and self.e_ref is None:
            raise EnvelopeError(f"{self.year_label}: window spec missing")

    def window_props(self) -> tuple[float, float]:
        """Window (U, g); derived from E_ref when not given directly."""
        if self.u_window is not None and self.g is not None:
            return self.u_window, self.g
        if self.e_ref is not None:
            props = window_props_from_eref(self.e_ref)
            return props["U"], props["g"]
        # U known, g not: fall back to the exponential U(g) relation.
        g = math.log(self.u_window / 0.0205) / 6.6545
        return self.u_window, g


def _eref_window_u(g: float) -> float:
    return 0.0205 * math.exp(6.6545 * g)


def eref_from_props(u: float, g: float) -> float:
    """Net-energy rating of a window from its U and g values, kWh/m^2."""
    return 194.4 * g - 90.36 * u


def window_props_from_eref(e_ref: float) -> dict[str, float]:
    """Solve the window rating relations for (U, g).

    E_ref = 194.4 g - 90.36 U together with U = 0.0205 exp(6.6545 g)
    pins down a unique g in (0, 1); found by bisection.
    """
    def residual(g: float) -> float:
        return eref_from_props(_eref_window_u(g), g) - e_ref

    lo, hi = 1e-12, 1.0
    f_lo, f_hi = residual(lo), residual(hi)
    if f_lo <= 0 or f_hi >= 0:
        raise NoSolutionError(f"no window solution for E_ref={e_ref}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = residual(mid)
        if abs(f_mid) < 1e-9:
            lo = hi = mid
            break
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    g = 0.5 * (lo + hi)
    return {"U": _eref_window_u(g), "g": g}


@dataclass(frozen=True)
class EnvelopeParams:
    """Lumped RC parameters. Resistances in K/kW, capacities in kWh/K."""

    R_ea: float
    R_ie: float
    R_fi: float
    C_e: float
    C_f: float
    C_i: float

    def __post_init__(self):
        for name in ("R_ea", "R_ie", "R_fi", "C_e", "C_f", "C_i"):
            if getattr(self, name) <= 0:
                raise EnvelopeError(f"{name} must be > 0")


def derive_params(geometry: BuildingGeometry,
                  stacks: dict[str, LayerStack],
                  window_u: float,
                  door_u: float) -> EnvelopeParams:
    """Lumped RC parameters from geometry and the three layer stacks.

    R_ea collects the parallel U*A paths from the mass midpoints (and the
    openings) to ambient; R_ie and R_fi the paths from the room to the wall,
    roof and floor mass midpoints.  No floor-to-ground branch exists.
    """
    try:
        wall, roof, floor = stacks["wall"], stacks["roof"], stacks["floor"]
    except KeyError as exc:
        raise StackError(f"missing stack: {exc}") from exc

    u_wall_out = 1.0 / wall.outer_branch_resistance()
    u_roof_out = 1.0 / roof.outer_branch_resistance()
    u_wall_in = 1.0 / wall.inner_branch_resistance()
    u_roof_in = 1.0 / roof.inner_branch_resistance()
    u_floor_in = 1.0 / floor.inner_branch_resistance()

    ua_ambient = (window_u * geometry.window_area
                  + door_u * geometry.door_area
                  + u_wall_out * geometry.wall_area
                  + u_roof_out * geometry.roof_area)          # W/K
    ua_envelope = (u_wall_in * geometry.wall_area
                   + u_roof_in * geometry.roof_area)
    ua_floor = u_floor_in * geometry.floor_area

    c_e = (wall.interior_side_capacity() * geometry.wall_area
           + roof.interior_side_capacity() * geometry.roof_area) / J_PER_KWH
    c_f = floor.interior_side_capacity() * geometry.floor_area / J_PER_KWH
    c_i = INTERIOR_CAPACITY_KEY * geometry.floor_area / J_PER_KWH

    return EnvelopeParams(
        R_ea=1000.0 / ua_ambient,
        R_ie=1000.0 / ua_envelope,
        R_fi=1000.0 / ua_floor,
        C_e=c_e,
        C_f=c_f,
        C_i=c_i,
    )


def insulation_for_code(stack: LayerStack, target_u: float) -> LayerStack:
    """Set the insulation thickness so the ambient-branch U equals ``target_u``.

    The branch is the outer half-mass path used in the ambient resistance
    (surface films and layers outside the mass midpoint, air gaps included).
    """
    if target_u <= 0:
        raise InfeasibleTargetError("target U must be > 0")
    insul = stack.layers[stack.insulation_index]
    bare = stack.with_insulation_thickness(1e-12)
    r_other = bare.outer_branch_resistance()
    r_needed = 1.0 / target_u - r_other
    if r_needed <= 0:
        raise InfeasibleTargetError(
            f"{stack.part}: U={target_u} unreachable, assembly already at "
            f"{1.0 / r_other:.3f} W/m^2K with zero insulation"
        )
    return stack.with_insulation_thickness(insul.conductivity * r_needed)


# ---------------------------------------------------------------------------
# Data tables
# ---------------------------------------------------------------------------

def _float_or_none(cell: str) -> float | None:
    cell = cell.strip()
    return float(cell) if cell else None


def load_materials(path: str | Path | None = None) -> dict[str, LayerStack]:
    """Read the materials table (CSV) into the three layer stacks."""
    if path is None:
        src = resources.files("flexheat.data").joinpath("materials.csv")
        text = src.read_text()
    else:
        text = Path(path).read_text()
    by_part: dict[str, list[MaterialLayer]] = {"wall": [], "roof": [], "floor": []}
    for row in csv.DictReader(text.splitlines()):
        part = row["part"].strip()
        if part not in by_part:
            raise StackError(f"materials table: unknown part {part!r}")
        by_part[part].append(MaterialLayer(
            name=row["name"].strip(),
            thickness_m=_float_or_none(row["zeta_m"]) or 0.0,
            density=_float_or_none(row["rho"]) or 0.0,
            specific_heat=_float_or_none(row["c_J_per_kgK"]) or 0.0,
            conductivity=_float_or_none(row["k_W_per_mK"]) or 0.0,
            fixed_resistance=_float_or_none(row["r_fixed"]),
            tag=row["tag"].strip(),
        ))
    return {part: LayerStack(part, tuple(layers)) for part, layers in by_part.items()}


def load_building_codes(path: str | Path | None = None) -> dict[str, BuildingCode]:
    """Read the building-code table (CSV), keyed by year label."""
    if path is None:
        src = resources.files("flexheat.data").joinpath("building_codes.csv")
        text = src.read_text()
    else:
        text = Path(path).read_text()
    codes: dict[str, BuildingCode] = {}
    for row in csv.DictReader(text.splitlines()):
        label = row["year"].strip()
        codes[label] = BuildingCode(
            year_label=label,
            u_wall=float(row["u_wall"]),
            u_roof=float(row["u_roof"]),
            u_door=float(row["u_door"]),
            u_window=_float_or_none(row["u_window"]),
            e_ref=_float_or_none(row["e_ref"]),
            g=_float_or_none(row["g"]),
        )
    return codes


# Published reference areas for the two study buildings.  These are the
# rounded values the reference parameter set was computed from and are kept
# as-is so derived parameters land on the published numbers.
FAMILY_HOUSE = BuildingGeometry(floor_area=156.0, wall_area=107.0,
                                roof_area=156.0, window_area=14.0,
                                door_area=4.0, height=2.5)
OFFICE = BuildingGeometry(floor_area=1250.0, wall_area=302.0,
                          roof_area=1250.0, window_area=39.0,
                          door_area=13.0, height=2.5)


def stacks_for_code(stacks: dict[str, LayerStack],
                    code: BuildingCode,
                    concrete_m: float | None = None) -> dict[str, LayerStack]:
    """Wall/roof insulation sized for the code; optional floor-concrete override."""
    out = {
        "wall": insulation_for_code(stacks["wall"], code.u_wall),
        "roof": insulation_for_code(stacks["roof"], code.u_roof),
        "floor": stacks["floor"],
    }
    if concrete_m is not None:
        out["floor"] = out["floor"].with_layer_thickness("storage_mass", concrete_m)
    return out
