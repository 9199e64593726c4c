"""Pump, valve, friction and insulation models."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

G_ACC = 9.81


class OperatingPointError(RuntimeError):
    """Pump asked to run where its efficiency is at or below the floor."""


class CavitationError(RuntimeError):
    """Vapor reached the pump suction."""


class FlowSolveError(RuntimeError):
    """No hydraulic solution inside the search bracket."""


@dataclass(frozen=True)
class PumpSpec:
    """Second-order centrifugal pump.

    dp0: pressure rise at zero flow (Pa); V0: volume flow at zero rise (m3/s);
    eta_max: best-point efficiency. Off-design curves follow the affinity laws.
    """

    dp0: float
    V0: float
    eta_max: float
    speed_fraction: float = 1.0
    eta_floor: float = 0.05

    def __post_init__(self):
        if self.dp0 <= 0 or self.V0 <= 0:
            raise ValueError("pump dp0 and V0 must be positive")
        if not 0.0 < self.eta_max < 1.0 + 1e-12:
            raise ValueError("pump eta_max must be in (0, 1]")
        if not 0.0 < self.speed_fraction <= 1.0:
            raise ValueError("pump speed_fraction must be in (0, 1]")

    def at_speed(self, s: float) -> "PumpSpec":
        return replace(self, speed_fraction=s)


def pump_pressure_rise(spec: PumpSpec, V):
    """dp = s^2 dp0 (1 - (V / (s V0))^2), clamped at zero beyond s*V0."""
    s = spec.speed_fraction
    x = np.asarray(V, dtype=float) / (s * spec.V0)
    dp = s * s * spec.dp0 * (1.0 - x * x)
    return np.maximum(dp, 0.0)


def pump_efficiency(spec: PumpSpec, V):
    """Parabolic efficiency curve peaking at half the zero-head flow."""
    x = np.asarray(V, dtype=float) / (spec.speed_fraction * spec.V0)
    return spec.eta_max * 4.0 * x * (1.0 - x)


def pump_energy(spec: PumpSpec, V: float, dp: float, rho: float, eta: float | None = None):
    """(shaft power W, loss power W, specific enthalpy rise J/kg).

    All shaft power ends up in the fluid. ``eta`` overrides the curve.
    """
    if V <= 0 or rho <= 0 or dp < 0:
        raise ValueError("pump_energy needs V > 0, rho > 0, dp >= 0")
    if eta is None:
        eta = float(pump_efficiency(spec, V))
    if eta <= spec.eta_floor:
        raise OperatingPointError(
            f"pump efficiency {eta:.3f} at {V:.4f} m3/s is at or below the floor {spec.eta_floor:g}"
        )
    shaft = dp * V / eta
    return shaft, shaft * (1.0 - eta), dp / (rho * eta)


def friction_factor(Re):
    """Darcy factor for smooth tubes; laminar 64/Re blended below Re 4000."""
    Re = np.asarray(Re, dtype=float)
    if np.any(Re <= 0):
        raise ValueError("Reynolds number must be positive")
    turb = (1.8 * np.log10(Re) - 1.5) ** -2
    return np.where(Re < 4000.0, np.maximum(64.0 / Re, turb), turb)


@dataclass(frozen=True)
class ValveSpec:
    """Flow coefficient sized from a rated point: mdot = opening C sqrt(rho dp)."""

    rated_mdot: float
    rated_dp: float
    rated_rho: float = 70.0

    @property
    def C(self) -> float:
        return self.rated_mdot / math.sqrt(self.rated_rho * self.rated_dp)


def valve_flow(spec: ValveSpec, opening: float, p_up: float, p_down: float, rho: float) -> float:
    dp = p_up - p_down
    if dp <= 0.0 or opening <= 0.0:
        return 0.0
    return min(opening, 1.0) * spec.C * math.sqrt(rho * dp)


def valve_dp(spec: ValveSpec, opening: float, mdot: float, rho: float) -> float:
    """Pressure drop for a given flow; inverse of valve_flow."""
    if mdot <= 0.0:
        return 0.0
    if opening <= 0.0:
        return math.inf
    return (mdot / (opening * spec.C)) ** 2 / rho


@dataclass(frozen=True)
class Conductivity:
    """Apparent insulation conductivity k(T) = k_lin (T/300) + k_cub (T/300)^3.

    The linear part stands for solid/gas conduction and the cubic part for
    radiation. Defaults are calibrated so a 2.5 cm layer on an 8" line at
    308 K ambient gives about 4.6 W/m.
    """

    k_lin: float = 5.0e-4
    k_cub: float = 8.5e-4

    def __call__(self, T):
        t = np.asarray(T, dtype=float) / 300.0
        return self.k_lin * t + self.k_cub * t ** 3

    def mean(self, T_lo, T_hi, n: int = 8):
        """Mean of k over [T_lo, T_hi] by Gauss-Legendre quadrature (vectorised)."""
        x, w = np.polynomial.legendre.leggauss(n)
        T_lo = np.asarray(T_lo, dtype=float)[..., None]
        T_hi = np.asarray(T_hi, dtype=float)[..., None]
        T = 0.5 * (T_hi - T_lo) * x + 0.5 * (T_hi + T_lo)
        return 0.5 * np.sum(w * self(T), axis=-1)


@dataclass(frozen=True)
class ConstantConductivity:
    k: float

    def __call__(self, T):
        return np.full_like(np.asarray(T, dtype=float), self.k)

    def mean(self, T_lo, T_hi, n=0):
        return np.full(np.broadcast(np.asarray(T_lo), np.asarray(T_hi)).shape, float(self.k))


def radial_heat_ingress(inner_radius: float, thickness: float, k_model, T_fluid, T_amb: float):
    """Heat ingress per metre through a cylindrical insulation layer (W/m)."""
    if thickness <= 0 or inner_radius <= 0:
        raise ValueError("radius and insulation thickness must be positive")
    T_fluid = np.asarray(T_fluid, dtype=float)
    lnr = math.log((inner_radius + thickness) / inner_radius)
    q = 2.0 * math.pi * k_model.mean(T_fluid, T_amb) * (T_amb - T_fluid) / lnr
    return float(q) if q.ndim == 0 else q


@dataclass(frozen=True)
class Insulation:
    thickness: float
    T_amb: float
    k_model: object = field(default_factory=Conductivity)


@dataclass(frozen=True)
class PipeSegment:
    """Pipe geometry, heat ingress and wall thermal mass.

    Exactly one of ``heat_per_m`` (W/m, fixed) and ``insulation`` (radial model)
    must be given. ``wall_heat_capacity`` is J/(K m). With ``wave_speed`` (m/s)
    the cell pressures approach the hydraulic solution with a time constant of
    one transit time instead of following it instantly.
    """

    length: float
    diameter: float
    cells: int = 20
    heat_per_m: float | None = None
    insulation: Insulation | None = None
    wall_heat_capacity: float = 600.0
    film_coefficient: float = 300.0
    name: str = "pipe"
    wave_speed: float | None = None

    def __post_init__(self):
        if self.cells < 1:
            raise ValueError(f"{self.name}: cells must be >= 1")
        if self.length <= 0 or self.diameter <= 0:
            raise ValueError(f"{self.name}: geometry must be positive")
        if (self.heat_per_m is None) == (self.insulation is None):
            raise ValueError(f"{self.name}: give exactly one of heat_per_m and insulation")
        if self.wall_heat_capacity <= 0 or self.film_coefficient <= 0:
            raise ValueError(f"{self.name}: wall capacity and film coefficient must be positive")
        if self.wave_speed is not None and self.wave_speed <= 0:
            raise ValueError(f"{self.name}: wave speed must be positive")

    @property
    def area(self) -> float:
        return 0.25 * math.pi * self.diameter ** 2

    @property
    def volume(self) -> float:
        return self.area * self.length

    @property
    def dx(self) -> float:
        return self.length / self.cells

    def heat_ingress(self, T_fluid):
        """Heat ingress per metre for each cell (W/m)."""
        T_fluid = np.asarray(T_fluid, dtype=float)
        if self.heat_per_m is not None:
            return np.full(T_fluid.shape, float(self.heat_per_m))
        ins = self.insulation
        return radial_heat_ingress(0.5 * self.diameter, ins.thickness, ins.k_model, T_fluid, ins.T_amb)


def pipe_pressure_drop(seg: PipeSegment, mdot: float, rho, mu) -> float:
    """Darcy-Weisbach drop summed over cells; rho and mu are per-cell arrays or scalars."""
    if mdot == 0.0:
        return 0.0
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (seg.cells,))
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (seg.cells,))
    A, D = seg.area, seg.diameter
    Re = abs(mdot) * D / (A * mu)
    f = friction_factor(Re)
    dp = f * (seg.dx / D) * mdot * abs(mdot) / (2.0 * rho * A * A)
    return float(np.sum(dp))
