"""Vapor-liquid equilibrium tanks with ideal pressure-relief venting."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..h2props import FlashResult, PropertySet, default_properties, flash_uv, mixture_energy, vent_to_pressure
from .components import G_ACC


class SupplyExhaustedError(RuntimeError):
    """Liquid outflow commanded below the minimum fill level."""


class OverfillError(RuntimeError):
    """Liquid level above the ullage limit."""


def sphere_area(volume: float) -> float:
    return (36.0 * math.pi * volume * volume) ** (1.0 / 3.0)


@dataclass(frozen=True)
class TankSpec:
    """Geometry, limits and heat ingress of a separator tank.

    Heat ingress is either fixed (``heat_ingress`` W) or ``ua`` (W/(m2 K)) times
    the area of a sphere of the same volume times (T_amb - T).
    """

    volume: float
    mop: float = 1.7e5
    ullage: float = 0.03
    min_fill: float = 0.05
    heat_ingress: float | None = None
    ua: float | None = None
    T_amb: float = 308.15
    liquid_head: float = 0.0
    vent: bool = True
    name: str = "tank"

    def __post_init__(self):
        if self.volume <= 0:
            raise ValueError(f"{self.name}: volume must be positive")
        if (self.heat_ingress is None) == (self.ua is None):
            raise ValueError(f"{self.name}: give exactly one of heat_ingress and ua")
        if not (0.0 <= self.min_fill < 1.0 - self.ullage <= 1.0):
            raise ValueError(f"{self.name}: need 0 <= min_fill < 1 - ullage")

    def heat(self, T: float) -> float:
        if self.heat_ingress is not None:
            return float(self.heat_ingress)
        return self.ua * sphere_area(self.volume) * (self.T_amb - T)


class Tank:
    """Total mass and internal energy; everything else comes from the flash."""

    def __init__(self, spec: TankSpec, mass: float, energy: float, props: PropertySet | None = None):
        self.spec = spec
        self.props = props or default_properties()
        self.mass = float(mass)
        self.energy = float(energy)
        self.state = flash_uv(self.mass, self.energy, spec.volume, self.props)
        self.vented = 0.0
        self.last_heat = 0.0
        self.last_vent_energy = 0.0

    @classmethod
    def saturated(cls, spec: TankSpec, pressure: float, level: float, props: PropertySet | None = None):
        props = props or default_properties()
        m, U = mixture_energy(pressure, level, spec.volume, props)
        return cls(spec, m, U, props)

    @property
    def pressure(self) -> float:
        return self.state.pressure

    @property
    def level(self) -> float:
        return self.state.level

    def bottom_pressure(self) -> float:
        return self.state.pressure + self.state.rho_l * G_ACC * self.spec.liquid_head

    def outflow_enthalpy(self) -> float:
        """Liquid drawn at the tank bottom, including the static head."""
        return float(self.props.liquid_enthalpy(self.state.temperature, self.bottom_pressure()))

    def step(self, inflows, outflow: float, dt: float, h_out: float | None = None) -> float:
        """Apply one step of balances and relief venting; returns vented mass (kg)."""
        spec = self.spec
        if outflow > 0.0 and self.state.level <= spec.min_fill:
            raise SupplyExhaustedError(
                f"{spec.name}: level {self.state.level:.4f} at or below minimum fill {spec.min_fill:g}"
            )
        if h_out is None:
            h_out = self.outflow_enthalpy() if outflow > 0.0 else 0.0
        Q = spec.heat(self.state.temperature)
        self.last_heat = Q
        dm = -outflow * dt
        dU = (Q - outflow * h_out) * dt
        for mdot, h in inflows:
            dm += mdot * dt
            dU += mdot * h * dt
        return self.apply(dm, dU)

    def apply(self, dm: float, dU: float) -> float:
        spec = self.spec
        self.mass += dm
        self.energy += dU
        st = flash_uv(self.mass, self.energy, spec.volume, self.props, p_guess=self.state.pressure)
        vent = 0.0
        self.last_vent_energy = 0.0
        if spec.vent and st.pressure > spec.mop:
            vent = vent_to_pressure(self.mass, self.energy, spec.volume, spec.mop, self.props)
            hv = float(self.props.vapor_enthalpy(spec.mop))
            self.mass -= vent
            self.energy -= vent * hv
            self.last_vent_energy = vent * hv
            st = flash_uv(self.mass, self.energy, spec.volume, self.props, p_guess=spec.mop)
        self.state = st
        self.vented += vent
        if st.level > 1.0 - spec.ullage + 1e-9:
            raise OverfillError(f"{spec.name}: level {st.level:.4f} above ullage limit {1 - spec.ullage:g}")
        return vent

    def snapshot(self) -> dict:
        return {"mass": self.mass, "energy": self.energy}


def tank_step(tank: Tank, inflows, outflow_liquid: float, dt: float):
    """Functional form: returns (state, vented mass)."""
    vent = tank.step(inflows, outflow_liquid, dt)
    return tank.state, vent
