"""Pumped pipe networks: source, pump, supply pipe, node and valved branches.

One class covers the three supported layouts:

* transport line: boundary source, pump, long pipe, throttle valve, boundary sink;
* long-term distribution: fuel-farm tank, pump, supply pipe, recycle branch back
  to the tank and an aircraft branch ending at a fixed back-pressure;
* detailed refuelling: as above with one branch per aircraft tank.

Each step the hydraulic loop (pump curve, pipe friction, valves, sink pressures)
is closed with frozen pipe resistances, then every storage element is advanced
with the resulting flows. Mass and energy crossing the network boundary are
accumulated so global balances can be checked exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..h2props import PropertySet, default_properties
from .components import (
    CavitationError,
    FlowSolveError,
    OperatingPointError,
    PumpSpec,
    ValveSpec,
    pump_efficiency,
    pump_pressure_rise,
)
from .pipe import Pipe
from .tank import Tank


@dataclass
class Boundary:
    """Fixed-pressure reservoir. ``enthalpy`` is required when used as a source."""

    pressure: float
    enthalpy: float | None = None
    name: str = "boundary"

    @classmethod
    def liquid(cls, pressure: float, T: float, props: PropertySet | None = None, name: str = "boundary"):
        props = props or default_properties()
        return cls(pressure, float(props.liquid_enthalpy(T, pressure)), name)


class Branch:
    """Pipes in series, a control valve at the downstream end, then a sink.

    ``mode`` is "valve" (flow follows from ``opening``) or "flow" (an ideal
    flow controller delivers ``setpoint`` or the full-open capacity, whichever
    is lower, and ``opening`` reports the equivalent position).
    """

    def __init__(self, name: str, pipes, valve: ValveSpec | None, sink, mode: str = "valve",
                 opening: float = 1.0, setpoint: float = 0.0):
        if mode not in ("valve", "flow"):
            raise ValueError(f"{name}: mode must be 'valve' or 'flow'")
        if valve is None and mode == "valve":
            raise ValueError(f"{name}: a valve-mode branch needs a valve")
        self.name = name
        self.pipes = list(pipes)
        self.valve = valve
        self.sink = sink
        self.mode = mode
        self.opening = float(opening)
        self.setpoint = float(setpoint)
        self.mdot = 0.0           # solved flow through the valve (kg/s)
        self.delivered = 0.0      # time-integrated mass into the sink (kg)
        self.valve_dp = 0.0
        self.h_out = 0.0
        self._R = 0.0

    def sink_pressure(self) -> float:
        return self.sink.pressure

    def inlet_density(self, default: float) -> float:
        return float(self.pipes[-1].rho[-1]) if self.pipes else default

    def refresh_resistance(self, mdot_ref: float) -> None:
        self._R = sum(p.resistance(mdot_ref) for p in self.pipes)

    def _valve_term(self, opening: float, rho: float) -> float:
        if self.valve is None:
            return 0.0
        return 1.0 / (opening * opening * self.valve.C ** 2 * rho)

    def flow(self, p_node: float, rho: float) -> float:
        dp = p_node - self.sink_pressure()
        if dp <= 0.0:
            return 0.0
        if self.mode == "valve":
            if self.opening <= 1e-9:
                return 0.0
            return math.sqrt(dp / (self._R + self._valve_term(min(self.opening, 1.0), rho)))
        if self.setpoint <= 0.0:
            return 0.0
        r = self._R + self._valve_term(1.0, rho)
        return min(self.setpoint, math.sqrt(dp / r)) if r > 0.0 else self.setpoint


@dataclass
class Ledger:
    """Time integrals of everything crossing the network boundary."""

    mass_in: float = 0.0
    mass_out: float = 0.0
    mass_vented: float = 0.0
    energy_in: float = 0.0
    energy_out: float = 0.0
    energy_vented: float = 0.0
    heat: float = 0.0
    shaft: float = 0.0


@dataclass
class StepReport:
    pump_flow: float
    pump_dp: float
    pump_eta: float
    shaft_power: float
    loss_power: float
    suction_pressure: float
    discharge_pressure: float
    node_pressure: float
    branch_flows: dict
    supply_out: float
    vented: dict
    heat: float


class PumpedNetwork:
    """Source, optional pump, optional supply pipe, node, branches.

    ``pump=None`` makes the source an ideal flow source: no enthalpy rise and
    just enough pressure to pass the requested branch flows with open valves.
    ``feeds`` are external liquid inflows into tanks, given as
    ``[tank, mdot, h]`` lists that callers may update between steps.
    """

    def __init__(self, source, pump: PumpSpec | None, supply: Pipe | None, branches,
                 feeds=None, props: PropertySet | None = None):
        self.source = source
        self.pump = pump
        self.supply = supply
        self.branches = list(branches)
        self.feeds = [list(f) for f in (feeds or [])]
        self.props = props or default_properties()
        self.time = 0.0
        self.ledger = Ledger()
        self.last: StepReport | None = None
        names = [b.name for b in self.branches]
        if len(set(names)) != len(names):
            raise ValueError("branch names must be unique")
        if pump is None and any(b.mode == "valve" for b in self.branches):
            raise ValueError("an ideal flow source needs flow-mode branches")
        self._m_ref = max(sum(b.setpoint for b in self.branches), 1.0)

    # --------------------------------------------------------------- inventory
    def tanks(self):
        seen = []
        for t in [self.source] + [b.sink for b in self.branches] + [f[0] for f in self.feeds]:
            if isinstance(t, Tank) and all(t is not s for s in seen):
                seen.append(t)
        return seen

    def pipes(self):
        out = [self.supply] if self.supply is not None else []
        for b in self.branches:
            out.extend(b.pipes)
        return out

    def stored_mass(self) -> float:
        return sum(t.mass for t in self.tanks()) + sum(p.mass for p in self.pipes())

    def stored_energy(self) -> float:
        return sum(t.energy for t in self.tanks()) + sum(p.energy for p in self.pipes())

    def branch(self, name: str) -> Branch:
        for b in self.branches:
            if b.name == name:
                return b
        raise KeyError(name)

    # ------------------------------------------------------------------ source
    def suction(self):
        """(pressure, enthalpy) of the liquid entering the pump."""
        if isinstance(self.source, Tank):
            return self.source.bottom_pressure(), self.source.outflow_enthalpy()
        if self.source.enthalpy is None:
            raise ValueError(f"{self.source.name}: source boundary needs an enthalpy")
        return self.source.pressure, self.source.enthalpy

    # -------------------------------------------------------------- hydraulics
    def _node_pressure(self, m, p_suc, rho_suc, R_s):
        dp = float(pump_pressure_rise(self.pump, m / rho_suc))
        return p_suc + dp - R_s * m * m

    def _solve_pumped(self, p_suc, rho_suc, rhos, R_s):
        def g(m):
            p = self._node_pressure(m, p_suc, rho_suc, R_s)
            return sum(b.flow(p, r) for b, r in zip(self.branches, rhos)) - m

        if g(0.0) <= 0.0:
            raise OperatingPointError("no branch accepts flow at pump shut-off head; pump would run dry-closed")
        hi = self.pump.speed_fraction * self.pump.V0 * rho_suc
        for _ in range(40):
            if g(hi) < 0.0:
                break
            hi *= 2.0
        else:
            raise FlowSolveError(
                f"no pump operating point up to {hi:.3g} kg/s (suction {p_suc / 1e5:.4f} bara, "
                f"sinks {[round(b.sink_pressure() / 1e5, 4) for b in self.branches]} bara)"
            )
        m = brentq(g, 0.0, hi, xtol=1e-10, rtol=1e-13)
        return m, self._node_pressure(m, p_suc, rho_suc, R_s)

    def _solve_ideal(self, p_suc, rhos, R_s):
        flows = {b.name: max(b.setpoint, 0.0) for b in self.branches}
        m = sum(flows.values())
        need = p_suc
        for b, r in zip(self.branches, rhos):
            f = flows[b.name]
            if f > 0.0:
                need = max(need, b.sink_pressure() + f * f * (b._R + b._valve_term(1.0, r)))
        return m, need + R_s * m * m, need

    def solve_hydraulics(self):
        """Flows and pressures for the current states and actuator positions.

        Returns (pump flow, pump dp, suction pressure, node pressure, branch flows).
        """
        p_suc, h_suc = self.suction()
        st = self.props.state_ph(p_suc, h_suc)
        if float(st["x"]) > 0.0:
            raise CavitationError(f"vapor at the pump suction (quality {float(st['x']):.4f})")
        rho_suc = float(st["rho"])
        rho_node = float(self.supply.rho[-1]) if self.supply is not None else rho_suc
        rhos = [b.inlet_density(rho_node) for b in self.branches]
        m_ref = self._m_ref
        for _ in range(2):
            R_s = self.supply.resistance(m_ref) if self.supply is not None else 0.0
            for b in self.branches:
                b.refresh_resistance(max(b.mdot, b.setpoint, 1e-3))
            if self.pump is None:
                m, p_dis, p_node = self._solve_ideal(p_suc, rhos, R_s)
                dp = p_dis - p_suc
            else:
                m, p_node = self._solve_pumped(p_suc, rho_suc, rhos, R_s)
                dp = float(pump_pressure_rise(self.pump, m / rho_suc))
            m_ref = max(m, 1e-3)
        if self.pump is not None:
            flows = {b.name: b.flow(p_node, r) for b, r in zip(self.branches, rhos)}
        else:
            flows = {b.name: max(b.setpoint, 0.0) for b in self.branches}
        return m, dp, p_suc, p_node, flows, rho_suc, h_suc

    # -------------------------------------------------------------------- step
    def step(self, dt: float) -> StepReport:
        if dt <= 0:
            raise ValueError("dt must be positive")
        m, dp, p_suc, p_node, flows, rho_suc, h_suc = self.solve_hydraulics()
        led = self.ledger

        if self.pump is not None:
            V = m / rho_suc
            eta = float(pump_efficiency(self.pump, V))
            if m <= 0.0 or eta <= self.pump.eta_floor:
                raise OperatingPointError(
                    f"pump efficiency {eta:.3f} at {V:.4f} m3/s is at or below the floor "
                    f"{self.pump.eta_floor:g}"
                )
            dh = dp / (rho_suc * eta)
        else:
            eta, dh = 1.0, 0.0
        shaft = m * dh
        h_dis = h_suc + dh
        p_dis = p_suc + dp

        # pipes and branches
        heat = 0.0
        if self.supply is not None:
            r = self.supply.step(m, h_dis, p_dis, dt)
            heat += r.heat
            F_sup, h_sup = r.m_out, r.h_out
        else:
            F_sup, h_sup = m, h_dis
        total = sum(flows.values())
        sink_in = []
        for b in self.branches:
            share = F_sup * flows[b.name] / total if total > 0.0 else 0.0
            F, h, p = share, h_sup, p_node
            for pipe in b.pipes:
                r = pipe.step(F, h, p, dt, hydraulic_flow=flows[b.name])
                heat += r.heat
                F, h, p = r.m_out, r.h_out, r.p_out
            b.mdot = flows[b.name]
            b.h_out = h
            b.delivered += F * dt
            sp = b.sink_pressure()
            b.valve_dp = max(p - sp, 0.0)
            if b.mode == "flow" and b.valve is not None and b.mdot > 0.0:
                rho_v = b.inlet_density(rho_suc)
                b.opening = min(b.mdot / (b.valve.C * math.sqrt(rho_v * max(b.valve_dp, 1e-9))), 1.0)
            sink_in.append((b.sink, F, h))

        # storage
        h_src = h_suc
        if isinstance(self.source, Tank):
            outflow = m
        else:
            outflow = 0.0
            led.mass_in += m * dt
            led.energy_in += m * h_suc * dt
        vented = {}
        for tank in self.tanks():
            inflows = [(F, h) for s, F, h in sink_in if s is tank]
            inflows += [(f[1], f[2]) for f in self.feeds if f[0] is tank]
            out = outflow if tank is self.source else 0.0
            vent = tank.step(inflows, out, dt, h_out=h_src if out > 0.0 else None)
            vented[tank.spec.name] = vent
            heat += tank.last_heat
            led.mass_vented += vent
            led.energy_vented += tank.last_vent_energy
        for f in self.feeds:
            led.mass_in += f[1] * dt
            led.energy_in += f[1] * f[2] * dt
        for s, F, h in sink_in:
            if not isinstance(s, Tank):
                led.mass_out += F * dt
                led.energy_out += F * h * dt
        led.heat += heat * dt
        led.shaft += shaft * dt

        self._m_ref = max(m, 1e-3)
        self.time += dt
        self.last = StepReport(
            pump_flow=m, pump_dp=dp, pump_eta=eta, shaft_power=shaft, loss_power=shaft * (1.0 - eta),
            suction_pressure=p_suc, discharge_pressure=p_dis, node_pressure=p_node,
            branch_flows=flows, supply_out=F_sup, vented=vented, heat=heat,
        )
        return self.last

    # ------------------------------------------------------------ bookkeeping
    def balances(self, start_mass: float, start_energy: float):
        """(mass residual, energy residual, mass scale, energy scale) since the start values."""
        led = self.ledger
        dm = self.stored_mass() - start_mass
        dE = self.stored_energy() - start_energy
        rm = dm - (led.mass_in - led.mass_out - led.mass_vented)
        rE = dE - (led.energy_in - led.energy_out - led.energy_vented + led.heat + led.shaft)
        m_scale = max(led.mass_in + led.mass_out + led.mass_vented, abs(start_mass) * 1e-6, 1.0)
        E_scale = max(abs(led.energy_in) + abs(led.energy_out) + abs(led.energy_vented)
                      + abs(led.heat) + abs(led.shaft), 1.0)
        return rm, rE, m_scale, E_scale


def network_solve_step(network: PumpedNetwork, controller_outputs: dict | None, dt: float) -> StepReport:
    """Apply actuator positions then advance the network one step.

    ``controller_outputs`` maps branch names to an opening (valve mode) or a
    flow set-point (flow mode); the key "pump_speed" sets the pump speed fraction.
    """
    for key, val in (controller_outputs or {}).items():
        if key == "pump_speed":
            if network.pump is None:
                raise ValueError("network has no pump")
            network.pump = network.pump.at_speed(float(np.clip(val, 1e-3, 1.0)))
            continue
        b = network.branch(key)
        if b.mode == "valve":
            b.opening = float(np.clip(val, 0.0, 1.0))
        else:
            b.setpoint = max(float(val), 0.0)
    return network.step(dt)
