"""Finite-volume pipe with wall thermal mass.

Each cell stores fluid mass M, specific enthalpy h and a wall temperature.
Heat ingress enters the wall; the wall exchanges heat with the fluid through
a film conductance. Stored energy is counted as M*h for the fluid (pressure
work in the rigid cell is neglected) plus C*T_wall for the wall.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..h2props import PropertyRangeError, PropertySet, default_properties
from .components import PipeSegment, friction_factor


@dataclass
class PipeStepResult:
    m_in: float
    h_in: float
    m_out: float
    h_out: float            # enthalpy carried by the outlet face over the step
    heat: float             # heat ingress into the wall (W)
    p_out: float


class Pipe:
    def __init__(self, seg: PipeSegment, p: float, T: float | None = None, h: float | None = None,
                 props: PropertySet | None = None):
        self.seg = seg
        self.props = props or default_properties()
        n = seg.cells
        self.p = np.full(n, float(p))
        self.p_out = float(p)
        if h is None:
            h = float(self.props.liquid_enthalpy(T, p))
        self.h = np.full(n, float(h))
        self.vol = seg.volume / n
        self._update_state()
        self.M = self.rho * self.vol
        self.Tw = self.T.copy()
        self.C = seg.wall_heat_capacity * seg.dx
        self.G = seg.film_coefficient * np.pi * seg.diameter * seg.dx
        self.mdot = 0.0

    # ------------------------------------------------------------------ state
    def _update_state(self):
        try:
            s = self.props.state_ph(self.p, self.h, extra=True)
        except PropertyRangeError as exc:
            raise PropertyRangeError(f"{self.seg.name}: {exc}") from exc
        self.T = s["T"]
        self.x = s["x"]
        self.rho = s["rho"]
        self.subcooling = s["subcooling"]
        self.cp = s["cp"]
        self.mu = s["mu"]

    @property
    def mass(self) -> float:
        return float(np.sum(self.M))

    @property
    def energy(self) -> float:
        return float(np.sum(self.M * self.h) + np.sum(self.C * self.Tw))

    @property
    def two_phase(self) -> bool:
        return bool(np.any(self.x > 0.0))

    def snapshot(self) -> dict:
        return {"h": self.h.copy(), "Tw": self.Tw.copy(), "p": self.p.copy(), "M": self.M.copy()}

    def restore(self, snap: dict) -> None:
        self.h = np.array(snap["h"], dtype=float)
        self.Tw = np.array(snap["Tw"], dtype=float)
        self.p = np.array(snap["p"], dtype=float)
        self.p_out = float(self.p[-1])
        self._update_state()
        self.M = np.array(snap["M"], dtype=float) if "M" in snap else self.rho * self.vol

    # -------------------------------------------------------------- hydraulics
    def cell_drops(self, mdot: float) -> np.ndarray:
        if mdot == 0.0:
            return np.zeros(self.seg.cells)
        A, D = self.seg.area, self.seg.diameter
        Re = abs(mdot) * D / (A * self.mu)
        f = friction_factor(Re)
        return f * (self.seg.dx / D) * mdot * abs(mdot) / (2.0 * self.rho * A * A)

    def resistance(self, mdot_ref: float) -> float:
        """R with dp = R mdot^2, friction factors frozen at mdot_ref."""
        m = max(abs(mdot_ref), 1e-3)
        return float(np.sum(self.cell_drops(m))) / (m * m)

    def set_pressure(self, p_in: float, mdot: float, dt: float | None = None) -> float:
        """Cell-centre pressures for inlet pressure p_in; returns outlet pressure.

        With a wave speed on the segment and a step ``dt`` the pressures relax
        towards the steady profile over one transit time.
        """
        d = self.cell_drops(mdot)
        c = np.cumsum(d)
        p = p_in - c + 0.5 * d
        p_out = float(p_in - c[-1])
        if dt is not None and self.seg.wave_speed is not None:
            w = np.exp(-dt * self.seg.wave_speed / self.seg.length)
            p = p + w * (self.p - p)
            p_out = p_out + w * (self.p_out - p_out)
        self.p = p
        self.p_out = p_out
        lo = self.props.p_min
        if np.any(self.p < lo):
            i = int(np.argmax(self.p < lo))
            raise PropertyRangeError(
                f"{self.seg.name}: pressure {self.p[i] / 1e5:.4f} bara in cell {i} below "
                f"{lo / 1e5:g} bara"
            )
        return p_out

    # ------------------------------------------------------------------ thermal
    def step(self, mdot: float, h_in: float, p_in: float, dt: float,
             hydraulic_flow: float | None = None) -> PipeStepResult:
        """Advance one step with inlet flow mdot (kg/s) at enthalpy h_in.

        Friction follows ``hydraulic_flow`` when given (the solved network flow),
        so expansion surges from flashing upstream do not distort the pressures.
        ``h_in`` is the inlet face enthalpy for either flow direction.
        """
        if dt <= 0:
            raise ValueError("dt must be positive")
        p_out = self.set_pressure(p_in, mdot if hydraulic_flow is None else hydraulic_flow, dt)
        self._update_state()
        n = self.seg.cells
        seg = self.seg
        Q = seg.heat_ingress(self.T) * seg.dx            # W per cell into the wall
        Cdt = self.C / dt
        beta = self.G / (Cdt + self.G)
        # dT/dh of the fluid: 1/cp for liquid, 0 on the saturation line
        dTdh = np.where(self.x > 0.0, 0.0, 1.0 / self.cp)
        drive = beta * (Q + Cdt * (self.Tw - self.T))
        a = self.M / dt + beta * Cdt * dTdh
        m = max(mdot, 0.0)

        # implicit upwind predictor
        hp = np.empty(n)
        up = h_in
        for i in range(n):
            up = (a[i] * self.h[i] + m * up + drive[i]) / (a[i] + m)
            hp[i] = up
        q = beta * (Q + Cdt * (self.Tw - self.T) - Cdt * dTdh * (hp - self.h))

        # conservative corrector with face flows from the new densities
        try:
            rho_new = self.props.state_ph(self.p, hp)["rho"]
        except PropertyRangeError as exc:
            raise PropertyRangeError(f"{seg.name}: {exc}") from exc
        M_new = rho_new * self.vol
        F = np.empty(n + 1)
        F[0] = mdot
        F[1:] = mdot - np.cumsum(M_new - self.M) / dt
        h_face = np.empty(n + 1)
        # the caller owns the inlet face value in both directions, so a reversed
        # inflow leaves with the same enthalpy the upstream component booked
        h_face[0] = h_in
        h_face[1:n] = np.where(F[1:n] >= 0.0, hp[:-1], hp[1:])
        h_face[n] = hp[-1]
        H = self.M * self.h + dt * (F[:-1] * h_face[:-1] - F[1:] * h_face[1:] + q)
        self.h = H / M_new
        self.M = M_new
        self.Tw = self.Tw + (Q - q) * dt / self.C
        self.mdot = mdot
        self._update_state()
        return PipeStepResult(mdot, h_in, float(F[n]), float(h_face[n]), float(np.sum(Q)), p_out)


def pipe_step(pipe: Pipe, h_in: float, mdot: float, dt: float, p_in: float | None = None):
    """Advance a pipe one step; returns (outlet result, wall temperatures)."""
    if p_in is None:
        p_in = float(pipe.p[0] + 0.5 * pipe.cell_drops(mdot)[0])
    res = pipe.step(mdot, h_in, p_in, dt)
    return res, pipe.Tw.copy()
