"""Equilibrium (m, U, V) flash for a closed parahydrogen volume."""
from __future__ import annotations

from dataclasses import dataclass

from scipy.optimize import brentq

from . import _kernels as _k
from .properties import PropertyRangeError, PropertySet, default_properties


@dataclass(frozen=True)
class FlashResult:
    pressure: float
    temperature: float
    quality: float          # vapor mass fraction m_v / m
    level: float            # V_liquid / V
    liquid_mass: float
    vapor_mass: float
    rho_l: float
    rho_v: float
    u_l: float
    u_v: float
    h_l: float
    h_v: float

    @property
    def mass(self) -> float:
        return self.liquid_mass + self.vapor_mass

    @property
    def internal_energy(self) -> float:
        vap = self.vapor_mass * self.u_v if self.vapor_mass > 0.0 else 0.0
        return self.liquid_mass * self.u_l + vap


def _liquid_full(props: PropertySet, mass: float, energy: float, volume: float) -> FlashResult | None:
    """Compressed-liquid solution, or None if the liquid would not fill the volume."""
    sat, poly = props._packed
    t_ref, off = props.t_ref, props.enthalpy_offset
    u = energy / mass
    rho = mass / volume
    lo, hi = props.t_min, 26.0
    # saturated liquid is never denser than at t_min
    if rho < _k.horner(poly[_k.RHO], hi - t_ref):
        return None

    def u_sat(T):
        return _k.u_sat_liquid(sat, poly, t_ref, off, T)

    if not (u_sat(lo) <= u <= u_sat(hi)):
        return None
    T0 = brentq(lambda T: u_sat(T) - u, lo, hi, xtol=1e-12)
    if rho < float(props.saturated_liquid_density(T0)):
        return None

    def pressure(T):
        psat = float(props.saturation_pressure(T))
        return psat + (rho / float(props.saturated_liquid_density(T)) - 1.0) / props.kappa_l

    def resid(T):
        return float(props.liquid_internal_energy(T, pressure(T))) - u

    # below t_sat_lo the liquid would be saturated at a density above rho
    if float(props.saturated_liquid_density(lo)) <= rho:
        t_sat_lo = lo
    else:
        t_sat_lo = brentq(lambda T: float(props.saturated_liquid_density(T)) - rho, lo, T0, xtol=1e-13)
    T = brentq(resid, t_sat_lo, min(hi, T0 + 1.0), xtol=1e-13)
    p = pressure(T)
    if p > props.p_max:
        raise PropertyRangeError(
            f"liquid-full volume reaches {p / 1e5:.3f} bara, above the valid range "
            f"[{props.p_min / 1e5:g} bara, {props.p_max / 1e5:g} bara]"
        )
    h = float(props.liquid_enthalpy(T, p))
    ul = h - p / rho
    return FlashResult(p, T, 0.0, 1.0, mass, 0.0, rho, float("nan"), ul, float("nan"), h, float("nan"))


def flash_uv(mass: float, energy: float, volume: float, props: PropertySet | None = None,
             p_guess: float | None = None) -> FlashResult:
    """Vapor-liquid equilibrium state of ``mass`` kg holding ``energy`` J in ``volume`` m3.

    Liquid and vapor share T = T_sat(p) and split the volume. A volume full of
    liquid is resolved with the liquid compressibility of the property set.
    ``p_guess`` narrows the initial pressure bracket (warm start).

    Raises PropertyRangeError if the equilibrium pressure falls outside the
    property range or the contents would be entirely vapor.
    """
    props = props or default_properties()
    if mass <= 0.0 or volume <= 0.0:
        raise ValueError("flash_uv needs positive mass and volume")
    v = volume / mass
    u = energy / mass

    sat, poly = props._packed
    t_ref, off = props.t_ref, props.enthalpy_offset

    def f(q):
        return _k.two_phase_u(sat, poly, t_ref, off, q, v)[0] - u

    p_lo, p_hi = props.p_min, props.p_max
    a, b = p_lo, p_hi
    if p_guess is not None and p_lo < p_guess < p_hi:
        a, b = max(p_lo, 0.995 * p_guess), min(p_hi, 1.005 * p_guess)
        if f(a) > 0.0 or f(b) < 0.0:
            a, b = p_lo, p_hi
    err = None
    if a == p_lo and f(p_lo) > 0.0:
        err = f"equilibrium pressure below {p_lo / 1e5:g} bara"
    elif b == p_hi and f(p_hi) < 0.0:
        err = f"equilibrium pressure above {p_hi / 1e5:g} bara"
    x = -1.0
    if err is None:
        p = brentq(f, a, b, xtol=1e-7, rtol=1e-15, maxiter=200)
        Ts, hl, hv, hfg, rhol, rhov = _k.sat_state(sat, poly, t_ref, off, p)
        x = (v - 1.0 / rhol) / (1.0 / rhov - 1.0 / rhol)
    if x < 0.0:
        # no two-phase equilibrium: the liquid fills the volume
        full = _liquid_full(props, mass, energy, volume)
        if full is not None:
            return full
        raise PropertyRangeError(
            f"{err or 'no equilibrium state'} (valid range [{p_lo / 1e5:g} bara, {p_hi / 1e5:g} bara])"
        )
    if x >= 1.0:
        raise PropertyRangeError("contents fully vaporised; the tank model covers two-phase states only")
    m_v = x * mass
    m_l = mass - m_v
    return FlashResult(
        pressure=float(p), temperature=Ts, quality=float(x), level=float(m_l / rhol / volume),
        liquid_mass=float(m_l), vapor_mass=float(m_v), rho_l=rhol, rho_v=rhov,
        u_l=hl - p / rhol, u_v=hv - p / rhov, h_l=hl, h_v=hv,
    )


def vent_to_pressure(mass: float, energy: float, volume: float, p_set: float,
                     props: PropertySet | None = None) -> float:
    """Saturated-vapor mass to remove so the equilibrium pressure equals ``p_set``.

    The vented stream carries h_v(p_set). At fixed pressure the mass and
    energy balances are linear in the vented mass, so this is closed form.
    """
    props = props or default_properties()
    s = props.saturation_state(p_set)
    vl, vv = 1.0 / float(s["rho_l"]), 1.0 / float(s["rho_v"])
    ul, uv, hv = float(s["u_l"]), float(s["u_v"]), float(s["h_v"])
    a = (uv - ul) / (vv - vl)
    base = ul - vl * a
    # energy - m_vent*h_v == (mass - m_vent)*base + volume*a
    return (energy - mass * base - volume * a) / (hv - base)


def mixture_energy(p: float, level: float, volume: float, props: PropertySet | None = None):
    """(mass, internal energy) of a saturated tank at pressure p and liquid level."""
    props = props or default_properties()
    s = props.saturation_state(p)
    m_l = level * volume * float(s["rho_l"])
    m_v = (1.0 - level) * volume * float(s["rho_v"])
    return m_l + m_v, m_l * float(s["u_l"]) + m_v * float(s["u_v"])
