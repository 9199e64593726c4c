"""Compiled scalar kernels behind the hot property paths.

Coefficients arrive packed: ``sat`` holds the five saturation-curve
coefficients and ``poly`` has one row per polynomial property in the order
rho_l, h_l, cp_l, mu_l, h_fg, ln_rho_v (left-padded with zeros).
"""
import math

import numpy as np
from numba import njit

RHO, HL, CP, MU, HFG, LNRV = range(6)


@njit(cache=True)
def horner(c, t):
    out = 0.0
    for a in c:
        out = out * t + a
    return out


@njit(cache=True)
def dhorner(c, t):
    n = c.shape[0]
    out = 0.0
    for i in range(n - 1):
        out = out * t + c[i] * (n - 1 - i)
    return out


@njit(cache=True)
def lnp(sat, T):
    return sat[0] + sat[1] / T + sat[2] * T + sat[3] * T * T + sat[4] * math.log(T)


@njit(cache=True)
def dlnp(sat, T):
    return -sat[1] / (T * T) + sat[2] + 2.0 * sat[3] * T + sat[4] / T


@njit(cache=True)
def tsat(sat, p):
    target = math.log(p)
    T = 1.0 / (1.0 / 20.3 - (target - math.log(1.0e5)) / 110.0)
    for _ in range(50):
        step = (lnp(sat, T) - target) / dlnp(sat, T)
        T -= step
        if abs(step) < 1e-12:
            break
    return T


@njit(cache=True)
def sat_state(sat, poly, t_ref, off, p):
    """T, h_l, h_v, h_fg, rho_l, rho_v on the saturation line at p."""
    T = tsat(sat, p)
    t = T - t_ref
    hl = horner(poly[HL], t) + off
    hfg = horner(poly[HFG], t)
    return T, hl, hl + hfg, hfg, horner(poly[RHO], t), math.exp(horner(poly[LNRV], t))


@njit(cache=True)
def sat_state_vec(sat, poly, t_ref, off, p):
    n = p.shape[0]
    out = np.empty((6, n))
    for i in range(n):
        r = sat_state(sat, poly, t_ref, off, p[i])
        for k in range(6):
            out[k, i] = r[k]
    return out


@njit(cache=True)
def tsat_vec(sat, p):
    out = np.empty(p.shape[0])
    for i in range(p.shape[0]):
        out[i] = tsat(sat, p[i])
    return out


@njit(cache=True)
def liquid_T(sat, poly, t_ref, off, p, h, T):
    """Invert h = h_sat(T) + (p - p_sat(T)) / rho_sat(T) by Newton from T."""
    h0 = h - off
    for _ in range(50):
        t = T - t_ref
        psat = math.exp(lnp(sat, T))
        rho = horner(poly[RHO], t)
        g = horner(poly[HL], t) + (p - psat) / rho - h0
        dg = dhorner(poly[HL], t) - psat * dlnp(sat, T) / rho - (p - psat) * dhorner(poly[RHO], t) / (rho * rho)
        step = g / dg
        T -= step
        if abs(step) < 1e-11:
            break
    return T


@njit(cache=True)
def state_ph(sat, poly, t_ref, off, kappa, t_min, t_max, p, h, out):
    """Fill out[0..6] = T, x, rho, subcooling, T_sat, cp_l, mu_l per point.

    Returns -1 on success or the index of the first superheated point.
    """
    for i in range(p.shape[0]):
        Ts, hl, hv, hfg, rhol, rhov = sat_state(sat, poly, t_ref, off, p[i])
        hi = h[i]
        if hi > hv * (1.0 + 1e-12):
            return i
        if hi < hl:
            cps = horner(poly[CP], Ts - t_ref)
            T = liquid_T(sat, poly, t_ref, off, p[i], hi, Ts - (hl - hi) / cps)
            psat = math.exp(lnp(sat, T))
            x = 0.0
            rho = horner(poly[RHO], T - t_ref) * (1.0 + kappa * (p[i] - psat))
        else:
            T = Ts
            x = (hi - hl) / hfg
            rho = 1.0 / ((1.0 - x) / rhol + x / rhov)
        tc = min(max(T, t_min), t_max) - t_ref
        out[0, i] = T
        out[1, i] = x
        out[2, i] = rho
        out[3, i] = Ts - T
        out[4, i] = Ts
        out[5, i] = horner(poly[CP], tc)
        out[6, i] = horner(poly[MU], tc)
    return -1


@njit(cache=True)
def two_phase_u(sat, poly, t_ref, off, p, v):
    """Specific internal energy and quality of a saturated mixture at (p, v)."""
    Ts, hl, hv, hfg, rhol, rhov = sat_state(sat, poly, t_ref, off, p)
    vl = 1.0 / rhol
    vv = 1.0 / rhov
    x = (v - vl) / (vv - vl)
    ul = hl - p * vl
    uv = hv - p * vv
    return ul + x * (uv - ul), x


@njit(cache=True)
def u_sat_liquid(sat, poly, t_ref, off, T):
    t = T - t_ref
    return horner(poly[HL], t) + off - math.exp(lnp(sat, T)) / horner(poly[RHO], t)
