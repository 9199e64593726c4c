"""Parahydrogen property correlations for the 18-30 K liquid/vapor region.

All functions take SI units (K, Pa, J/kg) and accept scalars or numpy
arrays. Enthalpies carry a constant reference offset (see the coefficient
file); only differences are physical.

Saturation curve::

    ln(p_sat / Pa) = c0 + c1/T + c2*T + c3*T**2 + c4*ln(T)

Saturated-liquid properties are polynomials in (T - t_ref). Vapor-side
properties are polynomials in (T_sat(p) - t_ref). Subcooled liquid uses

    h_l(T, p)   = h_l,sat(T) + (p - p_sat(T)) / rho_l,sat(T)
    rho_l(T, p) = rho_l,sat(T) * (1 + kappa * (p - p_sat(T)))
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _kernels as _k

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_COEFFICIENTS = DATA_DIR / "parahydrogen_coefficients.txt"
REFERENCE_TABLE = DATA_DIR / "parahydrogen_reference.csv"


def _horner(c, t):
    out = c[0] + 0.0 * t
    for a in c[1:]:
        out = out * t + a
    return out


class PropertyRangeError(ValueError):
    """State outside the range covered by the correlations."""


_POLY_KEYS = ("rho_l", "h_l", "cp_l", "mu_l", "h_fg", "ln_rho_v")
_SCALAR_KEYS = ("t_ref", "t_min", "t_max", "p_min", "p_max", "kappa_l", "enthalpy_offset")


@dataclass(frozen=True)
class PropertySet:
    """Immutable coefficient set with the property functions bound to it."""

    sat_lnp: tuple[float, ...]
    rho_l: tuple[float, ...]
    h_l: tuple[float, ...]
    cp_l: tuple[float, ...]
    mu_l: tuple[float, ...]
    h_fg: tuple[float, ...]
    ln_rho_v: tuple[float, ...]
    t_ref: float = 21.0
    t_min: float = 18.0
    t_max: float = 30.0
    p_min: float = 0.8e5
    p_max: float = 3.0e5
    kappa_l: float = 2.0e-8
    enthalpy_offset: float = 0.0
    source: str = field(default="", compare=False)

    # ------------------------------------------------------------------ io
    @classmethod
    def load(cls, path: str | Path = DEFAULT_COEFFICIENTS) -> "PropertySet":
        values: dict[str, object] = {}
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, rhs = line.partition("=")
                key = key.strip()
                nums = [float(tok) for tok in rhs.split()]
                if key == "sat_lnp" or key in _POLY_KEYS:
                    values[key] = tuple(nums)
                elif key in _SCALAR_KEYS:
                    values[key] = nums[0]
                else:
                    raise ValueError(f"{path}: unknown coefficient key {key!r}")
        missing = {"sat_lnp", *_POLY_KEYS} - values.keys()
        if missing:
            raise ValueError(f"{path}: missing coefficient keys {sorted(missing)}")
        return cls(**values, source=str(path))

    def dump(self, path: str | Path, header: str = "") -> None:
        with open(path, "w") as fh:
            for line in header.splitlines():
                fh.write(f"# {line}\n".replace("# \n", "#\n"))
            for key in _SCALAR_KEYS:
                fh.write(f"{key} = {getattr(self, key)!r}\n")
            fh.write("sat_lnp = " + " ".join(repr(c) for c in self.sat_lnp) + "\n")
            for key in _POLY_KEYS:
                fh.write(f"{key} = " + " ".join(repr(c) for c in getattr(self, key)) + "\n")

    # --------------------------------------------------------- range checks
    def _check_T(self, T, what="temperature"):
        T = np.asarray(T, dtype=float)
        if np.any(~np.isfinite(T)) or np.any(T < self.t_min - 1e-9) or np.any(T > self.t_max + 1e-9):
            bad = T[(T < self.t_min) | (T > self.t_max) | ~np.isfinite(T)] if T.ndim else T
            raise PropertyRangeError(
                f"{what} {np.atleast_1d(bad)[0]:.4f} K outside valid range "
                f"[{self.t_min:g} K, {self.t_max:g} K]"
            )
        return T

    def _check_p(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(~np.isfinite(p)) or np.any(p < self.p_min * (1 - 1e-12)) or np.any(p > self.p_max * (1 + 1e-12)):
            bad = p[(p < self.p_min) | (p > self.p_max) | ~np.isfinite(p)] if p.ndim else p
            raise PropertyRangeError(
                f"pressure {np.atleast_1d(bad)[0] / 1e5:.4f} bara outside valid range "
                f"[{self.p_min / 1e5:g} bara, {self.p_max / 1e5:g} bara]"
            )
        return p

    # ----------------------------------------------------------- saturation
    def _lnp(self, T):
        c = self.sat_lnp
        return c[0] + c[1] / T + c[2] * T + c[3] * T * T + c[4] * np.log(T)

    def _dlnp_dT(self, T):
        c = self.sat_lnp
        return -c[1] / (T * T) + c[2] + 2.0 * c[3] * T + c[4] / T

    def saturation_pressure(self, T):
        T = self._check_T(T)
        return np.exp(self._lnp(T))

    def dpsat_dT(self, T):
        T = np.asarray(T, dtype=float)
        return np.exp(self._lnp(T)) * self._dlnp_dT(T)

    def saturation_temperature(self, p):
        p = self._check_p(p)
        sat, _ = self._packed
        return _k.tsat_vec(sat, np.atleast_1d(p).ravel()).reshape(p.shape)

    # ------------------------------------------------ saturated liquid (T)
    def _poly(self, key, T):
        return _horner(getattr(self, key), np.asarray(T, dtype=float) - self.t_ref)

    def saturated_liquid_density(self, T):
        return self._poly("rho_l", self._check_T(T))

    def saturated_liquid_enthalpy(self, T):
        return self._poly("h_l", self._check_T(T)) + self.enthalpy_offset

    def liquid_heat_capacity(self, T):
        return self._poly("cp_l", self._check_T(T))

    def liquid_viscosity(self, T):
        return self._poly("mu_l", self._check_T(T))

    # --------------------------------------------------- subcooled liquid
    def liquid_enthalpy(self, T, p):
        """Liquid enthalpy with the incompressible pressure correction."""
        T = self._check_T(T)
        psat = np.exp(self._lnp(T))
        return self._poly("h_l", T) + self.enthalpy_offset + (p - psat) / self._poly("rho_l", T)

    def liquid_density(self, T, p):
        T = self._check_T(T)
        p = np.asarray(p, dtype=float)
        psat = np.exp(self._lnp(T))
        if np.any(p < psat * (1 - 1e-9)):
            raise PropertyRangeError(
                "state is superheated (T above saturation at this pressure); "
                "liquid density undefined"
            )
        return self._poly("rho_l", T) * (1.0 + self.kappa_l * (p - psat))

    def liquid_internal_energy(self, T, p):
        return self.liquid_enthalpy(T, p) - np.asarray(p) / self.liquid_density(T, p)

    # ---------------------------------------------------- vapor / latent
    def latent_heat(self, p):
        Ts = self.saturation_temperature(p)
        return self._poly("h_fg", Ts)

    def vapor_enthalpy(self, p):
        Ts = self.saturation_temperature(p)
        return self._poly("h_l", Ts) + self.enthalpy_offset + self._poly("h_fg", Ts)

    def vapor_density(self, p):
        Ts = self.saturation_temperature(p)
        return np.exp(self._poly("ln_rho_v", Ts))

    def saturation_state(self, p):
        """Saturated liquid and vapor properties at pressure p.

        Returns a dict with T, h_l, h_v, h_fg, rho_l, rho_v, u_l, u_v.
        """
        p = self._check_p(p)
        sat, poly = self._packed
        r = _k.sat_state_vec(sat, poly, self.t_ref, self.enthalpy_offset, np.atleast_1d(p).ravel())
        Ts, h_l, h_v, h_fg, rho_l, rho_v = (row.reshape(p.shape) for row in r)
        return {
            "T": Ts, "h_l": h_l, "h_v": h_v, "h_fg": h_fg, "rho_l": rho_l, "rho_v": rho_v,
            "u_l": h_l - p / rho_l, "u_v": h_v - p / rho_v,
        }

    # ----------------------------------------------------------- (p, h)
    def state_ph(self, p, h, extra: bool = False):
        """Temperature, quality, density and subcooling from pressure and enthalpy.

        Works elementwise on arrays. Superheated vapor raises PropertyRangeError.
        With ``extra`` the liquid heat capacity and viscosity at T are included.
        """
        p = self._check_p(p)
        h = np.asarray(h, dtype=float)
        p, h = np.broadcast_arrays(p, h)
        shape = p.shape
        pf = np.ascontiguousarray(p, dtype=float).ravel()
        hf = np.ascontiguousarray(h, dtype=float).ravel()
        out = np.empty((7, pf.size))
        sat, poly = self._packed
        bad = _k.state_ph(sat, poly, self.t_ref, self.enthalpy_offset, self.kappa_l,
                          self.t_min, self.t_max, pf, hf, out)
        if bad >= 0:
            raise PropertyRangeError(
                f"superheated vapor at {pf[bad] / 1e5:.4f} bara is outside the property model"
            )
        T = out[0]
        if np.any(T < self.t_min - 1e-9):
            raise PropertyRangeError(
                f"temperature {np.min(T):.4f} K outside valid range [{self.t_min:g} K, {self.t_max:g} K]"
            )
        keys = ("T", "x", "rho", "subcooling", "T_sat") + (("cp", "mu") if extra else ())
        return {k: out[i].reshape(shape) for i, k in enumerate(keys)}

    @cached_property
    def _packed(self):
        width = max(len(getattr(self, k)) for k in _POLY_KEYS)
        poly = np.zeros((len(_POLY_KEYS), width))
        for i, k in enumerate(_POLY_KEYS):
            c = getattr(self, k)
            poly[i, width - len(c):] = c
        return np.array(self.sat_lnp, dtype=float), poly


@dataclass(frozen=True)
class FluidState:
    """Point state of parahydrogen defined by pressure and specific enthalpy."""

    pressure: float
    enthalpy: float
    temperature: float
    quality: float
    density: float
    subcooling: float

    @classmethod
    def from_ph(cls, p: float, h: float, props: PropertySet | None = None) -> "FluidState":
        s = (props or default_properties()).state_ph(p, h)
        return cls(float(p), float(h), float(s["T"]), float(s["x"]), float(s["rho"]), float(s["subcooling"]))

    @classmethod
    def from_pT(cls, p: float, T: float, props: PropertySet | None = None) -> "FluidState":
        props = props or default_properties()
        return cls.from_ph(p, float(props.liquid_enthalpy(T, p)), props)


_DEFAULT: PropertySet | None = None


def default_properties() -> PropertySet:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = PropertySet.load()
    return _DEFAULT


# Thin module-level wrappers over the shipped coefficient set.

def saturation_temperature(p):
    return default_properties().saturation_temperature(p)


def saturation_pressure(T):
    return default_properties().saturation_pressure(T)


def liquid_density(T, p):
    return default_properties().liquid_density(T, p)


def latent_heat(p):
    return default_properties().latent_heat(p)


def liquid_enthalpy(T, p):
    return default_properties().liquid_enthalpy(T, p)


def vapor_enthalpy(p):
    return default_properties().vapor_enthalpy(p)
