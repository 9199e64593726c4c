"""Variance-based global sensitivity analysis and uncertainty histograms.

Sampling follows the Saltelli cross-matrix scheme on a Sobol' sequence; first
order indices use the Saltelli (2010) estimator and total indices the Jansen
estimator. Confidence half-widths come from a bootstrap over base samples.
"""
from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, qmc


class ZeroVarianceError(ValueError):
    """All model outputs are identical, so no index is defined."""


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered uniform, independent parameters as (name, low, high) triples."""

    params: tuple

    def __post_init__(self):
        names = [p[0] for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")
        for name, lo, hi in self.params:
            if not lo < hi:
                raise ValueError(f"{name}: need lower < upper bound")

    @property
    def names(self) -> list:
        return [p[0] for p in self.params]

    @property
    def dim(self) -> int:
        return len(self.params)

    def scale(self, unit: np.ndarray) -> np.ndarray:
        lo = np.array([p[1] for p in self.params], dtype=float)
        hi = np.array([p[2] for p in self.params], dtype=float)
        return lo + unit * (hi - lo)


def saltelli_sample(space: ParameterSpace, n: int, seed: int | None = None, skip: int = 0) -> np.ndarray:
    """Sample matrix with n (2d + 2) rows.

    Each base point j contributes a block of 2d + 2 consecutive rows: A_j, the
    d rows of A_j with column i taken from B_j, the d rows of B_j with column i
    taken from A_j, then B_j. A and B are the two halves of a 2d-dimensional
    Sobol' point. ``seed=None`` uses the unscrambled sequence; an integer seed
    scrambles it. ``skip`` points are discarded first.
    """
    d = space.dim
    if d == 0:
        raise ValueError("parameter space is empty")
    if n < 1 or n & (n - 1):
        raise ValueError("base sample count must be a power of two")
    eng = qmc.Sobol(2 * d, scramble=seed is not None, seed=seed)
    if skip:
        eng.fast_forward(skip)
    base = eng.random(n)
    A, B = base[:, :d], base[:, d:]
    out = np.empty((n * (2 * d + 2), d))
    k = 0
    for j in range(n):
        out[k] = A[j]
        k += 1
        for i in range(d):
            row = A[j].copy()
            row[i] = B[j, i]
            out[k] = row
            k += 1
        for i in range(d):
            row = B[j].copy()
            row[i] = A[j, i]
            out[k] = row
            k += 1
        out[k] = B[j]
        k += 1
    return space.scale(out)


@dataclass
class IndexReport:
    """First-order and total indices with bootstrap confidence half-widths."""

    names: list
    S1: np.ndarray
    ST: np.ndarray
    S1_conf: np.ndarray
    ST_conf: np.ndarray
    n: int
    output: str = "y"

    def as_table(self) -> dict:
        return {name: {"S1": self.S1[i], "S1_conf": self.S1_conf[i], "ST": self.ST[i],
                       "ST_conf": self.ST_conf[i], "N": self.n}
                for i, name in enumerate(self.names)}

    def ranking(self) -> list:
        """Parameter names by decreasing total index."""
        return [self.names[i] for i in np.argsort(-self.ST, kind="stable")]


def _split(y: np.ndarray, d: int):
    blocks = y.reshape(-1, 2 * d + 2)
    return blocks[:, 0], blocks[:, 1:d + 1], blocks[:, -1]


def _estimate(fA, fAB, fB):
    var = np.var(np.concatenate([fA, fB]), ddof=0)
    S1 = np.mean(fB[:, None] * (fAB - fA[:, None]), axis=0) / var
    ST = 0.5 * np.mean((fA[:, None] - fAB) ** 2, axis=0) / var
    return S1, ST


def sobol_indices(space: ParameterSpace, outputs, n_boot: int = 200, conf: float = 0.95,
                  seed: int = 0, output: str = "y") -> IndexReport:
    """Indices from outputs evaluated on :func:`saltelli_sample` rows, in order."""
    y = np.asarray(outputs, dtype=float).ravel()
    d = space.dim
    if y.size == 0 or y.size % (2 * d + 2):
        raise ValueError(f"output count {y.size} is not a multiple of 2d + 2 = {2 * d + 2}")
    if not np.all(np.isfinite(y)):
        raise ValueError("outputs must be finite")
    fA, fAB, fB = _split(y, d)
    if np.var(np.concatenate([fA, fB])) == 0.0:
        raise ZeroVarianceError(f"{output}: output variance is zero; indices are undefined")
    S1, ST = _estimate(fA, fAB, fB)
    n = fA.size
    rng = np.random.default_rng(seed)
    boot1 = np.empty((n_boot, d))
    bootT = np.empty((n_boot, d))
    for b in range(n_boot):
        idx = rng.integers(0, n, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            boot1[b], bootT[b] = _estimate(fA[idx], fAB[idx], fB[idx])
    z = norm.ppf(0.5 + conf / 2.0)
    return IndexReport(space.names, S1, ST, z * np.nanstd(boot1, axis=0, ddof=1),
                       z * np.nanstd(bootT, axis=0, ddof=1), n, output)


# ------------------------------------------------------------------ test function
def ishigami(x: np.ndarray, a: float = 7.0, b: float = 0.1) -> np.ndarray:
    x = np.atleast_2d(x)
    return np.sin(x[:, 0]) + a * np.sin(x[:, 1]) ** 2 + b * x[:, 2] ** 4 * np.sin(x[:, 0])


def ishigami_indices(a: float = 7.0, b: float = 0.1):
    """Analytic (S1, ST) of the Ishigami function on [-pi, pi]^3."""
    pi = np.pi
    v1 = 0.5 * (1.0 + b * pi ** 4 / 5.0) ** 2
    v2 = a * a / 8.0
    v13 = b * b * pi ** 8 * (1.0 / 18.0 - 1.0 / 50.0)
    var = v1 + v2 + v13
    S1 = np.array([v1, v2, 0.0]) / var
    ST = np.array([v1 + v13, v2, v13]) / var
    return S1, ST


ISHIGAMI_SPACE = ParameterSpace(tuple((f"x{i + 1}", -np.pi, np.pi) for i in range(3)))


# ------------------------------------------------------------------- histograms
def uq_histograms(outputs: dict, variables, bins: int = 20) -> dict:
    """Histograms on shared bin edges so cases can be overlaid.

    ``outputs`` maps case name to ``{variable: samples}``. Returns
    ``{variable: {"edges": edges, case: counts, ...}}``.
    """
    out = {}
    for var in variables:
        data = {case: np.asarray(vals[var], dtype=float) for case, vals in outputs.items()}
        finite = np.concatenate([v[np.isfinite(v)] for v in data.values()])
        if finite.size == 0:
            raise ValueError(f"{var}: no finite samples")
        lo, hi = float(finite.min()), float(finite.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, bins + 1)
        out[var] = {"edges": edges}
        for case, v in data.items():
            out[var][case] = np.histogram(v[np.isfinite(v)], bins=edges)[0]
    return out


# ------------------------------------------------------------- transport driver
TRANSPORT_SPACE = ParameterSpace((
    ("T_amb", 278.0, 308.0),
    ("pump_eta", 0.5, 0.7),
    ("pump_V0", 0.08, 0.10),
    ("insulation", 0.025, 0.05),
))

# diameter (m) and fixed shut-off pressure rise (Pa) per line size
TRANSPORT_CASES = {"6in": (0.16, 1.35e5), "8in": (0.22, 0.6e5)}
TRANSPORT_OUTPUTS = ("subcooling_K", "Q_ave_W_per_m", "pump_loss_W", "pump_shaft_W")


def _transport_eval(args):
    from .scenarios.transport import run_transport
    base, row = args
    cfg = dataclasses.replace(base, **dict(zip(TRANSPORT_SPACE.names, map(float, row))))
    rec = run_transport(cfg, record_series=False)
    vals = [float(rec.summary[k]) for k in TRANSPORT_OUTPUTS]
    return vals, rec.summary["phase"]


def evaluate(fn, rows, workers: int = 1, chunksize: int = 8) -> list:
    """Map ``fn`` over ``rows``, on a process pool when ``workers > 1``; order is kept."""
    if workers <= 1:
        return [fn(r) for r in rows]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, rows, chunksize=chunksize))


def transport_uq(case: str, n: int = 128, seed: int | None = None, workers: int = 1, base=None) -> dict:
    """Sample the transport line over :data:`TRANSPORT_SPACE` for one line size.

    Returns the sample matrix, outputs per variable, phase labels and an
    :class:`IndexReport` per output.
    """
    from .scenarios.config import TransportCaseConfig
    diameter, dp0 = TRANSPORT_CASES[case]
    base = base or TransportCaseConfig()
    base = dataclasses.replace(base, diameter=diameter, pump_dp0=dp0)
    X = saltelli_sample(TRANSPORT_SPACE, n, seed=seed)
    res = evaluate(_transport_eval, [(base, row) for row in X], workers)
    Y = np.array([r[0] for r in res])
    phases = [r[1] for r in res]
    outputs = {k: Y[:, i] for i, k in enumerate(TRANSPORT_OUTPUTS)}
    indices = {k: sobol_indices(TRANSPORT_SPACE, v, output=k) for k, v in outputs.items()
               if np.all(np.isfinite(v)) and np.var(v) > 0.0}
    return {"case": case, "samples": X, "outputs": outputs, "phases": phases, "indices": indices}
