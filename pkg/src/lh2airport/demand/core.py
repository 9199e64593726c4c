"""Flight-schedule based LH2 and ground-support hydrogen demand."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

EARTH_RADIUS_KM = 6371.0
KM_PER_NM = 1.852
CLASSES = ("regional", "single-aisle", "medium", "long")
SCENARIOS = ("low", "medium", "high")


@dataclass(frozen=True)
class ConversionConstants:
    lhv_jet: float = 42.80          # MJ/kg
    lhv_lh2: float = 119.93         # MJ/kg
    routing_factor: float = 1.12
    lh2_penalty: float = 0.10       # extra energy use of the hydrogen aircraft
    cutoff_nm: float = 2000.0
    shares: dict = field(default_factory=lambda: {"single-aisle": 0.5, "regional": 0.6})

    def __post_init__(self):
        for name in ("lhv_jet", "lhv_lh2", "routing_factor", "cutoff_nm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lh2_penalty < 0:
            raise ValueError("lh2_penalty must be >= 0")
        for cls, s in self.shares.items():
            if cls not in CLASSES or not 0.0 <= s <= 1.0:
                raise ValueError(f"market share for {cls!r} must be in [0, 1]")


@dataclass(frozen=True)
class FlightRecord:
    """One departure; ``time_h`` is hours after midnight."""

    time_h: float
    dest_lat: float
    dest_lon: float
    aircraft_class: str
    origin_lat: float = 52.3086
    origin_lon: float = 4.7639
    meta: str = ""

    def __post_init__(self):
        for lat in (self.dest_lat, self.origin_lat):
            if abs(lat) > 90.0:
                raise ValueError(f"latitude {lat} outside [-90, 90]")
        for lon in (self.dest_lon, self.origin_lon):
            if abs(lon) > 180.0:
                raise ValueError(f"longitude {lon} outside [-180, 180]")
        if not 0.0 <= self.time_h < 24.0:
            raise ValueError(f"departure time {self.time_h} h outside the day")
        if self.aircraft_class not in CLASSES:
            raise ValueError(f"unknown aircraft class {self.aircraft_class!r}")

    @property
    def distance_km(self) -> float:
        return great_circle_km(self.origin_lat, self.origin_lon, self.dest_lat, self.dest_lon)


def great_circle_km(lat1, lon1, lat2, lon2):
    """Spherical distance (km), via atan2 so it stays accurate for tiny and antipodal separations."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dl = np.radians(np.asarray(lon2, dtype=float) - np.asarray(lon1, dtype=float))
    a = np.cos(p2) * np.sin(dl)
    b = np.cos(p1) * np.sin(p2) - np.sin(p1) * np.cos(p2) * np.cos(dl)
    c = np.sin(p1) * np.sin(p2) + np.cos(p1) * np.cos(p2) * np.cos(dl)
    d = EARTH_RADIUS_KM * np.arctan2(np.hypot(a, b), c)
    return float(d) if np.ndim(d) == 0 else d


def destination(lat, lon, bearing_deg, distance_km):
    """Point reached from (lat, lon) along a great circle; degrees in and out."""
    p1, l1 = math.radians(lat), math.radians(lon)
    th = math.radians(bearing_deg)
    dr = distance_km / EARTH_RADIUS_KM
    p2 = math.asin(math.sin(p1) * math.cos(dr) + math.cos(p1) * math.sin(dr) * math.cos(th))
    l2 = l1 + math.atan2(math.sin(th) * math.sin(dr) * math.cos(p1), math.cos(dr) - math.sin(p1) * math.sin(p2))
    lon2 = (math.degrees(l2) + 540.0) % 360.0 - 180.0
    return math.degrees(p2), lon2


# -------------------------------------------------------------------- fuel
@dataclass(frozen=True)
class FuelModel:
    """Per-class burn = reserve + a d + b d^2 (kg, d in km)."""

    coefficients: dict

    @classmethod
    def load(cls, path=None) -> "FuelModel":
        if path is None:
            text = resources.files(__package__).joinpath("data/fuel_model.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        return cls(json.loads(text)["classes"])


def jet_fuel_burn(distance_km, aircraft_class: str, model: FuelModel | None = None):
    """Jet fuel (kg) for a routed distance; callers apply the routing factor."""
    model = model or FuelModel.load()
    if aircraft_class not in model.coefficients:
        raise KeyError(f"fuel model has no class {aircraft_class!r}")
    c = model.coefficients[aircraft_class]
    d = np.asarray(distance_km, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    out = c["reserve"] + c["a"] * d + c["b"] * d * d
    return float(out) if out.ndim == 0 else out


def lh2_mass(m_jet, constants: ConversionConstants | None = None):
    """LH2 mass (kg) with the same energy as ``m_jet`` kg of jet fuel plus the penalty."""
    k = constants or ConversionConstants()
    m = np.asarray(m_jet, dtype=float)
    if np.any(m < 0):
        raise ValueError("jet fuel mass must be >= 0")
    out = m * (k.lhv_jet / k.lhv_lh2) * (1.0 + k.lh2_penalty)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------- eligibility
class ShareSelector:
    """Market-share selection per class.

    Deterministic by default: the k-th eligible flight of a class (k = 0, 1, ...)
    is taken when ceil((k + 1) s) > ceil(k s), which picks a fraction s and
    always takes the first. With an ``rng`` each flight is taken with probability s instead.
    """

    def __init__(self, shares: dict, rng: np.random.Generator | None = None):
        self.shares = dict(shares)
        self.rng = rng
        self.count = {}

    def __call__(self, aircraft_class: str) -> bool:
        s = self.shares.get(aircraft_class, 0.0)
        if self.rng is not None:
            return bool(self.rng.random() < s)
        k = self.count.get(aircraft_class, 0)
        self.count[aircraft_class] = k + 1
        return math.ceil((k + 1) * s - 1e-12) > math.ceil(k * s - 1e-12)


def eligibility(flight: FlightRecord, constants: ConversionConstants | None = None,
                selector: ShareSelector | None = None) -> bool:
    """Within the range cutoff, of a hydrogen-capable class and selected by the share rule."""
    k = constants or ConversionConstants()
    if flight.distance_km > k.cutoff_nm * KM_PER_NM:
        return False
    if k.shares.get(flight.aircraft_class, 0.0) <= 0.0:
        return False
    selector = selector or ShareSelector(k.shares)
    return selector(flight.aircraft_class)


# ---------------------------------------------------------------------- GSE
@dataclass(frozen=True)
class GseScenarioTable:
    """Ground-support hydrogen per departure (kg) by class and scenario."""

    per_flight: dict

    def __post_init__(self):
        for cls, row in self.per_flight.items():
            vals = [row[s] for s in SCENARIOS]
            if min(vals) < 0 or not vals[0] <= vals[1] <= vals[2]:
                raise ValueError(f"{cls}: need 0 <= low <= medium <= high")

    @classmethod
    def load(cls, path=None) -> "GseScenarioTable":
        if path is None:
            text = resources.files(__package__).joinpath("data/gse_table.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        return cls(json.loads(text)["classes"])

    def demand(self, aircraft_class: str, scenario: str) -> float:
        if scenario not in SCENARIOS:
            raise KeyError(f"unknown scenario {scenario!r}")
        return float(self.per_flight[aircraft_class][scenario])


# ------------------------------------------------------------------- series
LH2_THRESHOLDS = (600.0, 2000.0, 5000.0)


def flight_demand(schedule, constants=None, fuel_model=None, gse_table=None, scenario="medium",
                  rng: np.random.Generator | None = None) -> list:
    """Per-flight records: distance, eligibility, LH2 (kg) and GSE hydrogen (kg)."""
    k = constants or ConversionConstants()
    fuel_model = fuel_model or FuelModel.load()
    gse_table = gse_table or GseScenarioTable.load()
    selector = ShareSelector(k.shares, rng)
    rows = []
    for f in sorted(schedule, key=lambda r: r.time_h):
        d = f.distance_km
        ok = eligibility(f, k, selector)
        lh2 = lh2_mass(jet_fuel_burn(d * k.routing_factor, f.aircraft_class, fuel_model), k) if ok else 0.0
        rows.append({"time_h": f.time_h, "hour": int(f.time_h), "class": f.aircraft_class, "distance_km": d,
                     "eligible": ok, "lh2_kg": lh2, "gh2_kg": gse_table.demand(f.aircraft_class, scenario)})
    return rows


def hourly_series(schedule, constants=None, fuel_model=None, gse_table=None, scenario="medium",
                  rng: np.random.Generator | None = None, distance_bins=None, lh2_bins=None) -> dict:
    """Hourly LH2 (t) and GSE hydrogen (kg) by departure hour, plus histograms and shares.

    LH2 is drawn in the departure hour. Shares are the fractions of
    hydrogen flights needing less than each of 600 kg, 2 t and 5 t.
    """
    flights = flight_demand(schedule, constants, fuel_model, gse_table, scenario, rng)
    lh2 = np.zeros(24)
    gh2 = np.zeros(24)
    for r in flights:
        lh2[r["hour"]] += r["lh2_kg"] / 1000.0
        gh2[r["hour"]] += r["gh2_kg"]
    dist = np.array([r["distance_km"] for r in flights])
    need = np.array([r["lh2_kg"] for r in flights if r["eligible"]])
    distance_bins = np.arange(0.0, 12001.0, 250.0) if distance_bins is None else np.asarray(distance_bins)
    lh2_bins = np.arange(0.0, 10001.0, 250.0) if lh2_bins is None else np.asarray(lh2_bins)
    shares = {t: (float(np.mean(need < t)) if need.size else 0.0) for t in LH2_THRESHOLDS}
    return {
        "hours": np.arange(24),
        "lh2_t": lh2,
        "gh2_kg": gh2,
        "flights": flights,
        "distance_hist": (distance_bins, np.histogram(dist, bins=distance_bins)[0]),
        "lh2_hist": (lh2_bins, np.histogram(need, bins=lh2_bins)[0]),
        "shares": shares,
    }
