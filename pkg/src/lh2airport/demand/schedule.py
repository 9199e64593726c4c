"""Flight schedule files and a seeded synthetic hub-airport schedule."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import FlightRecord, destination

# departures per hour, shaped like a European hub: quiet night, first wave at 07:00
HOUR_WEIGHTS = np.array([
    0.2, 0.1, 0.1, 0.1, 0.2, 0.8, 4.5, 8.0, 6.0, 5.2, 5.5, 5.0,
    4.8, 5.0, 5.4, 5.0, 5.3, 5.6, 5.0, 4.8, 4.4, 3.2, 1.6, 0.6,
])

# (share of departures, distance range km, class mix)
DISTANCE_BANDS = (
    (0.42, (150.0, 926.0), {"regional": 0.55, "single-aisle": 0.45}),
    (0.36, (926.0, 3704.0), {"single-aisle": 0.9, "medium": 0.1}),
    (0.22, (3704.0, 11000.0), {"medium": 0.4, "long": 0.6}),
)

COLUMNS = ("time", "dest_lat", "dest_lon", "class", "origin_lat", "origin_lon", "meta")


def synthetic_schedule(seed: int = 0, departures: int = 500, origin=(52.3086, 4.7639)) -> list:
    """Reproducible one-day departure list from ``origin``."""
    rng = np.random.default_rng(seed)
    # departures per hour by largest remainder, so the wave shape is exact
    quota = departures * HOUR_WEIGHTS / HOUR_WEIGHTS.sum()
    per_hour = np.floor(quota).astype(int)
    extra = departures - per_hour.sum()
    per_hour[np.argsort(-(quota - per_hour), kind="stable")[:extra]] += 1
    hours = rng.permutation(np.repeat(np.arange(24), per_hour))
    minutes = rng.integers(0, 60, size=departures)
    band_p = np.array([b[0] for b in DISTANCE_BANDS])
    bands = rng.choice(len(DISTANCE_BANDS), size=departures, p=band_p / band_p.sum())
    out = []
    for i in range(departures):
        _, (lo, hi), mix = DISTANCE_BANDS[bands[i]]
        d = rng.uniform(lo, hi)
        bearing = rng.uniform(0.0, 360.0)
        lat, lon = destination(origin[0], origin[1], bearing, d)
        names = list(mix)
        cls = names[rng.choice(len(names), p=np.array([mix[n] for n in names]))]
        out.append(FlightRecord(hours[i] + minutes[i] / 60.0, round(lat, 4), round(lon, 4), cls,
                                origin[0], origin[1], f"synthetic-{i}"))
    out.sort(key=lambda f: (f.time_h, f.meta))
    return out


def _hhmm(time_h: float) -> str:
    total = int(round(time_h * 60.0))
    return f"{total // 60:02d}:{total % 60:02d}"


def write_schedule(path, flights) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for f in flights:
            w.writerow([_hhmm(f.time_h), f.dest_lat, f.dest_lon, f.aircraft_class, f.origin_lat, f.origin_lon,
                        f.meta])
    return path


def read_schedule(path) -> list:
    """Schedule CSV with columns time (HH:MM), dest_lat, dest_lon, class; origin and meta optional."""
    out = []
    with Path(path).open(newline="") as fh:
        for n, row in enumerate(csv.DictReader(fh), start=2):
            try:
                hh, mm = row["time"].split(":")
                kw = {}
                if row.get("origin_lat"):
                    kw["origin_lat"] = float(row["origin_lat"])
                if row.get("origin_lon"):
                    kw["origin_lon"] = float(row["origin_lon"])
                out.append(FlightRecord(int(hh) + int(mm) / 60.0, float(row["dest_lat"]), float(row["dest_lon"]),
                                        row["class"].strip(), meta=row.get("meta") or "", **kw))
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}: line {n}: {exc}") from None
    return out
