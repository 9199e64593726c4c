"""Scenario configuration records and the plain-text config loader.

Config files are INI-style: one section per record, ``key = value`` lines,
SI units throughout. Every key has a default; unknown keys are rejected.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

LPD = 330_000.0 / 86_400.0     # 330 t/day in kg/s


class ConfigError(ValueError):
    """Invalid or unknown configuration entry; ``key`` names the offender."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class TransportCaseConfig:
    """Liquefier to fuel-farm transfer line at steady state."""

    length: float = 4000.0
    diameter: float = 0.22
    insulation: float = 0.05
    T_amb: float = 278.0
    k_lin: float = 5.0e-4
    k_cub: float = 8.5e-4
    pump_dp0: float = 0.6e5
    pump_V0: float = 0.09
    pump_eta: float = 0.7
    ideal_pump: bool = False
    source_pressure: float = 1.1e5
    source_T: float = 19.5
    delivery_pressure: float = 1.1e5
    throughput: float = LPD
    valve_rated_mdot: float = 3.82
    valve_rated_dp: float = 0.3e5
    cells: int = 20
    wall_heat_capacity: float = 600.0
    film_coefficient: float = 300.0
    dt: float = 200.0
    max_time: float = 1.0e6
    steady_tol: float = 1.0e-5

    def validate(self):
        _positive(self, "diameter", "insulation", "T_amb", "pump_dp0", "pump_V0", "source_pressure",
                  "delivery_pressure", "throughput", "dt", "max_time", "steady_tol", "cells",
                  "wall_heat_capacity", "film_coefficient")
        if self.length < 0:
            raise ConfigError("length", "must be >= 0")
        if not 0.0 < self.pump_eta <= 1.0:
            raise ConfigError("pump_eta", "must be in (0, 1]")
        return self


@dataclass(frozen=True)
class DistributionConfig:
    """Fuel farm, distribution pump, supply/recycle loop and aircraft stands."""

    supply_length: float = 2000.0
    supply_diameter: float = 0.45
    supply_heat: float = 10.0
    supply_wall: float = 1600.0
    supply_cells: int = 20
    recycle_length: float = 2000.0
    recycle_diameter: float = 0.17
    recycle_heat: float = 3.6
    recycle_wall: float = 400.0
    recycle_cells: int = 20
    header_length: float = 5.0
    header_diameter: float = 0.2
    header_heat: float = 4.6
    hose_length: float = 10.0
    hose_diameter: float = 0.2
    hose_heat: float = 5.0
    hose_wall: float = 600.0
    hose_cells: int = 2
    film_coefficient: float = 300.0
    wave_speed: float = 1000.0
    farm_volume: float = 8000.0
    farm_heat: float = 5000.0
    farm_head: float = 10.0
    farm_pressure: float = 1.2e5
    farm_level: float = 0.6
    farm_mop: float = 1.7e5
    farm_vent: bool = False
    pump_dp0: float = 0.9e5
    pump_V0: float = 0.8
    pump_eta: float = 0.6
    feed_rate: float = LPD
    feed_T: float = 19.8
    aircraft_count: int = 58
    aircraft_mass: float = 6200.0
    fill_rate: float = 20.0
    aircraft_back_pressure: float = 1.5e5
    day_start: float = 6.0
    day_end: float = 22.0
    recycle_refuelling: float = 0.2
    recycle_idle: float = 3.0
    recycle_night: float = 2.8
    min_pump_flow: float = 1.5
    fc_rated_mdot: float = 20.0
    fc_rated_dp: float = 0.3e5
    recycle_rated_mdot: float = 5.0
    recycle_rated_dp: float = 0.5e5
    start_clock: float = 6.0
    horizon: float = 40.0 * 3600.0
    dt: float = 10.0

    def validate(self):
        _positive(self, *[f.name for f in dataclasses.fields(self)
                          if f.type in ("float", "int") and f.name not in ("start_clock", "day_start")])
        if not 0.0 < self.farm_level < 1.0:
            raise ConfigError("farm_level", "must be in (0, 1)")
        if not 0.0 <= self.day_start < self.day_end <= 24.0:
            raise ConfigError("day_end", "need 0 <= day_start < day_end <= 24")
        return self


@dataclass(frozen=True)
class RefuelCaseConfig:
    """Detailed refuelling of three aircraft from a distribution snapshot."""

    snapshot: str = "06:00"          # "06:00" or "22:00"
    night_recycle: float = 2.8
    snapshot_file: str = ""
    aircraft_volume: float = 96.0
    aircraft_heat: float = 1300.0
    aircraft_mop: float = 1.7e5
    aircraft_pressure: float = 1.3e5
    aircraft_level: float = 0.05
    ullage: float = 0.03
    min_fill: float = 0.05
    trip_level: float = 0.965
    target_mass: float = 6200.0
    parallel_delay: float = 0.0
    fc_gain: float = 0.05
    fc_ti: float = 2.0
    valve_tau: float = 1.0
    dt: float = 0.1
    settle_time: float = 60.0
    max_time: float = 3600.0
    overnight_hours: float = 8.0
    overnight_pressure: float = 1.66e5   # tank state left by the last fill of the day
    distribution: DistributionConfig = field(default_factory=DistributionConfig)

    def validate(self):
        if self.snapshot not in ("06:00", "22:00"):
            raise ConfigError("snapshot", "must be 06:00 or 22:00")
        _positive(self, "night_recycle", "aircraft_volume", "aircraft_heat", "aircraft_mop",
                  "aircraft_pressure", "target_mass", "fc_gain", "fc_ti", "dt", "max_time")
        if not self.min_fill <= self.aircraft_level < self.trip_level <= 1.0 - self.ullage:
            raise ConfigError("trip_level", "need min_fill <= aircraft_level < trip_level <= 1 - ullage")
        self.distribution.validate()
        return self


@dataclass(frozen=True)
class BogReportInput:
    """Per-event vent masses and counts behind the daily BOG estimate (kg)."""

    first_fill_low: float = 71.0
    subsequent_low: float = 53.0
    subsequent_count_low: int = 2
    first_fill_high: float = 92.0
    subsequent_high: float = 73.0
    subsequent_count_high: int = 57
    storage: float = 356.0
    overnight_per_aircraft: float = 77.0
    aircraft_low: int = 0
    aircraft_high: int = 10
    printed_refuel_low: float = 176.0
    printed_refuel_high: float = 4243.0
    printed_total_low: float = 532.0
    printed_total_high: float = 5369.0
    tolerance: float = 0.5

    def validate(self):
        for f in dataclasses.fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f.name, "must be >= 0")
        return self


def _positive(cfg, *names):
    for n in names:
        if getattr(cfg, n) <= 0:
            raise ConfigError(n, "must be positive")


# --------------------------------------------------------------------- loader
SECTIONS = {
    "transport": TransportCaseConfig,
    "distribution": DistributionConfig,
    "refuel": RefuelCaseConfig,
    "bog": BogReportInput,
}


def _convert(key: str, raw: str, default):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {type(default).__name__}") from None
    return raw


def build(cls, values: dict, section: str):
    """Instantiate ``cls`` from string values, rejecting unknown keys."""
    defaults = cls()
    kwargs = {}
    names = {f.name for f in dataclasses.fields(cls) if f.name != "distribution"}
    for key, raw in values.items():
        if key not in names:
            raise ConfigError(f"{section}.{key}", "unknown key")
        kwargs[key] = _convert(f"{section}.{key}", raw, getattr(defaults, key))
    return cls(**kwargs)


def parse_config(text: str, name: str = "<config>") -> dict:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=name)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    out = {}
    for sec in parser.sections():
        if sec not in SECTIONS:
            raise ConfigError(sec, "unknown section")
        out[sec] = dict(parser[sec])
    return out


def load_config(path, kind: str):
    """Load the record for ``kind`` ("transport", "distribution", "refuel", "bog")."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    sections = parse_config(text, str(path))
    return config_from_sections(sections, kind)


def config_from_sections(sections: dict, kind: str):
    if kind not in SECTIONS:
        raise ConfigError("<kind>", f"unknown config kind {kind!r}")
    allowed = {kind, "distribution"} if kind == "refuel" else {kind}
    for sec in sections:
        if sec not in allowed:
            raise ConfigError(sec, f"section not used by {kind}")
    if kind == "refuel":
        dist = build(DistributionConfig, sections.get("distribution", {}), "distribution")
        cfg = build(RefuelCaseConfig, sections.get("refuel", {}), "refuel")
        cfg = dataclasses.replace(cfg, distribution=dist)
    else:
        cfg = build(SECTIONS[kind], sections.get(kind, {}), kind)
    return cfg.validate()


def config_to_text(cfg, section: str) -> str:
    """Render a record back to config text (nested distribution as its own section)."""
    lines = [f"[{section}]"]
    extra = ""
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "distribution":
            extra = "\n" + config_to_text(v, "distribution")
            continue
        lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    return "\n".join(lines) + "\n" + extra
