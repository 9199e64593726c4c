"""Hourly LH2 and ground-support hydrogen demand from a flight schedule."""
from .core import (
    CLASSES,
    EARTH_RADIUS_KM,
    KM_PER_NM,
    LH2_THRESHOLDS,
    SCENARIOS,
    ConversionConstants,
    FlightRecord,
    FuelModel,
    GseScenarioTable,
    ShareSelector,
    destination,
    eligibility,
    flight_demand,
    great_circle_km,
    hourly_series,
    jet_fuel_burn,
    lh2_mass,
)
from .schedule import read_schedule, synthetic_schedule, write_schedule

__all__ = [
    "CLASSES", "EARTH_RADIUS_KM", "KM_PER_NM", "LH2_THRESHOLDS", "SCENARIOS", "ConversionConstants",
    "FlightRecord", "FuelModel", "GseScenarioTable", "ShareSelector", "destination", "eligibility",
    "flight_demand", "great_circle_km", "hourly_series", "jet_fuel_burn", "lh2_mass", "read_schedule",
    "synthetic_schedule", "write_schedule",
]
