"""Scenario programs: transport line, airport distribution, refuelling, BOG report."""
from .bog import bog_report
from .config import (
    LPD,
    BogReportInput,
    ConfigError,
    DistributionConfig,
    RefuelCaseConfig,
    TransportCaseConfig,
    config_from_sections,
    config_to_text,
    load_config,
    parse_config,
)
from .distribution import build_distribution_network, fill_starts, morning_minimum_time, run_distribution
from .io import (
    SCHEMA_VERSION,
    SchemaError,
    read_series_csv,
    read_snapshots,
    read_summary,
    read_table_csv,
    write_series_csv,
    write_snapshots,
    write_summary,
    write_table_csv,
)
from .record import RunRecord, SeriesRecorder
from .refuel import (
    AIRCRAFT,
    end_of_day_tank,
    fill_plan,
    handoff_fidelity,
    overnight_bog,
    refuel_snapshot,
    restore_network,
    run_refuel,
)
from .transport import build_transport_network, insulation_sweep, run_transport, single_phase, sweep_table

__all__ = [
    "AIRCRAFT", "LPD", "SCHEMA_VERSION", "BogReportInput", "ConfigError", "DistributionConfig",
    "RefuelCaseConfig", "RunRecord", "SchemaError", "SeriesRecorder", "TransportCaseConfig", "bog_report",
    "build_distribution_network", "build_transport_network", "config_from_sections", "config_to_text",
    "end_of_day_tank", "fill_plan", "fill_starts", "handoff_fidelity", "insulation_sweep", "load_config",
    "morning_minimum_time", "overnight_bog", "parse_config", "read_series_csv", "read_snapshots",
    "read_summary", "read_table_csv", "refuel_snapshot", "restore_network", "run_distribution", "run_refuel",
    "run_transport", "single_phase", "sweep_table", "write_series_csv", "write_snapshots", "write_summary",
    "write_table_csv",
]
