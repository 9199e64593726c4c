"""Command-line entry point: one subcommand per scenario program.

Exit codes: 0 success, 2 configuration or usage error, 3 physics failure.
Each run writes into a temporary directory that is renamed to ``--out`` when
the run ends; a physics failure keeps only the summary and manifest.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import shutil
import sys
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from . import demand as dm
from . import sensitivity as sa
from .flownet import (
    CavitationError,
    FlowSolveError,
    OperatingPointError,
    OverfillError,
    SupplyExhaustedError,
)
from .h2props import PropertyRangeError, default_properties
from .scenarios import (
    BogReportInput,
    ConfigError,
    DistributionConfig,
    RefuelCaseConfig,
    TransportCaseConfig,
    bog_report,
    config_from_sections,
    config_to_text,
    insulation_sweep,
    parse_config,
    refuel_snapshot,
    run_distribution,
    run_refuel,
    run_transport,
    sweep_table,
    write_series_csv,
    write_snapshots,
    write_summary,
    write_table_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS = 0, 2, 3
PHYSICS_ERRORS = (CavitationError, SupplyExhaustedError, OverfillError, OperatingPointError, FlowSolveError,
                  PropertyRangeError)
MANIFEST_SCHEMA = 1


class PhysicsFailure(RuntimeError):
    """A run ended on a physical condition; ``summary`` and ``flags`` describe it."""

    def __init__(self, message: str, summary: dict | None = None, flags=()):
        super().__init__(message)
        self.summary = dict(summary or {})
        self.flags = list(flags)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------------ helpers
def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("<argument>", f"not a comma-separated number list: {text!r}") from None


def _load(args, kind: str):
    if args.config is None:
        sections = {}
    else:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError("<file>", f"cannot read {args.config}: {exc.strerror}") from None
        sections = parse_config(text, str(args.config))
    cfg = config_from_sections(sections, kind)
    return _overrides(cfg, args)


def _overrides(cfg, args):
    dt, cells = getattr(args, "dt_override", None), getattr(args, "cells_override", None)
    if dt is not None and dt <= 0:
        raise ConfigError("--dt-override", "must be positive")
    if cells is not None and cells < 1:
        raise ConfigError("--cells-override", "must be >= 1")
    if isinstance(cfg, RefuelCaseConfig):
        dist = cfg.distribution
        if cells is not None:
            dist = dataclasses.replace(dist, supply_cells=cells, recycle_cells=cells)
        cfg = dataclasses.replace(cfg, distribution=dist)
        if dt is not None:
            cfg = dataclasses.replace(cfg, dt=dt)
    elif isinstance(cfg, DistributionConfig):
        if dt is not None:
            cfg = dataclasses.replace(cfg, dt=dt)
        if cells is not None:
            cfg = dataclasses.replace(cfg, supply_cells=cells, recycle_cells=cells)
    elif isinstance(cfg, TransportCaseConfig):
        if dt is not None:
            cfg = dataclasses.replace(cfg, dt=dt)
        if cells is not None:
            cfg = dataclasses.replace(cfg, cells=cells)
    elif dt is not None or cells is not None:
        raise ConfigError("--dt-override", "not used by this subcommand")
    return cfg.validate()


def _no_config(args, name: str):
    if getattr(args, "config", None) is not None:
        raise ConfigError("--config", f"{name} takes no config file")


def _check_record(rec, fatal=("property-range",)):
    bad = [f for f in rec.flags if f in fatal]
    if bad:
        raise PhysicsFailure(rec.summary.get("failure", ", ".join(bad)), rec.summary, rec.flags)


def _physics_guard(fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except PHYSICS_ERRORS as exc:
        raise PhysicsFailure(f"{type(exc).__name__}: {exc}", {}, [_flag_for(exc)]) from exc


def _flag_for(exc) -> str:
    return {
        CavitationError: "pump-suction-two-phase",
        SupplyExhaustedError: "supply-exhausted",
        OverfillError: "overfill",
        OperatingPointError: "pump-operating-point",
        FlowSolveError: "no-operating-point",
        PropertyRangeError: "property-range",
    }.get(type(exc), "physics-failure")


# -------------------------------------------------------------- subcommands
def cmd_props(args, out: Path) -> dict:
    _no_config(args, "props")
    if not 0 < args.p_min < args.p_max:
        raise ConfigError("--p-min", "need 0 < p-min < p-max")
    if args.points < 2:
        raise ConfigError("--points", "must be >= 2")
    props = default_properties()
    p = np.linspace(args.p_min, args.p_max, args.points)
    try:
        sat = props.saturation_state(p)
    except PropertyRangeError as exc:
        raise ConfigError("--p-min", str(exc)) from None
    series = {"p_Pa": p, "T_sat_K": sat["T"], "rho_l_kg_m3": sat["rho_l"], "rho_v_kg_m3": sat["rho_v"],
              "h_l_J_kg": sat["h_l"], "h_v_J_kg": sat["h_v"], "h_fg_J_kg": sat["h_fg"]}
    write_series_csv(out / "saturation.csv", "saturation", series)
    return {"summary": {"points": args.points, "p_min_Pa": args.p_min, "p_max_Pa": args.p_max}, "flags": []}


def cmd_transport(args, out: Path) -> dict:
    cfg = _load(args, "transport")
    (out / "config.cfg").write_text(config_to_text(cfg, "transport"))
    rec = _physics_guard(run_transport, cfg)
    _check_record(rec, fatal=())
    write_series_csv(out / "series.csv", "transport", rec.series)
    return {"summary": rec.summary, "flags": rec.flags}


def cmd_sweep(args, out: Path) -> dict:
    cfg = _load(args, "transport")
    (out / "config.cfg").write_text(config_to_text(cfg, "transport"))
    lengths = _floats(args.lengths)
    grid = _floats(args.thicknesses)
    if not lengths or not grid or min(grid) <= 0 or min(lengths) < 0:
        raise ConfigError("--thicknesses", "need positive thicknesses and non-negative lengths")
    thresholds = _physics_guard(insulation_sweep, cfg, lengths, grid)
    summary = {}
    for L in lengths:
        table = _physics_guard(sweep_table, cfg, L, grid)
        write_series_csv(out / f"sweep_{int(round(L))}m.csv", f"sweep-{int(round(L))}m", table)
        th = thresholds[float(L)]
        summary[f"threshold_{int(round(L))}m_m"] = float("nan") if th is None else th
    flags = []
    for L in lengths:
        th = thresholds[float(L)]
        if th is None:
            flags.append(f"no-threshold-{int(round(L))}m")
        elif th <= min(grid):
            flags.append(f"threshold-at-grid-floor-{int(round(L))}m")
    return {"summary": summary, "flags": flags}


def cmd_distribution(args, out: Path) -> dict:
    cfg = _load(args, "distribution")
    (out / "config.cfg").write_text(config_to_text(cfg, "distribution"))
    rec = _physics_guard(run_distribution, cfg)
    _check_record(rec)
    write_series_csv(out / "series.csv", "distribution", rec.series)
    write_snapshots(out / "snapshots.json", rec.snapshots)
    return {"summary": rec.summary, "flags": rec.flags}


def cmd_refuel(args, out: Path) -> dict:
    cfg = _load(args, "refuel")
    (out / "config.cfg").write_text(config_to_text(cfg, "refuel"))
    try:
        snap = _physics_guard(refuel_snapshot, cfg)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError("refuel.snapshot_file", str(exc)) from None
    rec = _physics_guard(run_refuel, cfg, snap)
    _check_record(rec)
    write_series_csv(out / "series.csv", "refuel", rec.series)
    write_table_csv(out / "aircraft.csv", "aircraft", rec.tables["aircraft"], index="aircraft")
    return {"summary": rec.summary, "flags": rec.flags}


def cmd_bog(args, out: Path) -> dict:
    cfg = _load(args, "bog")
    (out / "config.cfg").write_text(config_to_text(cfg, "bog"))
    rec = bog_report(cfg)
    write_table_csv(out / "bog.csv", "bog", rec.tables["bog"], index="source")
    return {"summary": rec.summary, "flags": rec.flags}


def cmd_sensitivity(args, out: Path) -> dict:
    base = _load(args, "transport")
    (out / "config.cfg").write_text(config_to_text(base, "transport"))
    cases = [c.strip() for c in args.cases.split(",") if c.strip()]
    for c in cases:
        if c not in sa.TRANSPORT_CASES:
            raise ConfigError("--cases", f"unknown case {c!r}; choose from {sorted(sa.TRANSPORT_CASES)}")
    if args.n < 1 or args.n & (args.n - 1):
        raise ConfigError("--n", "base sample count must be a power of two")
    results = {}
    summary, flags = {"N": args.n}, []
    for c in cases:
        res = _physics_guard(sa.transport_uq, c, args.n, seed=args.seed, workers=args.workers, base=base)
        results[c] = res
        d = out / c
        d.mkdir()
        names = sa.TRANSPORT_SPACE.names
        write_series_csv(d / "samples.csv", f"samples-{c}", {n: res["samples"][:, i] for i, n in enumerate(names)})
        outputs = dict(res["outputs"])
        outputs["two_phase"] = np.array([p != "single-phase" for p in res["phases"]], dtype=float)
        write_series_csv(d / "outputs.csv", f"outputs-{c}", outputs)
        table = {}
        for var, rep in res["indices"].items():
            for pname, row in rep.as_table().items():
                table[f"{var}:{pname}"] = row
        write_table_csv(d / "indices.csv", f"indices-{c}", table, index="output:parameter")
        sc = res["outputs"]["subcooling_K"]
        summary[f"{c}_median_subcooling_K"] = float(np.median(sc))
        summary[f"{c}_min_subcooling_K"] = float(np.min(sc))
        summary[f"{c}_median_Q_ave_W_per_m"] = float(np.median(res["outputs"]["Q_ave_W_per_m"]))
        if "subcooling_K" in res["indices"]:
            summary[f"{c}_subcooling_top_driver"] = res["indices"]["subcooling_K"].ranking()[0]
        if any(p != "single-phase" for p in res["phases"]):
            flags.append(f"{c}-two-phase-samples")
    hist = sa.uq_histograms({c: r["outputs"] for c, r in results.items()}, sa.TRANSPORT_OUTPUTS, bins=args.bins)
    hd = out / "histograms"
    hd.mkdir()
    for var, h in hist.items():
        edges = h["edges"]
        cols = {"bin_lo": edges[:-1], "bin_hi": edges[1:]}
        cols.update({c: h[c] for c in results})
        write_series_csv(hd / f"{var}.csv", f"histogram-{var}", cols)
    return {"summary": summary, "flags": flags}


def cmd_demand(args, out: Path) -> dict:
    _no_config(args, "demand")
    if args.scenario not in dm.SCENARIOS:
        raise ConfigError("--scenario", f"choose from {list(dm.SCENARIOS)}")
    try:
        if args.schedule:
            flights = dm.read_schedule(args.schedule)
        else:
            flights = dm.synthetic_schedule(seed=args.seed if args.seed is not None else 0,
                                            departures=args.departures)
    except (OSError, ValueError) as exc:
        raise ConfigError("--schedule", str(exc)) from None
    dm.write_schedule(out / "schedule.csv", flights)
    res = dm.hourly_series(flights, scenario=args.scenario)
    write_series_csv(out / "hourly.csv", "hourly-demand",
                     {"hour": res["hours"], "lh2_t": res["lh2_t"], "gh2_kg": res["gh2_kg"]})
    fl = res["flights"]
    write_series_csv(out / "flights.csv", "flights", {
        "time_h": [r["time_h"] for r in fl], "distance_km": [r["distance_km"] for r in fl],
        "eligible": [float(r["eligible"]) for r in fl], "lh2_kg": [r["lh2_kg"] for r in fl],
        "gh2_kg": [r["gh2_kg"] for r in fl]})
    for key, name in (("distance_hist", "distance_km"), ("lh2_hist", "lh2_kg")):
        edges, counts = res[key]
        write_series_csv(out / f"hist_{name}.csv", f"histogram-{name}",
                         {"bin_lo": edges[:-1], "bin_hi": edges[1:], "count": counts})
    summary = {"flights": len(fl), "lh2_flights": int(sum(r["eligible"] for r in fl)),
               "lh2_total_t": float(res["lh2_t"].sum()), "lh2_peak_t_per_h": float(res["lh2_t"].max()),
               "lh2_peak_hour": int(np.argmax(res["lh2_t"])), "gh2_total_kg": float(res["gh2_kg"].sum()),
               "scenario": args.scenario}
    for t, v in res["shares"].items():
        summary[f"share_below_{int(t)}kg"] = v
    return {"summary": summary, "flags": []}


COMMANDS = {
    "props": (cmd_props, "saturation property table"),
    "transport": (cmd_transport, "transfer line to steady state"),
    "sweep": (cmd_sweep, "insulation thickness sweep and single-phase thresholds"),
    "distribution": (cmd_distribution, "two-day airport distribution run with handoff snapshots"),
    "refuel": (cmd_refuel, "detailed three-aircraft refuelling"),
    "bog-report": (cmd_bog, "daily boil-off accounting table"),
    "sensitivity": (cmd_sensitivity, "transfer-line uncertainty and Sobol indices"),
    "demand": (cmd_demand, "hourly LH2 and ground-support hydrogen demand"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lh2airport", description="Airport liquid hydrogen distribution models.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="scenario config file (INI sections, SI units)")
        p.add_argument("--out", help="output directory (default: runs/<subcommand>)")
        p.add_argument("--seed", type=int, default=None, help="random seed where sampling is involved")
        p.add_argument("--workers", type=int, default=1, help="worker processes for sampled runs")
        p.add_argument("--dt-override", type=float, default=None, help="replace the config time step (s)")
        p.add_argument("--cells-override", type=int, default=None, help="replace the pipe cell counts")
        if name == "props":
            p.add_argument("--p-min", type=float, default=0.8e5)
            p.add_argument("--p-max", type=float, default=3.0e5)
            p.add_argument("--points", type=int, default=23)
        elif name == "sweep":
            p.add_argument("--lengths", default="4000,25000", help="comma-separated lengths (m)")
            p.add_argument("--thicknesses", default=",".join(f"{0.01 * i:.2f}" for i in range(1, 21)),
                           help="comma-separated insulation thicknesses (m)")
        elif name == "sensitivity":
            p.add_argument("--n", type=int, default=128, help="base sample count (power of two)")
            p.add_argument("--cases", default="6in,8in")
            p.add_argument("--bins", type=int, default=20)
        elif name == "demand":
            p.add_argument("--schedule", help="schedule CSV; a synthetic schedule is used when omitted")
            p.add_argument("--scenario", default="medium")
            p.add_argument("--departures", type=int, default=500)
    return parser


def coefficient_hashes() -> dict:
    files = {"parahydrogen_coefficients": resources.files("lh2airport.h2props").joinpath(
        "data/parahydrogen_coefficients.txt"),
        "fuel_model": resources.files("lh2airport.demand").joinpath("data/fuel_model.json"),
        "gse_table": resources.files("lh2airport.demand").joinpath("data/gse_table.json")}
    return {k: hashlib.sha256(v.read_bytes()).hexdigest() for k, v in files.items()}


def _manifest(args, argv, out: Path, tmp: Path, status: str) -> dict:
    outputs = {str(p.relative_to(tmp)): _sha256(p) for p in sorted(tmp.rglob("*")) if p.is_file()}
    doc = {
        "schema": MANIFEST_SCHEMA,
        "subcommand": args.command,
        "argv": list(argv),
        "config": args.config,
        "config_sha256": _sha256(Path(args.config)) if args.config else None,
        "out": str(out),
        "seed": args.seed,
        "workers": args.workers,
        "dt_override": args.dt_override,
        "cells_override": args.cells_override,
        "coefficient_files": coefficient_hashes(),
        "status": status,
        "outputs": outputs,
    }
    (tmp / "manifest.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return doc


def _finalize(tmp: Path, out: Path) -> None:
    if out.exists():
        if not (out / "manifest.json").exists():
            raise ConfigError("--out", f"{out} exists and is not a previous run directory")
        shutil.rmtree(out)
    tmp.rename(out)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    if args.command is None:
        print(parser.format_help().rstrip(), file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or Path("runs") / args.command)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}-", dir=out.parent))
    fn = COMMANDS[args.command][0]
    try:
        result = fn(args, tmp)
        write_summary(tmp / "summary.txt", args.command, result["summary"], result["flags"])
        _manifest(args, argv, out, tmp, "ok")
        _finalize(tmp, out)
    except ConfigError as exc:
        shutil.rmtree(tmp, ignore_errors=True)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsFailure as exc:
        # keep only the summary (with the failure flagged) and the manifest
        for p in sorted(tmp.iterdir()):
            if p.is_dir():
                shutil.rmtree(p)
            elif p.name != "config.cfg":
                p.unlink()
        summary = dict(exc.summary)
        summary["failure"] = str(exc)
        write_summary(tmp / "summary.txt", args.command, summary, exc.flags or ["physics-failure"])
        _manifest(args, argv, out, tmp, "physics-failure")
        try:
            _finalize(tmp, out)
        except ConfigError as cexc:
            shutil.rmtree(tmp, ignore_errors=True)
            print(f"config error: {cexc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"physics failure: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    print(f"{args.command}: wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
