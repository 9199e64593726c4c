"""Detailed refuelling of three aircraft tanks from a distribution snapshot."""
from __future__ import annotations

import dataclasses

import numpy as np

from ..control import (
    FillPlanEntry,
    FirstOrderLag,
    PIControllerSpec,
    PIState,
    RecycleSchedule,
    RefuellingSequencer,
    minimum_flow_recycle,
    pi_step,
    recycle_setpoint,
)
from ..flownet import Boundary, PumpedNetwork, Tank, TankSpec
from ..h2props import PropertyRangeError, PropertySet, default_properties
from .config import DistributionConfig, RefuelCaseConfig
from .distribution import build_distribution_network, farm_tank, run_distribution
from .io import read_snapshots
from .record import RunRecord, SeriesRecorder

AIRCRAFT = ("AC1", "AC2", "AC3")


def aircraft_tank(cfg: RefuelCaseConfig, name: str, props: PropertySet) -> Tank:
    spec = TankSpec(cfg.aircraft_volume, mop=cfg.aircraft_mop, ullage=cfg.ullage, min_fill=cfg.min_fill,
                    heat_ingress=cfg.aircraft_heat, name=name)
    return Tank.saturated(spec, cfg.aircraft_pressure, cfg.aircraft_level, props)


def restore_network(dist: DistributionConfig, snap: dict, sinks, props: PropertySet,
                    aircraft_mode: str = "valve") -> PumpedNetwork:
    """Distribution network restarted from a snapshot.

    Stand pipes (header and hose) start filled with liquid at the supply outlet
    state, as if kept cold between fills.
    """
    template = farm_tank(dist, props)
    farm = Tank(template.spec, snap["farm"]["mass"], snap["farm"]["energy"], props)
    net = build_distribution_network(dist, sinks, props, aircraft_mode=aircraft_mode, farm=farm)
    net.supply.restore(snap["supply"])
    net.branch("recycle").pipes[0].restore(snap["recycle"])
    h0, p0, Tw0 = float(net.supply.h[-1]), float(net.supply.p[-1]), float(net.supply.Tw[-1])
    for b in net.branches:
        if b.name == "recycle":
            continue
        for pipe in b.pipes:
            pipe.restore({"h": np.full(pipe.seg.cells, h0), "p": np.full(pipe.seg.cells, p0),
                          "Tw": np.full(pipe.seg.cells, Tw0)})
    return net


def refuel_snapshot(cfg: RefuelCaseConfig, props: PropertySet | None = None) -> dict:
    """Initial state for ``cfg``: read from ``snapshot_file`` or from a fresh long-term run."""
    if cfg.snapshot_file:
        snaps = read_snapshots(cfg.snapshot_file)
    else:
        dist = dataclasses.replace(cfg.distribution, recycle_night=cfg.night_recycle)
        snaps = run_distribution(dist, props).snapshots
    if cfg.snapshot not in snaps:
        raise KeyError(f"snapshot {cfg.snapshot} not available")
    return snaps[cfg.snapshot]


def fill_plan(cfg: RefuelCaseConfig):
    """Aircraft 1 alone, then aircraft 2 and 3 in parallel."""
    return [
        FillPlanEntry("AC1", 0.0, cfg.target_mass, cfg.distribution.fill_rate),
        FillPlanEntry("AC2", cfg.parallel_delay, cfg.target_mass, cfg.distribution.fill_rate, after="AC1"),
        FillPlanEntry("AC3", cfg.parallel_delay, cfg.target_mass, cfg.distribution.fill_rate, after="AC1"),
    ]


def run_refuel(cfg: RefuelCaseConfig, snap: dict, props: PropertySet | None = None,
               plan=None, record_every: float = 1.0) -> RunRecord:
    """Fill the aircraft per the plan with PI flow loops on the stand valves.

    A fill ends on its transferred-mass target or on a tank level trip at
    ``trip_level``; a trip closes the valve directly. The run stops
    ``settle_time`` seconds after the last fill ends.
    """
    cfg.validate()
    props = props or default_properties()
    dist = cfg.distribution
    tanks = {name: aircraft_tank(cfg, name, props) for name in AIRCRAFT}
    net = restore_network(dist, snap, list(tanks.items()), props)
    rec_b = net.branch("recycle")
    branches = {name: net.branch(name) for name in AIRCRAFT}
    plan = fill_plan(cfg) if plan is None else plan
    seq = RefuellingSequencer(plan)
    pi = PIControllerSpec(cfg.fc_gain, cfg.fc_ti, 0.0, 1.0)
    pi_state = {a: PIState() for a in AIRCRAFT}
    lag = {a: FirstOrderLag(cfg.valve_tau, 0.0) for a in AIRCRAFT}
    sched = RecycleSchedule(dist.recycle_refuelling, dist.recycle_idle, cfg.night_recycle,
                            dist.day_start, dist.day_end)
    clock0 = float(snap.get("clock_h", 6.0))

    cols = ["time_s", "pump_flow_kg_s", "recycle_flow_kg_s", "supply_max_quality", "supply_out_subcooling_K",
            "node_pressure_Pa"]
    for a in AIRCRAFT:
        cols += [f"{a}_flow_kg_s", f"{a}_setpoint_kg_s", f"{a}_opening", f"{a}_pressure_Pa", f"{a}_level",
                 f"{a}_vented_kg", f"{a}_transferred_kg"]
    ser = SeriesRecorder(cols)
    rec = RunRecord("refuel")
    m0, E0 = net.stored_mass(), net.stored_energy()
    peak = {a: tanks[a].pressure for a in AIRCRAFT}
    vent0 = {a: tanks[a].vented for a in AIRCRAFT}
    tripped = set()
    parallel = {"min_total": np.inf, "max_total": 0.0, "max_quality": 0.0, "max_opening": 0.0, "seen": False}

    dt = cfg.dt
    every = max(int(round(record_every / dt)), 1)
    t = 0.0
    k = 0
    end_at = None
    try:
        while t < cfg.max_time - 1e-9:
            transferred = {a: branches[a].delivered for a in AIRCRAFT}
            for a in AIRCRAFT:
                if a not in tripped and tanks[a].level >= cfg.trip_level:
                    tripped.add(a)
                    seq.stop(a)
            sps = seq.setpoints(t, transferred)
            active = seq.active(t, transferred)
            for a in AIRCRAFT:
                b = branches[a]
                if a in active:
                    out, pi_state[a] = pi_step(pi, pi_state[a], sps[a], b.mdot, dt)
                else:
                    out, pi_state[a] = 0.0, PIState()
                if a in tripped:
                    lag[a].value = 0.0      # trip shuts the valve without actuator lag
                b.opening = lag[a].step(out, dt)
            other = sum(branches[a].mdot for a in AIRCRAFT)
            rec_b.setpoint = minimum_flow_recycle(
                recycle_setpoint(sched, (clock0 + t / 3600.0) % 24.0, bool(active)), other, dist.min_pump_flow)
            rep = net.step(dt)
            t += dt
            k += 1
            for a in AIRCRAFT:
                peak[a] = max(peak[a], tanks[a].pressure)
            if len(active) >= 2:
                tot = sum(rep.branch_flows[a] for a in active)
                parallel["seen"] = True
                parallel["min_total"] = min(parallel["min_total"], tot)
                parallel["max_total"] = max(parallel["max_total"], tot)
                parallel["max_quality"] = max(parallel["max_quality"], float(np.max(net.supply.x)))
                parallel["max_opening"] = max(parallel["max_opening"], min(branches[a].opening for a in active))
            if k % every == 0:
                row = [t, rep.pump_flow, rep.branch_flows["recycle"], float(np.max(net.supply.x)),
                       float(net.supply.subcooling[-1]), rep.node_pressure]
                for a in AIRCRAFT:
                    row += [rep.branch_flows[a], sps[a], branches[a].opening, tanks[a].pressure, tanks[a].level,
                            tanks[a].vented - vent0[a], branches[a].delivered]
                ser.add(*row)
            if end_at is None and seq.complete():
                end_at = t + cfg.settle_time
            if end_at is not None and t >= end_at - 1e-9:
                break
    except PropertyRangeError as exc:
        rec.flag("property-range")
        rec.summary["failure"] = str(exc)

    rec.series = ser.result()
    # a failed step leaves the network half-advanced, so balances are void
    rm, rE, ms, Es = net.balances(m0, E0) if not rec.flags else (np.nan, np.nan, 1.0, 1.0)
    totals = {}
    for a in AIRCRAFT:
        moved = branches[a].delivered
        vent = tanks[a].vented - vent0[a]
        totals[a] = {"transferred_kg": moved, "vented_kg": vent,
                     "vented_rel": vent / moved if moved > 0 else 0.0,
                     "peak_pressure_Pa": peak[a], "final_level": tanks[a].level,
                     "level_trip": a in tripped}
    rec.tables["aircraft"] = totals
    rec.summary.update(
        snapshot=cfg.snapshot,
        night_recycle_kg_s=cfg.night_recycle,
        aircraft_volume_m3=cfg.aircraft_volume,
        duration_s=t,
        completed=seq.complete(),
        parallel_min_total_flow_kg_s=float(parallel["min_total"]) if parallel["seen"] else float("nan"),
        parallel_max_total_flow_kg_s=float(parallel["max_total"]) if parallel["seen"] else float("nan"),
        parallel_max_supply_quality=parallel["max_quality"],
        parallel_max_opening=parallel["max_opening"] if parallel["seen"] else float("nan"),
        mass_residual_rel=abs(rm) / ms,
        energy_residual_rel=abs(rE) / Es,
    )
    for a in AIRCRAFT:
        for key, val in totals[a].items():
            rec.summary[f"{a}_{key}"] = val
    if cfg.snapshot == "22:00" and "property-range" not in rec.flags:
        for a in AIRCRAFT:
            rec.summary[f"{a}_overnight_vented_kg"] = overnight_bog(tanks[a], cfg.overnight_hours)
    if parallel["max_quality"] > 0.0:
        rec.flag("supply-two-phase")
    if tripped:
        rec.flag("level-trip")
    if not seq.complete():
        rec.flag("incomplete")
    return rec


def overnight_bog(tank: Tank, hours: float = 8.0, dt: float = 60.0) -> float:
    """Vented mass (kg) of a sealed tank left standing for ``hours``; the tank is not modified."""
    spare = Tank(tank.spec, tank.mass, tank.energy, tank.props)
    n = int(round(hours * 3600.0 / dt))
    for _ in range(n):
        spare.step([], 0.0, dt)
    return spare.vented


def end_of_day_tank(cfg: RefuelCaseConfig, props: PropertySet | None = None) -> Tank:
    """Aircraft tank as left by the last fill: at the trip level and ``overnight_pressure``."""
    props = props or default_properties()
    spec = TankSpec(cfg.aircraft_volume, mop=cfg.aircraft_mop, ullage=cfg.ullage, min_fill=cfg.min_fill,
                    heat_ingress=cfg.aircraft_heat, name="aircraft")
    return Tank.saturated(spec, cfg.overnight_pressure, cfg.trip_level, props)


def handoff_fidelity(cfg: RefuelCaseConfig, snap: dict, props: PropertySet | None = None,
                     seconds: float = 60.0) -> dict:
    """Supply-outlet subcooling after ``seconds`` without refuelling, both models.

    The detailed model (aircraft stands, step ``cfg.dt``) and the long-term model
    (one fixed back-pressure stand, step ``distribution.dt``) restart from the
    same snapshot with the stand valves shut and the recycle on its schedule.
    """
    props = props or default_properties()
    dist = cfg.distribution
    sched = RecycleSchedule(dist.recycle_refuelling, dist.recycle_idle, cfg.night_recycle,
                            dist.day_start, dist.day_end)
    clock0 = float(snap.get("clock_h", 6.0))
    sinks = [(a, aircraft_tank(cfg, a, props)) for a in AIRCRAFT]
    detailed = restore_network(dist, snap, sinks, props)
    longterm = restore_network(dist, snap, [("aircraft", Boundary(dist.aircraft_back_pressure, name="aircraft"))],
                               props, aircraft_mode="flow")
    out = {"start_K": float(detailed.supply.subcooling[-1])}
    for key, net, dt in (("detailed_K", detailed, cfg.dt), ("longterm_K", longterm, dist.dt)):
        n = max(int(round(seconds / dt)), 1)
        rec_b = net.branch("recycle")
        for k in range(n):
            rec_b.setpoint = recycle_setpoint(sched, (clock0 + k * dt / 3600.0) % 24.0, False)
            net.step(dt)
        out[key] = float(net.supply.subcooling[-1])
    out["difference_K"] = abs(out["detailed_K"] - out["longterm_K"])
    return out
