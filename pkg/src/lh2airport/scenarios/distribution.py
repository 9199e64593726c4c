"""Airport distribution loop over two days, with handoff snapshots for refuelling runs."""
from __future__ import annotations

import numpy as np

from ..control import RecycleSchedule, minimum_flow_recycle, recycle_setpoint
from ..flownet import Boundary, Branch, Pipe, PipeSegment, PumpSpec, PumpedNetwork, Tank, TankSpec, ValveSpec
from ..h2props import PropertyRangeError, PropertySet, default_properties
from .config import DistributionConfig
from .record import RunRecord, SeriesRecorder

FEED_PRESSURE = 1.1e5


def farm_tank(cfg: DistributionConfig, props: PropertySet) -> Tank:
    spec = TankSpec(cfg.farm_volume, mop=cfg.farm_mop, heat_ingress=cfg.farm_heat,
                    liquid_head=cfg.farm_head, vent=cfg.farm_vent, name="farm")
    return Tank.saturated(spec, cfg.farm_pressure, cfg.farm_level, props)


def _pipe(cfg, length, diameter, heat, wall, cells, name, p, T, props):
    seg = PipeSegment(length, diameter, cells=cells, heat_per_m=heat, wall_heat_capacity=wall,
                      film_coefficient=cfg.film_coefficient, name=name, wave_speed=cfg.wave_speed)
    return Pipe(seg, p, T=T, props=props)


def stand_pipes(cfg: DistributionConfig, p: float, T: float, props: PropertySet, tag: str):
    """Header and flexible hose from the loop to one aircraft."""
    header = _pipe(cfg, cfg.header_length, cfg.header_diameter, cfg.header_heat, cfg.hose_wall,
                   cfg.hose_cells, f"header {tag}", p, T, props)
    hose = _pipe(cfg, cfg.hose_length, cfg.hose_diameter, cfg.hose_heat, cfg.hose_wall, cfg.hose_cells,
                 f"hose {tag}", p, T, props)
    return [header, hose]


def build_distribution_network(cfg: DistributionConfig, sinks, props: PropertySet | None = None,
                               aircraft_mode: str = "flow", farm: Tank | None = None) -> PumpedNetwork:
    """Fuel farm, pump, supply pipe, recycle branch and one stand per ``(name, sink)``."""
    props = props or default_properties()
    farm = farm or farm_tank(cfg, props)
    T0 = farm.state.temperature
    p_line = farm.pressure + 0.8 * cfg.pump_dp0
    supply = _pipe(cfg, cfg.supply_length, cfg.supply_diameter, cfg.supply_heat, cfg.supply_wall,
                   cfg.supply_cells, "supply", p_line, T0, props)
    recycle = _pipe(cfg, cfg.recycle_length, cfg.recycle_diameter, cfg.recycle_heat, cfg.recycle_wall,
                    cfg.recycle_cells, "recycle", p_line, T0, props)
    branches = [Branch("recycle", [recycle], ValveSpec(cfg.recycle_rated_mdot, cfg.recycle_rated_dp), farm,
                       mode="flow", setpoint=cfg.recycle_night)]
    fc = ValveSpec(cfg.fc_rated_mdot, cfg.fc_rated_dp)
    for name, sink in sinks:
        branches.append(Branch(name, stand_pipes(cfg, p_line, T0, props, name), fc, sink,
                               mode=aircraft_mode, opening=0.0, setpoint=0.0))
    h_feed = float(props.liquid_enthalpy(cfg.feed_T, FEED_PRESSURE))
    pump = PumpSpec(cfg.pump_dp0, cfg.pump_V0, cfg.pump_eta)
    return PumpedNetwork(farm, pump, supply, branches, feeds=[[farm, cfg.feed_rate, h_feed]], props=props)


def fill_starts(cfg: DistributionConfig) -> np.ndarray:
    """Clock times (s after midnight) of the day's fills: first and last pinned, the rest uniform."""
    duration = cfg.aircraft_mass / cfg.fill_rate
    first = cfg.day_start * 3600.0
    last = cfg.day_end * 3600.0 - duration
    if cfg.aircraft_count == 1:
        return np.array([first])
    return np.linspace(first, last, cfg.aircraft_count)


def outlet_subcooling(pipe: Pipe) -> float:
    return float(pipe.subcooling[-1])


def network_snapshot(net: PumpedNetwork, time_s: float, clock_h: float) -> dict:
    """Everything the refuelling model needs to restart from this instant."""
    farm = net.source
    snap = {
        "time_s": time_s,
        "clock_h": clock_h,
        "farm": {"mass": farm.mass, "energy": farm.energy, "pressure": farm.pressure, "level": farm.level},
        "supply": _plain(net.supply.snapshot()),
        "supply_T": _plain({"T": net.supply.T})["T"],
        "recycle": _plain(net.branch("recycle").pipes[0].snapshot()),
    }
    return snap


def _plain(d: dict) -> dict:
    return {k: np.asarray(v, dtype=float).tolist() for k, v in d.items()}


def run_distribution(cfg: DistributionConfig, props: PropertySet | None = None) -> RunRecord:
    """Integrate the loop over ``cfg.horizon`` seconds from ``cfg.start_clock``.

    One aircraft stand with a fixed back-pressure receives the day's fills at
    ``fill_rate``. Snapshots: "06:00" is taken just before the first fill after
    the night and "22:00" just before the last fill of the first day.
    """
    cfg.validate()
    props = props or default_properties()
    stand_sink = Boundary(cfg.aircraft_back_pressure, name="aircraft")
    net = build_distribution_network(cfg, [("aircraft", stand_sink)], props)
    farm = net.source
    rec_b = net.branch("recycle")
    ac_b = net.branch("aircraft")
    sched = RecycleSchedule(cfg.recycle_refuelling, cfg.recycle_idle, cfg.recycle_night,
                            cfg.day_start, cfg.day_end)
    starts = fill_starts(cfg)
    ser = SeriesRecorder([
        "time_h", "clock_h", "pump_flow_kg_s", "aircraft_flow_kg_s", "recycle_flow_kg_s",
        "supply_out_subcooling_K", "recycle_out_subcooling_K", "supply_out_T_K", "recycle_out_T_K",
        "supply_max_quality", "recycle_max_quality", "farm_pressure_Pa", "farm_level", "farm_T_K",
        "node_pressure_Pa", "pump_shaft_W",
    ])
    rec = RunRecord("distribution")
    m0, E0 = net.stored_mass(), net.stored_energy()

    dt = cfg.dt
    n = int(round(cfg.horizon / dt))
    fill_end = None          # delivered-mass target of the fill in progress
    last_start_day = None
    day_seconds = 86400.0
    snaps = {}
    try:
        for k in range(n):
            t = k * dt
            clock_s = (cfg.start_clock * 3600.0 + t) % day_seconds
            day = int((cfg.start_clock * 3600.0 + t) // day_seconds)
            if fill_end is None:
                due = np.nonzero((starts <= clock_s) & (clock_s < starts + dt))[0]
                if due.size:
                    i = int(due[0])
                    if i == 0 and day >= 1 and "06:00" not in snaps:
                        snaps["06:00"] = network_snapshot(net, t, clock_s / 3600.0)
                    if i == len(starts) - 1 and last_start_day is None:
                        snaps["22:00"] = network_snapshot(net, t, clock_s / 3600.0)
                        last_start_day = day
                    fill_end = ac_b.delivered + cfg.aircraft_mass
            if fill_end is not None:
                remaining = fill_end - ac_b.delivered
                if remaining <= 0.01 * cfg.fill_rate * dt:
                    fill_end = None
                    ac_b.setpoint = 0.0
                else:
                    ac_b.setpoint = min(cfg.fill_rate, remaining / dt)
            active = fill_end is not None
            rec_b.setpoint = minimum_flow_recycle(recycle_setpoint(sched, clock_s / 3600.0, active),
                                                  ac_b.setpoint, cfg.min_pump_flow)
            rep = net.step(dt)
            sup, rcy = net.supply, rec_b.pipes[0]
            ser.add(
                (t + dt) / 3600.0, ((clock_s + dt) % day_seconds) / 3600.0, rep.pump_flow,
                rep.branch_flows["aircraft"], rep.branch_flows["recycle"],
                outlet_subcooling(sup), outlet_subcooling(rcy), float(sup.T[-1]), float(rcy.T[-1]),
                float(np.max(sup.x)), float(np.max(rcy.x)), farm.pressure, farm.level,
                farm.state.temperature, rep.node_pressure, rep.shaft_power,
            )
    except PropertyRangeError as exc:
        rec.flag("property-range")
        rec.summary["failure"] = str(exc)

    rec.series = ser.result()
    rec.snapshots = snaps
    s = rec.series
    rm, rE, ms, Es = net.balances(m0, E0)
    if s["time_h"].size:
        if np.any(s["recycle_max_quality"] > 0.0):
            rec.flag("recycle-two-phase")
        if np.any(s["supply_max_quality"] > 0.0):
            rec.flag("supply-two-phase")
        rec.summary.update(
            horizon_h=float(s["time_h"][-1]),
            night_recycle_kg_s=cfg.recycle_night,
            min_supply_subcooling_K=float(np.min(s["supply_out_subcooling_K"])),
            min_recycle_subcooling_K=float(np.min(s["recycle_out_subcooling_K"])),
            farm_pressure_min_Pa=float(np.min(s["farm_pressure_Pa"])),
            farm_pressure_max_Pa=float(np.max(s["farm_pressure_Pa"])),
            farm_level_min=float(np.min(s["farm_level"])),
            farm_level_max=float(np.max(s["farm_level"])),
            delivered_to_aircraft_kg=ac_b.delivered,
            mass_residual_rel=abs(rm) / ms,
            energy_residual_rel=abs(rE) / Es,
        )
    return rec


def morning_minimum_time(rec: RunRecord, column: str = "supply_out_subcooling_K", window=(16.0, 40.0)) -> float:
    """Elapsed hour of the smallest value of ``column`` inside ``window`` (hours)."""
    t = rec.column("time_h")
    v = rec.column(column)
    m = (t >= window[0]) & (t <= window[1])
    return float(t[m][np.argmin(v[m])])
