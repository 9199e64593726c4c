"""Transfer line from the liquefier to the fuel farm, run to steady state."""
from __future__ import annotations

import dataclasses

import numpy as np

from ..flownet import (
    Boundary,
    Branch,
    Conductivity,
    Insulation,
    Pipe,
    PipeSegment,
    PumpSpec,
    PumpedNetwork,
    ValveSpec,
)
from ..h2props import PropertyRangeError, PropertySet, default_properties
from .config import TransportCaseConfig
from .record import RunRecord, SeriesRecorder


def build_transport_network(cfg: TransportCaseConfig, props: PropertySet | None = None) -> PumpedNetwork:
    props = props or default_properties()
    src = Boundary.liquid(cfg.source_pressure, cfg.source_T, props, name="liquefier")
    pump = None if cfg.ideal_pump else PumpSpec(cfg.pump_dp0, cfg.pump_V0, cfg.pump_eta)
    pipe = None
    if cfg.length > 0:
        seg = PipeSegment(
            cfg.length, cfg.diameter, cells=cfg.cells,
            insulation=Insulation(cfg.insulation, cfg.T_amb, Conductivity(cfg.k_lin, cfg.k_cub)),
            wall_heat_capacity=cfg.wall_heat_capacity, film_coefficient=cfg.film_coefficient,
            name="transport",
        )
        p0 = cfg.source_pressure + (0.0 if pump is None else 0.5 * cfg.pump_dp0)
        pipe = Pipe(seg, p0, T=cfg.source_T, props=props)
    # the throttle acts as an ideal flow controller at steady state
    branch = Branch("throttle", [], None, Boundary(cfg.delivery_pressure, name="fuel farm"),
                    mode="flow", setpoint=cfg.throughput)
    return PumpedNetwork(src, pump, pipe, [branch], props=props)


def delivery_subcooling(props: PropertySet, p: float, h: float):
    """(subcooling K, signed equivalent subcooling K, quality) of liquid at (p, h).

    The signed value extends below zero as (h_l,sat - h)/cp so thresholds can be
    located smoothly.
    """
    s = props.state_ph(p, h)
    sat = props.saturation_state(p)
    cp = float(props.liquid_heat_capacity(float(sat["T"])))
    return float(s["subcooling"]), float((float(sat["h_l"]) - h) / cp), float(s["x"])


def run_transport(cfg: TransportCaseConfig, props: PropertySet | None = None, record_series: bool = True) -> RunRecord:
    """Integrate the transfer line until every temperature settles.

    Steady state is declared when the largest fluid or wall temperature rate
    falls below ``steady_tol`` K/s after at least one residence time. Two-phase
    states anywhere on the line are flagged rather than raised.
    """
    cfg.validate()
    props = props or default_properties()
    net = build_transport_network(cfg, props)
    rec = RunRecord("transport")
    ser = SeriesRecorder(["time_s", "outlet_T_K", "subcooling_K", "max_rate_K_per_s", "pump_flow_kg_s"])
    pipe = net.supply
    m0, E0 = net.stored_mass(), net.stored_energy()
    residence = 0.0 if pipe is None else pipe.mass / cfg.throughput
    t = 0.0
    converged = False
    two_phase = False
    failure = ""
    prev = None
    while t < cfg.max_time:
        try:
            rep = net.step(cfg.dt)
        except PropertyRangeError as exc:
            two_phase = True
            failure = str(exc)
            break
        t += cfg.dt
        br = net.branches[0]
        temps = np.concatenate([pipe.T, pipe.Tw]) if pipe is not None else np.empty(0)
        rate = 0.0 if prev is None or temps.size == 0 else float(np.max(np.abs(temps - prev))) / cfg.dt
        prev = temps
        if pipe is not None and pipe.two_phase:
            two_phase = True
        sc, _, _ = delivery_subcooling(props, cfg.delivery_pressure, br.h_out)
        if record_series:
            ser.add(t, float(pipe.T[-1]) if pipe is not None else np.nan, sc, rate, rep.pump_flow)
        if pipe is None or (t >= residence and rate < cfg.steady_tol):
            converged = True
            break

    rec.series = ser.result()
    summary = {"length_m": cfg.length, "diameter_m": cfg.diameter, "insulation_m": cfg.insulation,
               "T_amb_K": cfg.T_amb, "pump_eta": cfg.pump_eta, "pump_V0_m3_s": cfg.pump_V0,
               "pump_dp0_Pa": cfg.pump_dp0}
    if failure:
        rec.flag("two-phase")
        rec.flag("property-range")
        summary.update(phase="two-phase", converged=False, failure=failure)
        rec.summary = summary
        return rec

    br = net.branches[0]
    rep = net.last
    sc, sc_eq, x = delivery_subcooling(props, cfg.delivery_pressure, br.h_out)
    two_phase = two_phase or x > 0.0
    C = ValveSpec(cfg.valve_rated_mdot, cfg.valve_rated_dp).C
    rho_in = float(pipe.rho[-1]) if pipe is not None else float(props.liquid_density(cfg.source_T, cfg.source_pressure))
    opening = br.mdot / (C * np.sqrt(rho_in * br.valve_dp)) if br.valve_dp > 0 else float("inf")
    rm, rE, ms, Es = net.balances(m0, E0)
    summary.update(
        subcooling_K=sc,
        subcooling_equiv_K=sc_eq,
        delivery_quality=x,
        Q_ave_W_per_m=(rep.heat / cfg.length) if pipe is not None else 0.0,
        pump_shaft_W=rep.shaft_power,
        pump_loss_W=rep.loss_power,
        pump_dp_Pa=rep.pump_dp,
        valve_dp_Pa=br.valve_dp,
        valve_opening_equiv=float(opening),
        delivered_kg_s=br.mdot,
        phase="two-phase" if two_phase else "single-phase",
        converged=converged,
        time_to_steady_s=t,
        mass_residual_rel=abs(rm) / ms,
        energy_residual_rel=abs(rE) / Es,
    )
    if two_phase:
        rec.flag("two-phase")
    if not converged:
        rec.flag("not-converged")
    if br.mdot < cfg.throughput * (1.0 - 1e-6):
        rec.flag("throughput-shortfall")
    if opening > 1.0:
        # the pump head barely covers friction; the rated valve could not pass the flow
        rec.flag("valve-beyond-rated")
    rec.summary = summary
    return rec


def single_phase(cfg: TransportCaseConfig, props: PropertySet | None = None) -> bool:
    r = run_transport(cfg, props, record_series=False)
    return r.summary.get("phase") == "single-phase"


def insulation_sweep(base: TransportCaseConfig, lengths, thicknesses, tol: float = 1e-3,
                     props: PropertySet | None = None) -> dict:
    """Smallest insulation thickness giving single-phase delivery, per length.

    The grid brackets the boundary and bisection refines it to ``tol`` metres.
    Returns {length: threshold} with None when no grid point is single-phase;
    a threshold at or below the first grid point is reported as that point.
    """
    props = props or default_properties()
    grid = sorted(float(t) for t in thicknesses)
    out = {}
    for L in lengths:
        cfg = dataclasses.replace(base, length=float(L))
        flags = [single_phase(dataclasses.replace(cfg, insulation=t), props) for t in grid]
        if not any(flags):
            out[float(L)] = None
            continue
        i = flags.index(True)
        if i == 0:
            out[float(L)] = grid[0]
            continue
        lo, hi = grid[i - 1], grid[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if single_phase(dataclasses.replace(cfg, insulation=mid), props):
                hi = mid
            else:
                lo = mid
        out[float(L)] = hi
    return out


def sweep_table(base: TransportCaseConfig, length: float, thicknesses, props: PropertySet | None = None):
    """Delivery subcooling per thickness for one length (plot-ready columns)."""
    props = props or default_properties()
    rows = []
    for t in thicknesses:
        r = run_transport(dataclasses.replace(base, length=float(length), insulation=float(t)), props,
                          record_series=False)
        s = r.summary
        rows.append((float(t), s.get("subcooling_equiv_K", np.nan), 1.0 if s.get("phase") == "two-phase" else 0.0,
                     s.get("Q_ave_W_per_m", np.nan)))
    arr = np.array(rows, dtype=float)
    return {"insulation_m": arr[:, 0], "subcooling_equiv_K": arr[:, 1], "two_phase": arr[:, 2],
            "Q_ave_W_per_m": arr[:, 3]}
