import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lh2airport.flownet import (
    Boundary,
    Branch,
    CavitationError,
    ConstantConductivity,
    Conductivity,
    Insulation,
    OperatingPointError,
    OverfillError,
    Pipe,
    PipeSegment,
    PumpedNetwork,
    PumpSpec,
    SupplyExhaustedError,
    Tank,
    TankSpec,
    ValveSpec,
    friction_factor,
    network_solve_step,
    pipe_pressure_drop,
    pipe_step,
    pump_efficiency,
    pump_energy,
    pump_pressure_rise,
    radial_heat_ingress,
    sphere_area,
    tank_step,
    valve_dp,
    valve_flow,
)
from lh2airport.h2props import default_properties

P = default_properties()


class TestPump:
    spec = PumpSpec(dp0=1.35e5, V0=0.09, eta_max=0.6)

    def test_curve_end_points(self):
        assert pump_pressure_rise(self.spec, 0.0) == pytest.approx(1.35e5)
        assert pump_pressure_rise(self.spec, 0.09) == pytest.approx(0.0, abs=1e-9)
        assert pump_pressure_rise(self.spec, 0.045) == pytest.approx(0.75 * 1.35e5)

    def test_clamped_beyond_zero_head(self):
        assert pump_pressure_rise(self.spec, 0.2) == 0.0

    def test_affinity_scaling(self):
        half = self.spec.at_speed(0.5)
        assert pump_pressure_rise(half, 0.0) == pytest.approx(0.25 * 1.35e5)
        assert pump_pressure_rise(half, 0.045) == pytest.approx(0.0, abs=1e-9)

    @given(st.floats(0.0, 0.0899), st.floats(1e-5, 0.01))
    def test_curve_strictly_decreasing(self, V, dV):
        V2 = min(V + dV, 0.09)
        assert pump_pressure_rise(self.spec, V2) < pump_pressure_rise(self.spec, V)

    def test_energy_example(self):
        shaft, loss, dh = pump_energy(self.spec, 0.054, 1.0e5, 70.0, eta=0.6)
        assert shaft == pytest.approx(9000.0)
        assert loss == pytest.approx(3600.0)
        assert dh * 70.0 * 0.054 == pytest.approx(shaft)

    def test_ideal_pump(self):
        shaft, loss, dh = pump_energy(self.spec, 0.05, 0.8e5, 71.0, eta=1.0)
        assert loss == 0.0
        assert dh == pytest.approx(0.8e5 / 71.0)

    def test_efficiency_peak_at_half_zero_head_flow(self):
        assert pump_efficiency(self.spec, 0.045) == pytest.approx(0.6)
        assert pump_efficiency(self.spec, 0.03) < 0.6

    def test_efficiency_floor(self):
        with pytest.raises(OperatingPointError):
            pump_energy(self.spec, 1e-4, 1.0e5, 70.0)

    def test_distribution_pump_at_forty_kg_s(self):
        # 40 kg/s at about 70.8 kg/m3 is 0.565 m3/s
        pump = PumpSpec(dp0=0.9e5, V0=0.8, eta_max=0.6)
        assert pump_pressure_rise(pump, 0.565) == pytest.approx(0.45e5, rel=0.01)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            PumpSpec(dp0=0.0, V0=0.1, eta_max=0.5)
        with pytest.raises(ValueError):
            PumpSpec(dp0=1e5, V0=0.1, eta_max=1.5)


class TestFriction:
    def test_reference_values(self):
        assert friction_factor(1e5) == pytest.approx(0.017778, abs=1e-6)
        assert friction_factor(1e4) == pytest.approx(0.030779, abs=1e-6)

    def test_monotone(self):
        assert friction_factor(1e6) < friction_factor(1e5)

    def test_laminar_blend(self):
        turb = (1.8 * 3.0 - 1.5) ** -2
        assert friction_factor(1000.0) == pytest.approx(max(0.064, turb))
        assert friction_factor(100.0) == pytest.approx(0.64)
        # no jump at the blend point
        assert friction_factor(3999.0) == pytest.approx(friction_factor(4000.0), rel=0.01)

    def test_domain(self):
        with pytest.raises(ValueError):
            friction_factor(0.0)

    def test_pipe_drop_scaling(self):
        seg = PipeSegment(4000.0, 0.22, heat_per_m=2.0)
        assert pipe_pressure_drop(seg, 0.0, 71.0, 1.3e-5) == 0.0
        ratio = pipe_pressure_drop(seg, 7.64, 71.0, 1.3e-5) / pipe_pressure_drop(seg, 3.82, 71.0, 1.3e-5)
        Re = 3.82 * 0.22 / (seg.area * 1.3e-5)
        assert ratio == pytest.approx(4.0 * float(friction_factor(2 * Re) / friction_factor(Re)), rel=1e-12)
        assert 3.5 <= ratio < 4.0

    def test_pipe_drop_scaling_high_reynolds(self):
        # the 18 inch supply line at 40 kg/s
        seg = PipeSegment(2000.0, 0.45, heat_per_m=10.0)
        ratio = pipe_pressure_drop(seg, 80.0, 71.0, 1.3e-5) / pipe_pressure_drop(seg, 40.0, 71.0, 1.3e-5)
        assert 3.6 <= ratio <= 4.0

    def test_six_inch_drop_exceeds_eight_inch(self):
        six = PipeSegment(4000.0, 0.16, heat_per_m=2.0)
        eight = PipeSegment(4000.0, 0.22, heat_per_m=2.0)
        assert pipe_pressure_drop(six, 3.82, 71.0, 1.3e-5) > pipe_pressure_drop(eight, 3.82, 71.0, 1.3e-5)


class TestValve:
    spec = ValveSpec(rated_mdot=20.0, rated_dp=0.3e5, rated_rho=70.0)

    def test_closed(self):
        assert valve_flow(self.spec, 0.0, 2e5, 1e5, 70.0) == 0.0

    def test_rated_point(self):
        assert valve_flow(self.spec, 1.0, 1.3e5, 1.0e5, 70.0) == pytest.approx(20.0)

    def test_half_dp(self):
        assert valve_flow(self.spec, 1.0, 1.15e5, 1.0e5, 70.0) == pytest.approx(20.0 * math.sqrt(0.5))

    def test_reverse_dp_gives_zero(self):
        assert valve_flow(self.spec, 1.0, 1.0e5, 1.2e5, 70.0) == 0.0

    @given(st.floats(0.05, 1.0), st.floats(100.0, 1e5))
    def test_dp_inverts_flow(self, opening, dp):
        m = valve_flow(self.spec, opening, 1e5 + dp, 1e5, 70.0)
        assert valve_dp(self.spec, opening, m, 70.0) == pytest.approx(dp, rel=1e-9)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_monotone_in_opening(self, a, b):
        lo, hi = sorted((a, b))
        assert valve_flow(self.spec, lo, 1.5e5, 1e5, 70.0) <= valve_flow(self.spec, hi, 1.5e5, 1e5, 70.0)


class TestInsulation:
    def test_constant_k_example(self):
        q = radial_heat_ingress(0.11, 0.12, ConstantConductivity(1e-3), 20.0, 298.0)
        oracle = 2 * math.pi * 1e-3 * 278.0 / math.log(0.23 / 0.11)
        assert q == pytest.approx(oracle, rel=1e-12)
        assert q == pytest.approx(2.37, abs=0.005)

    @given(st.floats(0.005, 0.2))
    def test_thicker_is_colder(self, t):
        k = Conductivity()
        assert radial_heat_ingress(0.11, 2 * t, k, 20.0, 293.0) < radial_heat_ingress(0.11, t, k, 20.0, 293.0)

    def test_mean_conductivity_quadrature(self):
        k = Conductivity()
        T = np.linspace(20.0, 300.0, 200001)
        oracle = np.trapezoid(k(T), T) / 280.0
        assert float(k.mean(20.0, 300.0)) == pytest.approx(oracle, rel=1e-6)

    def test_calibration_anchor(self):
        # 2.5 cm on an 8 inch line at 308 K gives about 4.6 W/m
        q = radial_heat_ingress(0.11, 0.025, Conductivity(), 20.5, 308.0)
        assert q == pytest.approx(4.6, rel=0.1)

    def test_segment_needs_one_heat_mode(self):
        with pytest.raises(ValueError):
            PipeSegment(10.0, 0.2)
        with pytest.raises(ValueError):
            PipeSegment(10.0, 0.2, heat_per_m=1.0, insulation=Insulation(0.05, 293.0))
        with pytest.raises(ValueError):
            PipeSegment(10.0, 0.2, cells=0, heat_per_m=1.0)


class TestPipe:
    def test_adiabatic_steady_flow(self):
        seg = PipeSegment(500.0, 0.2, cells=10, heat_per_m=0.0)
        pipe = Pipe(seg, 2e5, T=20.0)
        h_in = float(P.liquid_enthalpy(20.5, 2e5))
        for _ in range(400):
            r = pipe.step(5.0, h_in, 2e5, 5.0)
        assert r.h_out == pytest.approx(h_in, rel=1e-6)

    def test_supply_pipe_temperature_rise(self):
        # steady state: all 20 kW of ingress goes into 3 kg/s of liquid
        seg = PipeSegment(2000.0, 0.45, cells=20, heat_per_m=10.0, wall_heat_capacity=1600.0)
        pipe = Pipe(seg, 2e5, T=20.0)
        h_in = float(P.liquid_enthalpy(20.0, 2e5))
        for _ in range(3000):
            r = pipe.step(3.0, h_in, 2e5, 60.0)
        assert (r.h_out - h_in) * 3.0 == pytest.approx(20000.0, rel=1e-6)
        cp = float(P.state_ph(2e5, h_in, extra=True)["cp"])
        assert pipe.T[-1] - 20.0 == pytest.approx(20000.0 / (3.0 * cp), abs=0.02)
        assert pipe.T[-1] - 20.0 == pytest.approx(0.7, abs=0.05)

    def test_stagnant_pipe_warms_toward_wall(self):
        seg = PipeSegment(100.0, 0.2, cells=4, heat_per_m=0.0)
        pipe = Pipe(seg, 2e5, T=20.0)
        pipe.Tw[:] = 21.0
        h = float(pipe.h[0])
        temps = []
        for _ in range(20):
            pipe.step(0.0, h, 2e5, 10.0)
            temps.append(float(pipe.T[0]))
        assert all(b > a for a, b in zip(temps, temps[1:]))
        assert temps[-1] < 21.0

    def test_single_pipe_conservation(self):
        seg = PipeSegment(1000.0, 0.2, cells=10, heat_per_m=5.0)
        pipe = Pipe(seg, 2e5, T=20.0)
        m0, E0 = pipe.mass, pipe.energy
        h_in = float(P.liquid_enthalpy(20.3, 2e5))
        m_in = m_out = E_in = E_out = Q = 0.0
        for k in range(200):
            mdot = 2.0 + math.sin(k / 10.0)
            r = pipe.step(mdot, h_in, 2e5 - 1000.0 * math.cos(k / 7.0), 2.0)
            m_in += mdot * 2.0
            m_out += r.m_out * 2.0
            E_in += mdot * h_in * 2.0
            E_out += r.m_out * r.h_out * 2.0
            Q += r.heat * 2.0
        assert pipe.mass - m0 == pytest.approx(m_in - m_out, abs=1e-8 * m_in)
        assert pipe.energy - E0 == pytest.approx(E_in - E_out + Q, abs=1e-9 * E_in)

    def test_reversed_inflow_uses_given_enthalpy(self):
        seg = PipeSegment(100.0, 0.2, cells=4, heat_per_m=0.0)
        pipe = Pipe(seg, 2e5, T=20.0)
        E0 = pipe.energy
        h_face = 1.0e5
        r = pipe.step(-1.0, h_face, 2e5, 1.0)
        assert pipe.energy - E0 == pytest.approx(-h_face - r.m_out * r.h_out, abs=1e-6)

    def test_pipe_step_function(self):
        seg = PipeSegment(100.0, 0.2, cells=4, heat_per_m=1.0)
        pipe = Pipe(seg, 2e5, T=20.0)
        res, Tw = pipe_step(pipe, float(pipe.h[0]), 1.0, 1.0)
        assert Tw.shape == (4,)
        assert res.m_in == 1.0

    def test_wave_speed_relaxation(self):
        seg = PipeSegment(1000.0, 0.2, cells=5, heat_per_m=0.0, wave_speed=1000.0)
        pipe = Pipe(seg, 2e5, T=20.0)
        pipe.set_pressure(2.5e5, 0.0, dt=1.0)
        # one second is one transit time: the gap closes by a factor e
        assert pipe.p[0] == pytest.approx(2.5e5 - 0.5e5 / math.e)
        instant = Pipe(PipeSegment(1000.0, 0.2, cells=5, heat_per_m=0.0), 2e5, T=20.0)
        instant.set_pressure(2.5e5, 0.0, dt=1.0)
        assert instant.p[0] == pytest.approx(2.5e5)

    def test_two_phase_onset_on_pressure_drop(self):
        seg = PipeSegment(100.0, 0.2, cells=4, heat_per_m=0.0)
        T = float(P.saturation_temperature(1.3e5)) - 0.05
        pipe = Pipe(seg, 1.5e5, T=T)
        assert not pipe.two_phase
        pipe.step(1.0, float(pipe.h[0]), 1.2e5, 0.5)
        assert pipe.two_phase
        assert np.max(pipe.x) > 0.0


class TestTank:
    spec = TankSpec(volume=96.0, heat_ingress=1300.0, name="aircraft")

    def test_sphere_area(self):
        r = (3 * 8000.0 / (4 * math.pi)) ** (1 / 3)
        assert sphere_area(8000.0) == pytest.approx(4 * math.pi * r * r)

    def test_fixed_point_without_heat_or_flow(self):
        spec = TankSpec(volume=96.0, heat_ingress=0.0)
        tank = Tank.saturated(spec, 1.3e5, 0.5)
        p0, l0 = tank.pressure, tank.level
        for _ in range(10):
            tank_step(tank, [], 0.0, 60.0)
        assert tank.pressure == pytest.approx(p0, rel=1e-9)
        assert tank.level == pytest.approx(l0, rel=1e-9)

    def test_overnight_boil_off_at_mop(self):
        tank = Tank.saturated(self.spec, 1.7e5, 0.966)
        vented = sum(tank.step([], 0.0, 60.0) for _ in range(480))
        assert tank.pressure <= 1.7e5 * (1 + 1e-9)
        assert vented == pytest.approx(77.0, rel=0.25)
        # at MOP nearly every joule of ingress leaves as latent heat of vented vapor
        assert vented == pytest.approx(1300.0 * 8 * 3600 / float(P.latent_heat(1.7e5)), rel=0.05)

    def test_fill_reaches_ullage_limit_near_design_mass(self):
        tank = Tank.saturated(self.spec, 1.3e5, 0.05)
        h = float(P.liquid_enthalpy(20.6, 1.5e5))
        moved = 0.0
        while tank.level < 0.965:
            tank.step([(20.0, h)], 0.0, 0.5)
            moved += 10.0
        assert moved == pytest.approx(6200.0, rel=0.05)

    def test_overfill_raises(self):
        tank = Tank.saturated(self.spec, 1.3e5, 0.96)
        h = float(P.liquid_enthalpy(20.6, 1.5e5))
        with pytest.raises(OverfillError):
            for _ in range(100):
                tank.step([(20.0, h)], 0.0, 1.0)

    def test_supply_exhausted(self):
        tank = Tank.saturated(TankSpec(volume=10.0, heat_ingress=0.0), 1.2e5, 0.06)
        with pytest.raises(SupplyExhaustedError):
            for _ in range(100):
                tank.step([], 5.0, 1.0)

    def test_vent_holds_mop(self):
        tank = Tank.saturated(TankSpec(volume=10.0, heat_ingress=5e4, mop=1.5e5), 1.45e5, 0.5)
        total = sum(tank.step([], 0.0, 10.0) for _ in range(50))
        assert total > 0.0
        assert tank.pressure == pytest.approx(1.5e5, rel=1e-6)

    def test_ua_heat(self):
        spec = TankSpec(volume=8000.0, ua=0.009, T_amb=308.15)
        assert spec.heat(20.86) == pytest.approx(0.009 * sphere_area(8000.0) * (308.15 - 20.86))


def _network(flow=5.0, dt_heat=10.0):
    farm = Tank.saturated(TankSpec(volume=500.0, heat_ingress=2000.0, liquid_head=5.0, vent=False, name="farm"),
                          1.2e5, 0.6)
    supply = Pipe(PipeSegment(500.0, 0.2, cells=8, heat_per_m=dt_heat, name="supply"), 1.6e5, T=20.6)
    hose = Pipe(PipeSegment(10.0, 0.1, cells=2, heat_per_m=5.0, name="hose"), 1.5e5, T=20.6)
    recycle = Pipe(PipeSegment(500.0, 0.1, cells=8, heat_per_m=3.0, name="recycle"), 1.5e5, T=20.6)
    sink = Boundary(1.3e5, name="aircraft")
    branches = [
        Branch("out", [hose], ValveSpec(20.0, 0.3e5), sink, mode="flow", setpoint=flow),
        Branch("recycle", [recycle], ValveSpec(5.0, 0.5e5), farm, mode="flow", setpoint=1.0),
    ]
    return PumpedNetwork(farm, PumpSpec(0.9e5, 0.2, 0.6), supply, branches)


class TestNetwork:
    def test_conservation(self):
        net = _network()
        m0, E0 = net.stored_mass(), net.stored_energy()
        for _ in range(200):
            net.step(1.0)
        rm, rE, ms, Es = net.balances(m0, E0)
        assert abs(rm) / ms < 1e-8
        assert abs(rE) / Es < 1e-6

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.5, 10.0), st.floats(0.2, 5.0), st.floats(0.0, 20.0))
    def test_conservation_property(self, flow, dt, heat):
        net = _network(flow, heat)
        m0, E0 = net.stored_mass(), net.stored_energy()
        for k in range(30):
            network_solve_step(net, {"out": flow * (1.0 + 0.3 * math.sin(k))}, dt)
        rm, rE, ms, Es = net.balances(m0, E0)
        assert abs(rm) / ms < 1e-8
        assert abs(rE) / Es < 1e-6

    def test_flow_setpoints_delivered(self):
        net = _network(flow=5.0)
        rep = net.step(1.0)
        assert rep.branch_flows["out"] == pytest.approx(5.0)
        assert rep.pump_flow == pytest.approx(sum(rep.branch_flows.values()), rel=1e-8)

    def test_deterministic(self):
        a, b = _network(), _network()
        for _ in range(20):
            ra, rb = a.step(1.0), b.step(1.0)
        assert ra.node_pressure == rb.node_pressure
        assert a.stored_energy() == b.stored_energy()

    def test_cavitation_on_vapor_at_suction(self):
        h = float(P.saturation_state(1.2e5)["h_l"]) + 5000.0
        src = Boundary(1.2e5, h, name="wet")
        pipe = Pipe(PipeSegment(100.0, 0.2, cells=2, heat_per_m=0.0), 1.5e5, T=20.0)
        net = PumpedNetwork(src, PumpSpec(1e5, 0.1, 0.6), pipe,
                            [Branch("out", [], ValveSpec(5.0, 0.3e5), Boundary(1.1e5), opening=1.0)])
        with pytest.raises(CavitationError):
            net.step(1.0)

    def test_ideal_source_needs_flow_branches(self):
        src = Boundary.liquid(1.1e5, 19.5)
        with pytest.raises(ValueError):
            PumpedNetwork(src, None, None, [Branch("v", [], ValveSpec(5.0, 0.3e5), Boundary(1.0e5))])

    def test_controller_outputs(self):
        net = _network()
        network_solve_step(net, {"out": 3.0, "pump_speed": 0.9}, 1.0)
        assert net.branch("out").mdot == pytest.approx(3.0)
        assert net.pump.speed_fraction == pytest.approx(0.9)
