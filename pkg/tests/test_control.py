import numpy as np
import pytest
from hypothesis import given, strategies as st

from lh2airport.control import (
    FillPlanEntry,
    FirstOrderLag,
    PIControllerSpec,
    PIState,
    RecycleSchedule,
    RefuellingSequencer,
    minimum_flow_recycle,
    pi_step,
    recycle_setpoint,
    refuelling_sequencer,
    split_range,
)
from lh2airport.flownet import Boundary, Branch, Pipe, PipeSegment, PumpedNetwork, PumpSpec, ValveSpec

# closed-loop flow: 20 kg/s per unit opening behind a 1 s actuator lag
PLANT_GAIN, PLANT_TAU = 20.0, 1.0
# 5% settling time of that loop with the default tuning, frozen from the
# discrete simulation (a continuous ODE integration gives 7.86 s)
SETTLE_TIME_S = 7.9


def settle_time(spec, setpoint, dt=0.1, horizon=30.0):
    state, lag, y = PIState(), FirstOrderLag(PLANT_TAU, 0.0), 0.0
    ys = []
    for _ in range(int(round(horizon / dt))):
        u, state = pi_step(spec, state, setpoint, y, dt)
        y = PLANT_GAIN * lag.step(u, dt)
        ys.append(y)
    ys = np.array(ys)
    outside = np.nonzero(np.abs(ys - setpoint) > 0.05 * setpoint)[0]
    return (outside[-1] + 2) * dt, ys


class TestPI:
    def test_zero_error_gives_bias(self):
        u, _ = pi_step(PIControllerSpec(bias=0.0), PIState(), 5.0, 5.0, 0.1)
        assert u == 0.0

    def test_persistent_error_saturates_and_stays(self):
        spec = PIControllerSpec()
        state = PIState()
        outs = []
        for _ in range(1000):
            u, state = pi_step(spec, state, 100.0, 0.0, 0.1)
            outs.append(u)
        assert outs[-1] == 1.0
        assert max(outs) <= 1.0
        # the integral stops growing once the output saturates
        assert state.integral < 1.0

    def test_recovers_quickly_after_saturation(self):
        spec = PIControllerSpec()
        state = PIState()
        for _ in range(1000):
            _, state = pi_step(spec, state, 100.0, 0.0, 0.1)
        u, state = pi_step(spec, state, 0.0, 5.0, 0.1)
        assert u < 1.0

    def test_closed_loop_settling_time(self):
        t, ys = settle_time(PIControllerSpec(), 10.0)
        assert t == pytest.approx(SETTLE_TIME_S, abs=0.15)
        assert ys[-1] == pytest.approx(10.0, rel=1e-3)

    @given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=1, max_size=50),
           st.floats(0.01, 5.0))
    def test_output_within_limits(self, pairs, dt):
        spec = PIControllerSpec(gain=0.3, ti=1.5, lo=0.1, hi=0.9)
        state = PIState()
        for sp, meas in pairs:
            u, state = pi_step(spec, state, sp, meas, dt)
            assert 0.1 <= u <= 0.9

    def test_invalid(self):
        with pytest.raises(ValueError):
            PIControllerSpec(ti=0.0)
        with pytest.raises(ValueError):
            pi_step(PIControllerSpec(), PIState(), 1.0, 0.0, 0.0)


class TestLag:
    def test_exact_discretisation(self):
        lag = FirstOrderLag(2.0, 0.0)
        lag.step(1.0, 2.0)
        assert lag.value == pytest.approx(1.0 - np.exp(-1.0))

    def test_zero_tau_is_direct(self):
        assert FirstOrderLag(0.0, 0.3).step(0.8, 0.1) == 0.8


class TestSplitRange:
    def test_examples(self):
        assert split_range(0.0) == (0.0, 0.3)
        assert split_range(0.5) == (1.0, 0.3)
        assert split_range(1.0) == (1.0, 1.0)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        v1, s1 = split_range(lo)
        v2, s2 = split_range(hi)
        assert v1 <= v2 and s1 <= s2

    def test_delivered_flow_continuous_and_monotone(self):
        src = Boundary.liquid(1.1e5, 19.5)
        pipe = Pipe(PipeSegment(4000.0, 0.22, cells=10, heat_per_m=2.0), 1.5e5, T=19.5)
        branch = Branch("throttle", [], ValveSpec(3.82, 0.3e5), Boundary(1.1e5))
        net = PumpedNetwork(src, PumpSpec(0.6e5, 0.09, 0.6), pipe, [branch])
        base = net.pump
        flows = []
        for d in np.linspace(0.02, 1.0, 50):
            opening, speed = split_range(d)
            branch.opening = opening
            net.pump = base.at_speed(speed)
            m, *_ = net.solve_hydraulics()
            flows.append(m)
        flows = np.array(flows)
        assert np.all(np.diff(flows) > 0.0)
        assert np.max(np.diff(flows)) < 0.2 * flows[-1]


class TestRecycle:
    sched = RecycleSchedule(night=2.8)

    def test_examples(self):
        assert recycle_setpoint(self.sched, 10.0, True) == 0.2
        assert recycle_setpoint(self.sched, 10.0, False) == 3.0
        assert recycle_setpoint(self.sched, 2.0, False) == 2.8
        assert recycle_setpoint(RecycleSchedule(night=3.8), 2.0, False) == 3.8

    def test_window_edges(self):
        assert recycle_setpoint(self.sched, 6.0, False) == 3.0
        assert recycle_setpoint(self.sched, 22.0, False) == 2.8

    def test_minimum_flow(self):
        assert minimum_flow_recycle(0.2, 0.0, 1.5) == 1.5
        assert minimum_flow_recycle(0.2, 20.0, 1.5) == 0.2

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            RecycleSchedule(refuelling=-1.0)


class TestSequencer:
    plan = [
        FillPlanEntry("AC1", 0.0, 6200.0),
        FillPlanEntry("AC2", 0.0, 6200.0, after="AC1"),
        FillPlanEntry("AC3", 0.0, 6200.0, after="AC1"),
    ]

    def test_first_fill_at_full_rate(self):
        assert refuelling_sequencer(self.plan, 0.0) == {"AC1": 20.0, "AC2": 0.0, "AC3": 0.0}

    def test_fills_end_on_target(self):
        seq = RefuellingSequencer(list(self.plan))
        moved = {a: 0.0 for a in ("AC1", "AC2", "AC3")}
        dt, t = 0.1, 0.0
        while not seq.complete() and t < 2000.0:
            sps = seq.setpoints(t, moved)
            for a, sp in sps.items():
                assert 0.0 <= sp <= 20.0
                moved[a] += sp * dt
            t += dt
        assert seq.complete()
        for a in moved:
            assert moved[a] == pytest.approx(6200.0, rel=0.005)
        # aircraft 2 and 3 start together once aircraft 1 is done
        assert seq.ended["AC2"] == pytest.approx(seq.ended["AC3"])
        assert seq.ended["AC2"] > seq.ended["AC1"]

    def test_stop_ends_a_fill(self):
        seq = RefuellingSequencer(list(self.plan))
        seq.stop("AC1")
        sps = seq.setpoints(1.0, {"AC1": 100.0})
        assert sps["AC1"] == 0.0
        assert "AC1" in seq.ended

    def test_invalid_plans(self):
        with pytest.raises(ValueError):
            RefuellingSequencer([FillPlanEntry("A", 0.0, 10.0), FillPlanEntry("A", 0.0, 10.0)])
        with pytest.raises(ValueError):
            RefuellingSequencer([FillPlanEntry("A", 0.0, 10.0, max_rate=25.0)])
