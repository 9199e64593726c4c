"""Discrete-time controllers: PI loops, split range, recycle schedule, fill sequencing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class PIControllerSpec:
    """PI law u = bias + gain (e + integral(e dt) / ti), clamped to [lo, hi]."""

    gain: float = 0.05
    ti: float = 2.0
    lo: float = 0.0
    hi: float = 1.0
    bias: float = 0.0

    def __post_init__(self):
        if self.ti <= 0:
            raise ValueError("integral time must be positive")
        if self.lo >= self.hi:
            raise ValueError("controller limits need lo < hi")


@dataclass(frozen=True)
class PIState:
    integral: float = 0.0    # integral contribution in output units
    output: float = 0.0


def pi_step(spec: PIControllerSpec, state: PIState, setpoint: float, measurement: float, dt: float):
    """One PI update with clamping anti-windup; returns (output, new state).

    The integral is frozen whenever the unclamped output is saturated and the
    error would push it further into saturation.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    e = setpoint - measurement
    integral = state.integral + spec.gain * dt / spec.ti * e
    u = spec.bias + spec.gain * e + integral
    if (u > spec.hi and e > 0.0) or (u < spec.lo and e < 0.0):
        integral = state.integral
        u = spec.bias + spec.gain * e + integral
    u = min(max(u, spec.lo), spec.hi)
    return u, PIState(integral, u)


@dataclass
class FirstOrderLag:
    """Actuator with time constant tau; exact discretisation of dy/dt = (u - y)/tau."""

    tau: float = 1.0
    value: float = 0.0

    def step(self, target: float, dt: float) -> float:
        if self.tau <= 0.0:
            self.value = target
        else:
            self.value = target + (self.value - target) * math.exp(-dt / self.tau)
        return self.value


def split_range(demand: float, s_min: float = 0.3):
    """(valve opening, pump speed fraction) from one normalised demand signal.

    The lower half of the range opens the valve at minimum pump speed; the upper
    half raises the pump speed with the valve fully open.
    """
    if not 0.0 < s_min <= 1.0:
        raise ValueError("s_min must be in (0, 1]")
    d = min(max(float(demand), 0.0), 1.0)
    if d <= 0.5:
        return 2.0 * d, s_min
    return 1.0, s_min + (1.0 - s_min) * (2.0 * d - 1.0)


@dataclass(frozen=True)
class RecycleSchedule:
    """Recycle set-points (kg/s) by time of day and refuelling activity."""

    refuelling: float = 0.2
    idle: float = 3.0
    night: float = 2.8
    day_start: float = 6.0      # hours
    day_end: float = 22.0

    def __post_init__(self):
        if min(self.refuelling, self.idle, self.night) < 0:
            raise ValueError("recycle set-points must be non-negative")
        if not 0.0 <= self.day_start < self.day_end <= 24.0:
            raise ValueError("need 0 <= day_start < day_end <= 24")


def recycle_setpoint(schedule: RecycleSchedule, clock_hours: float, refuelling_active: bool) -> float:
    """Recycle set-point at a time of day given in hours, [0, 24)."""
    t = clock_hours % 24.0
    if schedule.day_start <= t < schedule.day_end:
        return schedule.refuelling if refuelling_active else schedule.idle
    return schedule.night


def minimum_flow_recycle(setpoint: float, other_flow: float, min_pump_flow: float) -> float:
    """Raise the recycle set-point so the pump never runs below its minimum flow."""
    return max(setpoint, min_pump_flow - max(other_flow, 0.0))


@dataclass(frozen=True)
class FillPlanEntry:
    aircraft: str
    start: float             # s; with ``after`` it counts from that fill's end
    target_mass: float       # kg
    max_rate: float = 20.0   # kg/s
    after: str | None = None


@dataclass
class RefuellingSequencer:
    """Per-aircraft flow set-points from a fill plan and the measured transferred mass.

    Each fill runs at ``max_rate`` and ramps down over the last ``ramp_time``
    seconds of remaining transfer so the flow loop can stop on target. A fill
    ends when its target is reached or when the caller marks it stopped (for
    example on a tank level trip).
    """

    plan: list
    ramp_time: float = 5.0
    min_rate: float = 0.5
    stopped: set = field(default_factory=set)
    ended: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [e.aircraft for e in self.plan]
        if len(set(ids)) != len(ids):
            raise ValueError("one plan entry per aircraft")
        for e in self.plan:
            if e.target_mass < 0 or not 0.0 <= e.max_rate <= 20.0 + 1e-12:
                raise ValueError(f"{e.aircraft}: need target >= 0 and max rate in [0, 20] kg/s")

    def stop(self, aircraft: str) -> None:
        self.stopped.add(aircraft)

    def start_time(self, e: FillPlanEntry):
        if e.after is None:
            return e.start
        end = self.ended.get(e.after)
        return None if end is None else end + e.start

    def finished(self, aircraft: str, transferred: float) -> bool:
        e = self._entry(aircraft)
        return aircraft in self.stopped or transferred >= e.target_mass

    def _entry(self, aircraft: str) -> FillPlanEntry:
        for e in self.plan:
            if e.aircraft == aircraft:
                return e
        raise KeyError(aircraft)

    def _started(self, e: FillPlanEntry, time: float) -> bool:
        t0 = self.start_time(e)
        return t0 is not None and time >= t0

    def active(self, time: float, transferred: dict) -> list:
        return [e.aircraft for e in self.plan
                if self._started(e, time) and not self.finished(e.aircraft, transferred.get(e.aircraft, 0.0))]

    def complete(self) -> bool:
        return len(self.ended) == len(self.plan)

    def setpoints(self, time: float, transferred: dict) -> dict:
        """Set-points at ``time``; also records when each fill ends."""
        out = {}
        for e in self.plan:
            done = transferred.get(e.aircraft, 0.0)
            if not self._started(e, time):
                out[e.aircraft] = 0.0
                continue
            if self.finished(e.aircraft, done):
                self.ended.setdefault(e.aircraft, time)
                out[e.aircraft] = 0.0
                continue
            remaining = e.target_mass - done
            out[e.aircraft] = min(e.max_rate, max(remaining / self.ramp_time, self.min_rate))
        return out


def refuelling_sequencer(fill_plan, time: float, transferred: dict | None = None) -> dict:
    """Functional form of RefuellingSequencer.setpoints."""
    return RefuellingSequencer(list(fill_plan)).setpoints(time, transferred or {})

