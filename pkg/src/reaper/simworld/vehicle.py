"""Bicycle-model vehicle with actuator limits, plus the PID used for steering.

World frame: x east, y north, heading in radians measured
counterclockwise from +x.  Positive steer angle gives a positive
heading rate.  Missions traverse the field clockwise (uncut crop kept
on the right-hand side), so their quarter turns command negative
heading steps; nothing in the kinematics cares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class VehicleParams:
    """Geometry and actuator limits, SI units and radians."""

    wheelbase: float = 0.5
    steer_max: float = math.radians(52.0)
    steer_rate_max: float = math.radians(90.0)
    speed_tau: float = 0.5

    def __post_init__(self):
        if self.wheelbase <= 0.0:
            raise ValueError("wheelbase must be positive")
        if not (0.0 < self.steer_max < math.pi / 2):
            raise ValueError("steer_max must lie in (0, 90) degrees")
        if self.steer_rate_max <= 0.0:
            raise ValueError("steer_rate_max must be positive")
        if self.speed_tau <= 0.0:
            raise ValueError("speed_tau must be positive")

    @property
    def min_turn_radius(self) -> float:
        return self.wheelbase / math.tan(self.steer_max)


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0
    steer: float = 0.0
    speed: float = 0.0
    blade_on: bool = False


def step_vehicle(
    state: VehicleState,
    params: VehicleParams,
    steer_cmd: float,
    speed_cmd: float,
    blade_cmd: bool,
    dt: float,
) -> VehicleState:
    """Advance one tick of dt seconds.

    The steering actuator slews toward the clamped command at
    steer_rate_max; speed follows a first-order lag with time constant
    speed_tau; then the pose integrates the bicycle model
        x += v cos(heading) dt,  y += v sin(heading) dt,
        heading += (v / wheelbase) tan(steer) dt.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    target = max(-params.steer_max, min(params.steer_max, steer_cmd))
    max_delta = params.steer_rate_max * dt
    steer = state.steer + max(-max_delta, min(max_delta, target - state.steer))

    alpha = math.exp(-dt / params.speed_tau)
    speed = speed_cmd + (state.speed - speed_cmd) * alpha

    heading = state.heading + (speed / params.wheelbase) * math.tan(steer) * dt
    x = state.x + speed * math.cos(state.heading) * dt
    y = state.y + speed * math.sin(state.heading) * dt
    return VehicleState(x=x, y=y, heading=heading, steer=steer, speed=speed, blade_on=blade_cmd)


def coast(state: VehicleState, params: VehicleParams, dt: float) -> VehicleState:
    """Hold current commands (steer in place, speed target = current)."""
    return step_vehicle(state, params, state.steer, state.speed, state.blade_on, dt)


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float = 0.0
    kd: float = 0.0
    integral_limit: float = 1.0
    output_limit: float = 1.0

    def __post_init__(self):
        if self.integral_limit < 0.0 or self.output_limit <= 0.0:
            raise ValueError("integral_limit must be >= 0 and output_limit > 0")


@dataclass(frozen=True)
class PidState:
    """Accumulated integral and previous error; prev_error None means
    the next step is the first sample (derivative suppressed)."""

    integral: float = 0.0
    prev_error: float | None = None


def pid_step(gains: PidGains, state: PidState, error: float, dt: float) -> tuple[float, PidState]:
    """One PID update; returns (output, new state).

    The integral is clamped to +-integral_limit (anti-windup) and the
    output to +-output_limit.  Derivative acts on the error and is zero
    on the first sample.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    integral = state.integral + error * dt
    integral = max(-gains.integral_limit, min(gains.integral_limit, integral))
    if state.prev_error is None:
        derivative = 0.0
    else:
        derivative = (error - state.prev_error) / dt
    raw = gains.kp * error + gains.ki * integral + gains.kd * derivative
    out = max(-gains.output_limit, min(gains.output_limit, raw))
    return out, PidState(integral=integral, prev_error=error)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi
