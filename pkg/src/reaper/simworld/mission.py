"""Spiral harvest mission: state machine, controllers, and the main loop.

Traversal geometry
------------------
The field is a rectangle harvested from the outside in.  The machine
drives on already-cleared ground with the standing crop block on its
right, and the cutter bar is side-mounted: it reaches from w/2 to
3w/2 to the right of the vehicle axis, so the bar's near edge runs
along the crop edge while the vehicle itself stays on the lane.  Each
circuit of the block shaves a strip of width w off every side; going
clockwise keeps the block on the right, so the corner turns are
executed toward the block (negative heading change).  The phase is
still named TURN_LEFT_90 after the classic left-hand pattern; the
executor takes a signed target and works either way.

The side-mounted bar is what makes corner coverage exact: the bar
sweeps past the block corner while the vehicle is still on the lane
beyond it, so consecutive strips overlap in the corner square and no
wedge of crop survives at the apexes.

Guidance
--------
The perimeter pass is steered against the boundary lane using fused
GPS/odometry: the controller dead-reckons its pose by integrating the
same kinematic model it commands (exact in simulation, standing in
for wheel odometry) and corrects it with a low-passed average of the
fix-minus-odometry residual.  Filtering the residual instead of the
raw fixes keeps the estimate from lagging through corners while still
letting GPS cancel any odometry drift.  Inner laps steer on vision:
PID on the pixel deviation of the crop edge from its mission-start
reference.  Corner timing uses the odometry pose directly, since fix
noise of sigma 0.75 m is far too coarse to place a turn: the turn
triggers when the along-track distance to the next side's lane line
drops to the turn lead, and a constant-radius arc then lands the
vehicle on the next lane with the new heading.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..geofence import FieldBoundary, GpsModel, contains, gps_fix
from ..navcues import FrameCues, NavCueState
from .vehicle import VehicleParams, VehicleState, step_vehicle, wrap_angle
from .world import FieldState, apply_blade


class MissionPhase(enum.Enum):
    GPS_BOUNDARY_PASS = "GPS_BOUNDARY_PASS"
    FOLLOW_EDGE = "FOLLOW_EDGE"
    TURN_LEFT_90 = "TURN_LEFT_90"
    STEP_INWARD = "STEP_INWARD"
    DONE = "DONE"


# Transitions the state machine may take (from -> allowed next, self
# loops implied).  GPS corner turns happen inside the GPS phase.
LEGAL_TRANSITIONS = {
    MissionPhase.GPS_BOUNDARY_PASS: {MissionPhase.FOLLOW_EDGE},
    MissionPhase.FOLLOW_EDGE: {MissionPhase.TURN_LEFT_90},
    MissionPhase.TURN_LEFT_90: {MissionPhase.FOLLOW_EDGE, MissionPhase.STEP_INWARD},
    MissionPhase.STEP_INWARD: {MissionPhase.FOLLOW_EDGE, MissionPhase.DONE},
    MissionPhase.DONE: set(),
}


@dataclass(frozen=True)
class Commands:
    speed: float
    steer: float
    blade: bool


@dataclass(frozen=True)
class ControlGains:
    edge_kp: float = 0.010          # rad of steer per pixel of deviation
    heading_gain: float = 1.2       # rad of steer per rad of heading error
    gps_kp: float = 0.45            # rad of steer per meter of cross-track
    turn_kp: float = 2.2            # settle gain of the headland turn
    capture_band_deg: float = 20.0
    settle_band_deg: float = 2.0
    settle_ticks: int = 4
    steer_limit_deg: float = 18.0   # clamp while tracking (not turning)


@dataclass(frozen=True)
class MissionSettings:
    dt: float = 0.1
    tick_budget: int = 20000
    blade_width: float = 1.0
    blade_forward: float = 0.2
    cruise_speed: float = 0.5
    lap0_outward_bias: float = 0.05
    turn_lead: float = 0.46         # trigger distance to the next lane line
    eof_arm_distance: float = 3.0   # end-of-field is only believed this close to a corner
    eof_grace: float = 0.30         # extra travel allowed while waiting for the cue
    cue_loss_limit: int = 10
    gps_ema_tau: float = 2.5

    def __post_init__(self):
        if self.dt <= 0 or self.tick_budget < 1:
            raise ValueError("dt and tick_budget must be positive")
        if self.blade_width <= 0 or self.cruise_speed <= 0:
            raise ValueError("blade_width and cruise_speed must be positive")
        if self.turn_lead <= 0 or self.gps_ema_tau <= 0:
            raise ValueError("turn_lead and gps_ema_tau must be positive")


class RectTrack:
    """Clockwise rectangle bookkeeping: sides, headings, lane lines.

    Corner order follows the config; orientation is normalized so the
    interior lies to the right of travel.  Lane lines are the side
    lines shifted outward by half a blade width (plus the perimeter
    bias) and inward by one blade width per completed lap.
    """

    def __init__(self, corners) -> None:
        pts = np.asarray(corners, dtype=np.float64)
        if pts.shape != (4, 2):
            raise ValueError("mission track needs exactly 4 corners")
        area2 = 0.0
        for i in range(4):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % 4]
            area2 += x0 * y1 - x1 * y0
        if abs(area2) < 1e-9:
            raise ValueError("mission track corners are degenerate")
        if area2 > 0.0:  # counterclockwise as given: flip, keep corner 0 first
            pts = pts[[0, 3, 2, 1]]
        for i in range(4):
            a = pts[(i + 1) % 4] - pts[i]
            b = pts[(i + 2) % 4] - pts[(i + 1) % 4]
            if abs(a @ b) > 1e-6 * np.linalg.norm(a) * np.linalg.norm(b):
                raise ValueError("mission track must be rectangular")
        self.corners = pts
        self.units = np.empty((4, 2))
        self.rights = np.empty((4, 2))
        self.lengths = np.empty(4)
        for i in range(4):
            d = pts[(i + 1) % 4] - pts[i]
            self.lengths[i] = np.linalg.norm(d)
            u = d / self.lengths[i]
            self.units[i] = u
            self.rights[i] = (u[1], -u[0])

    def heading(self, side: int) -> float:
        u = self.units[side % 4]
        return math.atan2(u[1], u[0])

    def lane_offset(self, lap: int, blade_width: float, bias: float) -> float:
        """Signed shift of the lane from the boundary side, along the
        interior normal (negative = outside the boundary)."""
        return lap * blade_width - blade_width / 2.0 - bias

    def lane_point(self, lap: int, side: int, blade_width: float, bias: float) -> np.ndarray:
        c = self.lane_offset(lap, blade_width, bias)
        return self.corners[side % 4] + c * self.rights[side % 4]

    def corner_point(self, lap: int, side: int, blade_width: float, bias: float) -> np.ndarray:
        """Intersection of this side's lane with the next side's lane.

        The fourth side of a lap hands over to the next lap's first
        side, whose lane sits one blade width further in.
        """
        side = side % 4
        nxt = (side + 1) % 4
        nxt_lap = lap + 1 if side == 3 else lap
        c_cur = self.lane_offset(lap, blade_width, bias)
        c_nxt = self.lane_offset(nxt_lap, blade_width, bias)
        return (
            self.corners[nxt]
            + c_cur * self.rights[side]
            + c_nxt * self.rights[nxt]
        )


def headland_turn_command(heading_err: float, params: VehicleParams, gains: ControlGains) -> float:
    """Steer command for a 90-degree headland turn.

    Full lock toward the target until the error enters the capture
    band, then proportional settling; heading_err is target minus
    current, wrapped.
    """
    if abs(heading_err) > math.radians(gains.capture_band_deg):
        return math.copysign(params.steer_max, heading_err)
    return max(-params.steer_max, min(params.steer_max, gains.turn_kp * heading_err))


class MissionController:
    """Closed-loop harvest director; one control decision per tick."""

    def __init__(
        self,
        track: RectTrack,
        fence: FieldBoundary,
        vehicle_params: VehicleParams,
        gains: ControlGains,
        settings: MissionSettings,
        start_state: VehicleState,
    ) -> None:
        self.track = track
        self.fence = fence
        self.vp = vehicle_params
        self.gains = gains
        self.s = settings
        self.phase = MissionPhase.GPS_BOUNDARY_PASS
        self.lap = 0
        self.side = 0
        self.rounds_completed = 0
        self.fault: str | None = None
        self.replica = start_state
        self.drift: np.ndarray | None = None  # EMA of fix minus odometry
        self.eof_latched = False
        self.cue_miss = 0
        self.in_turn = False
        self.turn_target = 0.0
        self.settled = 0
        self.step_after_turn = False

    # -- geometry helpers -------------------------------------------------

    def _pos(self) -> np.ndarray:
        return np.array([self.replica.x, self.replica.y])

    def _s_remaining(self) -> float:
        corner = self.track.corner_point(self.lap, self.side, self.s.blade_width, self.s.lap0_outward_bias)
        return float((corner - self._pos()) @ self.track.units[self.side])

    def _cross_track(self, pos: np.ndarray) -> float:
        """Signed lateral offset from the current lane; positive means
        left of the lane (away from the crop)."""
        lane = self.track.lane_point(self.lap, self.side, self.s.blade_width, self.s.lap0_outward_bias)
        left = -self.track.rights[self.side]
        return float((pos - lane) @ left)

    def _heading_error(self) -> float:
        return wrap_angle(self.replica.heading - self.track.heading(self.side))

    def _fence_breach_imminent(self) -> bool:
        look = self.s.turn_lead + self.s.cruise_speed * 0.5
        ahead = self._pos() + look * np.array(
            [math.cos(self.replica.heading), math.sin(self.replica.heading)]
        )
        return not contains(self.fence, (float(ahead[0]), float(ahead[1])))

    # -- turn executor ----------------------------------------------------

    def _begin_turn(self) -> None:
        self.in_turn = True
        self.settled = 0
        self.turn_target = self.track.heading(self.side + 1)

    def _turn_tick(self) -> tuple[float, bool]:
        """Returns (steer, finished)."""
        err = wrap_angle(self.turn_target - self.replica.heading)
        steer = headland_turn_command(err, self.vp, self.gains)
        if abs(err) <= math.radians(self.gains.settle_band_deg):
            self.settled += 1
        else:
            self.settled = 0
        return steer, self.settled >= self.gains.settle_ticks

    def _advance_side(self) -> None:
        self.in_turn = False
        self.eof_latched = False
        self.cue_miss = 0
        if self.side == 3:
            self.rounds_completed += 1
            if self.phase is not MissionPhase.GPS_BOUNDARY_PASS:
                self.step_after_turn = True
        self.side = (self.side + 1) % 4
        if self.side == 0 and self.phase is MissionPhase.GPS_BOUNDARY_PASS:
            self.lap = 1

    # -- phase handlers ---------------------------------------------------

    def _track_steer(self, lateral_term: float) -> float:
        limit = math.radians(self.gains.steer_limit_deg)
        steer = -lateral_term - self.gains.heading_gain * self._heading_error()
        return max(-limit, min(limit, steer))

    def control_tick(self, cues: FrameCues, fix, field: FieldState) -> tuple[Commands, MissionPhase]:
        """One decision step; also advances the dead-reckoned pose."""
        alpha = self.s.dt / self.s.gps_ema_tau
        residual = np.asarray(fix, dtype=np.float64) - self._pos()
        if self.drift is None:
            # The start pose is surveyed, so odometry drift begins at zero.
            self.drift = np.zeros(2)
        self.drift = self.drift + alpha * (residual - self.drift)

        if self.fault is not None or self.phase is MissionPhase.DONE:
            return self._finish(Commands(0.0, 0.0, False))

        if self.phase is MissionPhase.GPS_BOUNDARY_PASS:
            cmds = self._gps_tick()
        elif self.phase is MissionPhase.FOLLOW_EDGE:
            cmds = self._follow_tick(cues, field)
        elif self.phase is MissionPhase.TURN_LEFT_90:
            cmds = self._turn_phase_tick(field)
        else:  # STEP_INWARD
            cmds = self._step_tick(field)
        return self._finish(cmds)

    def _finish(self, cmds: Commands) -> tuple[Commands, MissionPhase]:
        self.replica = step_vehicle(
            self.replica, self.vp, cmds.steer, cmds.speed, cmds.blade, self.s.dt
        )
        return cmds, self.phase

    def _gps_tick(self) -> Commands:
        if self.in_turn:
            steer, done = self._turn_tick()
            if done:
                self._advance_side()
                if self.side == 0:  # perimeter closed
                    self.phase = MissionPhase.FOLLOW_EDGE
            return Commands(self.s.cruise_speed, steer, True)
        if self._s_remaining() <= self.s.turn_lead or self._fence_breach_imminent():
            self._begin_turn()
            steer, _ = self._turn_tick()
            return Commands(self.s.cruise_speed, steer, True)
        e_ct = self._cross_track(self._pos() + self.drift)
        e_ct = max(-0.5, min(0.5, e_ct))
        return Commands(self.s.cruise_speed, self._track_steer(self.gains.gps_kp * e_ct), True)

    def _follow_tick(self, cues: FrameCues, field: FieldState) -> Commands:
        s_rem = self._s_remaining()
        if cues.end_of_field and s_rem <= self.s.eof_arm_distance:
            self.eof_latched = True
        if cues.e_outer is None:
            self.cue_miss += 1
        else:
            self.cue_miss = 0
        if (
            self.cue_miss > self.s.cue_loss_limit
            and not self.eof_latched
            and s_rem > self.s.eof_arm_distance
        ):
            self.fault = "crop edge lost in FOLLOW_EDGE for %d consecutive frames" % self.cue_miss
            return Commands(0.0, 0.0, False)

        trigger = s_rem <= self.s.turn_lead and (
            self.eof_latched or s_rem <= self.s.turn_lead - self.s.eof_grace
        )
        if trigger or self._fence_breach_imminent():
            self.phase = MissionPhase.TURN_LEFT_90
            self._begin_turn()
            steer, _ = self._turn_tick()
            return Commands(self.s.cruise_speed, steer, False)

        dev = cues.deviation if cues.deviation is not None else 0.0
        return Commands(self.s.cruise_speed, self._track_steer(self.gains.edge_kp * dev), True)

    def _turn_phase_tick(self, field: FieldState) -> Commands:
        steer, done = self._turn_tick()
        if done:
            self._advance_side()
            exhausted = field.uncut_span() < self.s.blade_width
            if self.step_after_turn or exhausted:
                self.step_after_turn = False
                self.phase = MissionPhase.STEP_INWARD
            else:
                self.phase = MissionPhase.FOLLOW_EDGE
        return Commands(self.s.cruise_speed, steer, False)

    def _step_tick(self, field: FieldState) -> Commands:
        if field.uncut_span() < self.s.blade_width:
            self.phase = MissionPhase.DONE
            return Commands(0.0, 0.0, False)
        self.lap += 1
        self.phase = MissionPhase.FOLLOW_EDGE
        return Commands(self.s.cruise_speed, self._track_steer(0.0), False)
