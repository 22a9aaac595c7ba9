"""Top-level mission loop: render, analyze, decide, move, cut, log.

One tick is: render the camera frame from the current true pose, run
the vision pipeline on it, extract navigation cues, sample a GPS fix,
ask the mission controller for commands, advance the vehicle, sweep
the blade, and append a telemetry row.  The loop ends when the
controller reports DONE, faults, or the tick budget runs out.

Telemetry rows and the report body are plain deterministic text:
identical configs produce byte-identical output (the per-frame vision
timings are reported separately, since wall time is not reproducible).
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from .config import MissionConfig
from .geofence import GpsModel, boundary_from_corners, contains, gps_fix
from .navcues import initialize_references, extract_cues
from .pipeline import analyze_frame
from .simworld.mission import MissionController, MissionPhase, RectTrack
from .simworld.render import render_scene
from .simworld.vehicle import VehicleState, step_vehicle, wrap_angle
from .simworld.world import FieldState, apply_blade, build_field


TELEMETRY_COLUMNS = (
    "tick", "t_sim", "x", "y", "heading_deg", "steer_deg", "speed", "phase",
    "l_height", "e_outer", "deviation", "end_of_field", "blade",
    "gps_x", "gps_y", "in_fence",
)


@dataclass(frozen=True)
class MissionReport:
    status: str                      # DONE, FAULT, or BUDGET
    fault: str | None
    ticks: int
    sim_time_s: float
    coverage: float
    fence_violations: int
    mean_abs_deviation_px: float
    rounds_completed: int
    phase_trace: tuple               # run-length encoded (name, ticks) pairs
    vision_ms_mean: float
    vision_ms_median: float
    vision_ms_max: float

    def to_text(self) -> str:
        trace = " ".join("%s*%d" % (name, n) for name, n in self.phase_trace)
        lines = [
            "status = %s" % self.status,
            "fault = %s" % (self.fault if self.fault else "-"),
            "ticks = %d" % self.ticks,
            "sim_time_s = %.1f" % self.sim_time_s,
            "coverage = %.4f" % self.coverage,
            "fence_violations = %d" % self.fence_violations,
            "mean_abs_deviation_px = %.3f" % self.mean_abs_deviation_px,
            "rounds_completed = %d" % self.rounds_completed,
            "phase_trace = %s" % trace,
            "vision_ms_mean = %.2f" % self.vision_ms_mean,
            "vision_ms_median = %.2f" % self.vision_ms_median,
            "vision_ms_max = %.2f" % self.vision_ms_max,
        ]
        return "\n".join(lines) + "\n"


@dataclass
class MissionResult:
    report: MissionReport
    telemetry: tuple                 # CSV lines, header first
    field: FieldState
    path: tuple                      # (x, y) true positions per tick


def start_pose(cfg: MissionConfig) -> VehicleState:
    """Mission start: on the perimeter lane at the first corner, facing
    along the first side, with the crop edge half a blade to the right.

    The perimeter lane target carries an extra outward bias against
    fix noise, but the start pose sits at the unbiased offset so the
    first frame freezes the edge reference exactly half a blade out;
    vision laps then advance the cut by one full blade width per lap.
    """
    track = RectTrack(cfg.field.corners)
    c0 = -cfg.mission.blade_width / 2.0
    p = track.corners[0] + c0 * track.rights[3] + c0 * track.rights[0]
    return VehicleState(x=float(p[0]), y=float(p[1]), heading=track.heading(0))


def _fmt_opt(value, pattern: str) -> str:
    return "" if value is None else pattern % value


def run_mission(cfg: MissionConfig) -> MissionResult:
    field_boundary = boundary_from_corners(cfg.field.corners)
    neighbor = (
        boundary_from_corners(cfg.field.neighbor_corners)
        if cfg.field.neighbor_corners
        else None
    )
    field = build_field(
        field_boundary,
        cell_size=cfg.field.cell_size,
        blade_width=cfg.mission.blade_width,
        crop_height=cfg.field.crop_height,
        residue_height=cfg.field.residue_height,
        texture_seed=cfg.field.texture_seed,
        neighbor=neighbor,
        gap=cfg.field.gap if neighbor is not None else None,
    )
    fence = boundary_from_corners(cfg.geofence.corners)
    gps = GpsModel(sigma=cfg.geofence.sigma, seed=cfg.geofence.seed)
    vp = cfg.vehicle.to_params()
    track = RectTrack(cfg.field.corners)
    vehicle = start_pose(cfg)
    controller = MissionController(track, fence, vp, cfg.control, cfg.mission, vehicle)

    rows = [",".join(TELEMETRY_COLUMNS)]
    path = []
    trace: list = []
    nav_state = None
    fault = None
    status = "BUDGET"
    violations = 0
    dev_sum = 0.0
    dev_n = 0
    vision_ms = []
    ticks = 0

    for tick in range(cfg.mission.tick_budget):
        image, _ = render_scene(field, vehicle, cfg.camera)
        analysis = analyze_frame(image, cfg.pipeline)
        vision_ms.append(analysis.timings_ms["total"])
        if nav_state is None:
            try:
                nav_state = initialize_references(
                    analysis.vtsy,
                    height_fraction=cfg.navcues.height_fraction,
                    eof_tolerance_fraction=cfg.navcues.eof_tolerance_fraction,
                    edge_rows_fraction=cfg.navcues.edge_rows_fraction,
                )
            except ValueError as exc:
                fault = str(exc)
                status = "FAULT"
                ticks = tick
                break
        cues = extract_cues(analysis.vtsy, nav_state)
        fix = gps_fix((vehicle.x, vehicle.y), gps, tick)
        cmds, phase = controller.control_tick(cues, fix, field)
        vehicle = step_vehicle(vehicle, vp, cmds.steer, cmds.speed, cmds.blade, cfg.mission.dt)
        field = apply_blade(
            field,
            vehicle.x,
            vehicle.y,
            vehicle.heading,
            cmds.blade,
            blade_forward=cfg.mission.blade_forward,
            blade_right=cfg.mission.blade_width,
        )

        in_fence = contains(fence, (vehicle.x, vehicle.y))
        if not in_fence:
            violations += 1
        if phase is MissionPhase.FOLLOW_EDGE and cues.deviation is not None:
            dev_sum += abs(cues.deviation)
            dev_n += 1
        if trace and trace[-1][0] == phase.name:
            trace[-1][1] += 1
        else:
            trace.append([phase.name, 1])
        path.append((vehicle.x, vehicle.y))
        rows.append(",".join((
            "%d" % tick,
            "%.3f" % ((tick + 1) * cfg.mission.dt),
            "%.6f" % vehicle.x,
            "%.6f" % vehicle.y,
            "%.6f" % math.degrees(wrap_angle(vehicle.heading)),
            "%.6f" % math.degrees(vehicle.steer),
            "%.6f" % vehicle.speed,
            phase.name,
            _fmt_opt(cues.l_height, "%d"),
            _fmt_opt(cues.e_outer, "%.3f"),
            _fmt_opt(cues.deviation, "%.3f"),
            "1" if cues.end_of_field else "0",
            "1" if cmds.blade else "0",
            "%.6f" % fix[0],
            "%.6f" % fix[1],
            "1" if in_fence else "0",
        )))
        ticks = tick + 1
        if controller.fault is not None:
            fault = controller.fault
            status = "FAULT"
            break
        if phase is MissionPhase.DONE:
            status = "DONE"
            break

    report = MissionReport(
        status=status,
        fault=fault,
        ticks=ticks,
        sim_time_s=ticks * cfg.mission.dt,
        coverage=field.coverage(),
        fence_violations=violations,
        mean_abs_deviation_px=(dev_sum / dev_n) if dev_n else 0.0,
        rounds_completed=controller.rounds_completed,
        phase_trace=tuple((name, n) for name, n in trace),
        vision_ms_mean=sum(vision_ms) / len(vision_ms) if vision_ms else 0.0,
        vision_ms_median=statistics.median(vision_ms) if vision_ms else 0.0,
        vision_ms_max=max(vision_ms) if vision_ms else 0.0,
    )
    return MissionResult(report=report, telemetry=tuple(rows), field=field, path=tuple(path))
