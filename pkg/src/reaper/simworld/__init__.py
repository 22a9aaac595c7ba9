"""Closed-loop synthetic field, vehicle, and mission machinery."""

from .vehicle import VehicleParams, VehicleState, step_vehicle, PidGains, PidState, pid_step
from .world import CellState, FieldState, build_field, apply_blade
from .render import CameraParams, RenderLabel, render_scene
from .mission import (
    Commands,
    ControlGains,
    MissionController,
    MissionPhase,
    MissionSettings,
    RectTrack,
    headland_turn_command,
)

__all__ = [
    "VehicleParams",
    "VehicleState",
    "step_vehicle",
    "PidGains",
    "PidState",
    "pid_step",
    "CellState",
    "FieldState",
    "build_field",
    "apply_blade",
    "CameraParams",
    "RenderLabel",
    "render_scene",
    "Commands",
    "ControlGains",
    "MissionController",
    "MissionPhase",
    "MissionSettings",
    "RectTrack",
    "headland_turn_command",
]
