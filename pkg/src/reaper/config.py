"""Mission configuration: flat dotted-key text files <-> typed dataclasses.

The on-disk format is one `key = value` per line, `#` comments and
blank lines allowed.  Keys are dotted section paths (segmentation.c,
mission.dt, ...); unknown keys are rejected so typos fail loudly
instead of silently running defaults.  Corner lists are written as
`x,y; x,y; ...`.  serialize_config and parse_config_text round-trip
exactly (floats via repr).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .pipeline import PipelineParams
from .segmentation import SegmentationParams
from .simworld.mission import ControlGains, MissionSettings
from .simworld.render import CameraParams
from .simworld.vehicle import VehicleParams

import math


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CueConfig:
    height_fraction: float = 0.8
    eof_tolerance_fraction: float = 0.03
    edge_rows_fraction: float = 0.5


@dataclass(frozen=True)
class VehicleConfig:
    """Vehicle limits in config units (degrees); to_params() converts."""

    wheelbase: float = 0.5
    steer_max_deg: float = 52.0
    steer_rate_deg: float = 90.0
    speed_tau: float = 0.5

    def to_params(self) -> VehicleParams:
        return VehicleParams(
            wheelbase=self.wheelbase,
            steer_max=math.radians(self.steer_max_deg),
            steer_rate_max=math.radians(self.steer_rate_deg),
            speed_tau=self.speed_tau,
        )


@dataclass(frozen=True)
class FieldConfig:
    corners: tuple = ((0.0, 0.0), (20.0, 0.0), (20.0, 10.0), (0.0, 10.0))
    cell_size: float = 0.25
    crop_height: float = 0.9
    residue_height: float = 0.12
    texture_seed: int = 0
    neighbor_corners: tuple = ()   # empty tuple: no second field
    gap: float = 0.0


@dataclass(frozen=True)
class GeofenceConfig:
    """The legal operating boundary; wider than the crop so the
    perimeter lane and headland turns stay inside it."""

    corners: tuple = ((-3.5, -3.5), (23.5, -3.5), (23.5, 13.5), (-3.5, 13.5))
    sigma: float = 0.75
    seed: int = 0


@dataclass(frozen=True)
class MissionConfig:
    pipeline: PipelineParams
    navcues: CueConfig
    camera: CameraParams
    vehicle: VehicleConfig
    control: ControlGains
    mission: MissionSettings
    field: FieldConfig
    geofence: GeofenceConfig


def default_config() -> MissionConfig:
    return MissionConfig(
        pipeline=PipelineParams(),
        navcues=CueConfig(),
        # Missions render small frames; detection tolerances scale with
        # the image, and 160x120 keeps a full field run fast.
        camera=CameraParams(width=160, height=120),
        vehicle=VehicleConfig(),
        control=ControlGains(),
        mission=MissionSettings(),
        field=FieldConfig(),
        geofence=GeofenceConfig(),
    )


# dotted key -> (config section, dataclass field, value kind)
_KEYS: tuple = (
    ("segmentation.phi1", "seg", "phi1", "float"),
    ("segmentation.phi2", "seg", "phi2", "float"),
    ("segmentation.a", "seg", "a", "float"),
    ("segmentation.b", "seg", "b", "float"),
    ("segmentation.c", "seg", "c", "float"),
    ("segmentation.hue_low", "seg", "hue_low", "float"),
    ("segmentation.hue_high", "seg", "hue_high", "float"),
    ("segmentation.open_radius", "pipeline", "open_radius", "int"),
    ("texture.tilt_max_deg", "pipeline", "tilt_max_deg", "float"),
    ("texture.tilt_step_deg", "pipeline", "tilt_step_deg", "float"),
    ("texture.min_length_fraction", "pipeline", "min_length_fraction", "float"),
    ("texture.max_gap", "pipeline", "max_gap", "int"),
    ("navcues.height_fraction", "navcues", "height_fraction", "float"),
    ("navcues.eof_tolerance_fraction", "navcues", "eof_tolerance_fraction", "float"),
    ("navcues.edge_rows_fraction", "navcues", "edge_rows_fraction", "float"),
    ("camera.width", "camera", "width", "int"),
    ("camera.height", "camera", "height", "int"),
    ("camera.hfov_deg", "camera", "hfov_deg", "float"),
    ("camera.height_m", "camera", "height_m", "float"),
    ("camera.pitch_deg", "camera", "pitch_deg", "float"),
    ("camera.forward_m", "camera", "forward_m", "float"),
    ("camera.far_m", "camera", "far_m", "float"),
    ("camera.samples", "camera", "samples", "int"),
    ("vehicle.wheelbase", "vehicle", "wheelbase", "float"),
    ("vehicle.steer_max_deg", "vehicle", "steer_max_deg", "float"),
    ("vehicle.steer_rate_deg", "vehicle", "steer_rate_deg", "float"),
    ("vehicle.speed_tau", "vehicle", "speed_tau", "float"),
    ("control.edge_kp", "control", "edge_kp", "float"),
    ("control.heading_gain", "control", "heading_gain", "float"),
    ("control.gps_kp", "control", "gps_kp", "float"),
    ("control.turn_kp", "control", "turn_kp", "float"),
    ("control.capture_band_deg", "control", "capture_band_deg", "float"),
    ("control.settle_band_deg", "control", "settle_band_deg", "float"),
    ("control.settle_ticks", "control", "settle_ticks", "int"),
    ("control.steer_limit_deg", "control", "steer_limit_deg", "float"),
    ("mission.dt", "mission", "dt", "float"),
    ("mission.tick_budget", "mission", "tick_budget", "int"),
    ("mission.blade_width", "mission", "blade_width", "float"),
    ("mission.blade_forward", "mission", "blade_forward", "float"),
    ("mission.cruise_speed", "mission", "cruise_speed", "float"),
    ("mission.lap0_outward_bias", "mission", "lap0_outward_bias", "float"),
    ("mission.turn_lead", "mission", "turn_lead", "float"),
    ("mission.eof_arm_distance", "mission", "eof_arm_distance", "float"),
    ("mission.eof_grace", "mission", "eof_grace", "float"),
    ("mission.cue_loss_limit", "mission", "cue_loss_limit", "int"),
    ("mission.gps_ema_tau", "mission", "gps_ema_tau", "float"),
    ("field.corners", "field", "corners", "corners"),
    ("field.cell_size", "field", "cell_size", "float"),
    ("field.crop_height", "field", "crop_height", "float"),
    ("field.residue_height", "field", "residue_height", "float"),
    ("field.texture_seed", "field", "texture_seed", "int"),
    ("field.neighbor_corners", "field", "neighbor_corners", "corners"),
    ("field.gap", "field", "gap", "float"),
    ("geofence.corners", "geofence", "corners", "corners"),
    ("geofence.sigma", "geofence", "sigma", "float"),
    ("geofence.seed", "geofence", "seed", "int"),
)


def _parse_corners(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    out = []
    for part in text.split(";"):
        xy = part.split(",")
        if len(xy) != 2:
            raise ConfigError("corner entries must be 'x,y' pairs: %r" % part)
        out.append((float(xy[0]), float(xy[1])))
    return tuple(out)


def _format_corners(corners: tuple) -> str:
    return "; ".join("%r,%r" % (float(x), float(y)) for x, y in corners)


def _parse_value(kind: str, raw: str, key: str):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "corners":
            return _parse_corners(raw)
    except ValueError as exc:
        raise ConfigError("bad value for %s: %r" % (key, raw)) from exc
    raise ConfigError("unhandled kind %r" % kind)


def parse_config_text(text: str) -> MissionConfig:
    keymap = {k: (sec, fld, kind) for k, sec, fld, kind in _KEYS}
    by_section: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("line %d: expected 'key = value'" % lineno)
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in keymap:
            raise ConfigError("line %d: unknown key %r" % (lineno, key))
        sec, fld, kind = keymap[key]
        sect = by_section.setdefault(sec, {})
        if fld in sect:
            raise ConfigError("line %d: duplicate key %r" % (lineno, key))
        sect[fld] = _parse_value(kind, raw, key)
    return _build(by_section)


def _build(by_section: dict) -> MissionConfig:
    cfg = default_config()
    seg = replace(cfg.pipeline.segmentation, **by_section.get("seg", {}))
    pipeline = replace(cfg.pipeline, segmentation=seg, **by_section.get("pipeline", {}))
    return MissionConfig(
        pipeline=pipeline,
        navcues=replace(cfg.navcues, **by_section.get("navcues", {})),
        camera=replace(cfg.camera, **by_section.get("camera", {})),
        vehicle=replace(cfg.vehicle, **by_section.get("vehicle", {})),
        control=replace(cfg.control, **by_section.get("control", {})),
        mission=replace(cfg.mission, **by_section.get("mission", {})),
        field=replace(cfg.field, **by_section.get("field", {})),
        geofence=replace(cfg.geofence, **by_section.get("geofence", {})),
    )


def _get(cfg: MissionConfig, sec: str, fld: str):
    if sec == "seg":
        return getattr(cfg.pipeline.segmentation, fld)
    return getattr(getattr(cfg, "pipeline" if sec == "pipeline" else sec), fld)


def serialize_config(cfg: MissionConfig) -> str:
    lines = []
    last_section = None
    for key, sec, fld, kind in _KEYS:
        section = key.split(".", 1)[0]
        if section != last_section:
            if last_section is not None:
                lines.append("")
            last_section = section
        value = _get(cfg, sec, fld)
        if kind == "corners":
            text = _format_corners(value)
        elif kind == "float":
            text = repr(float(value))
        else:
            text = str(int(value))
        lines.append("%s = %s" % (key, text))
    return "\n".join(lines) + "\n"


def load_config(path) -> MissionConfig:
    with open(path, "r", encoding="ascii") as fh:
        return parse_config_text(fh.read())
