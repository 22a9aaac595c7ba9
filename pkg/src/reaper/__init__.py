"""Vision-guided navigation for a small autonomous reaper.

The stack segments standing crop from soil and residue in HSV space,
extracts steering cues from the cut/uncut crop edge, fences the vehicle
with a GPS boundary, and closes the loop in a synthetic field simulator.
"""

__version__ = "0.1.0"

from .imaging import ImageRgb, ImageHsv, Mask, PnmError, load_ppm, save_ppm, save_pgm, rgb_to_hsv
from .segmentation import (
    SegmentationParams,
    SegmentedImage,
    in_subspace,
    remap_hue,
    segment,
    threshold_crop,
    morph_open,
)
from .texture import LineSegment, TextureParams, detect_vertical_lines, filter_short_lines, lines_to_mask
from .navcues import (
    NavCueState,
    FrameCues,
    crop_height_line,
    outer_edge,
    initialize_references,
    end_of_field,
    steering_deviation,
    extract_cues,
)
from .geofence import FieldBoundary, GpsModel, GeofenceError, boundary_from_corners, inset, contains, gps_fix
from .pipeline import PipelineParams, FrameAnalysis, analyze_frame

__all__ = [
    "PipelineParams",
    "FrameAnalysis",
    "analyze_frame",
    "ImageRgb",
    "ImageHsv",
    "Mask",
    "PnmError",
    "load_ppm",
    "save_ppm",
    "save_pgm",
    "rgb_to_hsv",
    "SegmentationParams",
    "SegmentedImage",
    "in_subspace",
    "remap_hue",
    "segment",
    "threshold_crop",
    "morph_open",
    "LineSegment",
    "TextureParams",
    "detect_vertical_lines",
    "filter_short_lines",
    "lines_to_mask",
    "NavCueState",
    "FrameCues",
    "crop_height_line",
    "outer_edge",
    "initialize_references",
    "end_of_field",
    "steering_deviation",
    "extract_cues",
    "FieldBoundary",
    "GpsModel",
    "GeofenceError",
    "boundary_from_corners",
    "inset",
    "contains",
    "gps_fix",
]
