"""Frame-level vision chain: color subspace -> crop band -> opening ->
vertical-texture filter.

Stage outputs keep the working names used throughout the project:
``sy`` is the color-subspace membership mask, ``tsy`` the crop-band
threshold of the stretched hue, and ``vtsy`` the vertical-texture
survivor mask (rasterized long near-vertical runs).  Each call times
the stages individually with perf_counter so the real-time budget can
be checked per stage rather than end to end.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .imaging import ImageRgb, Mask, rgb_to_hsv
from .segmentation import SegmentationParams, morph_open, segment, threshold_crop
from .texture import (
    LineSegment,
    TextureParams,
    detect_vertical_lines,
    filter_short_lines,
    lines_to_mask,
)


@dataclass(frozen=True)
class PipelineParams:
    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    open_radius: int = 1
    tilt_max_deg: float = 5.0
    tilt_step_deg: float = 1.0
    min_length_fraction: float = 0.35
    max_gap: int = 1

    def __post_init__(self):
        if self.open_radius < 0:
            raise ValueError("open_radius must be >= 0")
        if not (0.0 < self.min_length_fraction <= 1.0):
            raise ValueError("min_length_fraction must be in (0, 1]")

    def texture_for_height(self, height: int) -> TextureParams:
        """Resolve the fractional run-length floor for a given frame size."""
        return TextureParams(
            tilt_max_deg=self.tilt_max_deg,
            tilt_step_deg=self.tilt_step_deg,
            min_length=max(1, round(self.min_length_fraction * height)),
            max_gap=self.max_gap,
        )


@dataclass
class FrameAnalysis:
    sy: Mask
    tsy: Mask
    opened: Mask
    lines: list[LineSegment]
    vtsy: Mask
    timings_ms: dict[str, float]


def analyze_frame(image: ImageRgb, params: PipelineParams) -> FrameAnalysis:
    """Run the full per-frame chain on an RGB image."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    hsv = rgb_to_hsv(image)
    t1 = time.perf_counter()
    timings["hsv"] = (t1 - t0) * 1e3

    seg = segment(hsv, params.segmentation)
    t2 = time.perf_counter()
    timings["segment"] = (t2 - t1) * 1e3

    tsy = threshold_crop(seg, params.segmentation)
    t3 = time.perf_counter()
    timings["threshold"] = (t3 - t2) * 1e3

    opened = morph_open(tsy, params.open_radius)
    t4 = time.perf_counter()
    timings["open"] = (t4 - t3) * 1e3

    height, width = image.pixels.shape[:2]
    tex = params.texture_for_height(height)
    lines = detect_vertical_lines(opened, tex)
    lines = filter_short_lines(lines, tex)
    t5 = time.perf_counter()
    timings["lines"] = (t5 - t4) * 1e3

    vtsy = lines_to_mask(lines, height, width)
    t6 = time.perf_counter()
    timings["rasterize"] = (t6 - t5) * 1e3
    timings["total"] = (t6 - t0) * 1e3

    return FrameAnalysis(
        sy=seg.mask,
        tsy=tsy,
        opened=opened,
        lines=lines,
        vtsy=vtsy,
        timings_ms=timings,
    )
