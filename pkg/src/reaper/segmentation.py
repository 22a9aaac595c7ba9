"""Hue-wedge crop/soil segmentation.

Sunlit standing wheat, cut straw, and bare soil all crowd into a narrow
band of yellows, so a plain hue threshold cannot split them.  We first
keep only the pixels inside a tunable HSV subspace: a hue wedge
[phi1, phi2] (counterclockwise, endpoints included, allowed to wrap
through 0) intersected with the half-space a*s + b*v >= c.  Hue inside
the wedge is then remapped so the wedge spans the full 0..360 range,
which stretches the tiny crop/soil hue difference enough for an
ordinary band threshold to separate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imaging import ImageHsv, Mask


@dataclass(frozen=True)
class SegmentationParams:
    """Subspace and threshold parameters.

    phi1/phi2 bound the hue wedge in degrees ([0, 360), traversed
    counterclockwise from phi1 to phi2, so the wedge may cross 0).
    a, b, c define the brightness/saturation cut a*s + b*v >= c; with
    the defaults a = b = 1 this keeps pixels whose saturation plus
    value clears c, discarding dark and washed-out ones.  hue_low and
    hue_high bound the post-remap crop band.
    """

    phi1: float = 30.0
    phi2: float = 90.0
    a: float = 1.0
    b: float = 1.0
    c: float = 0.8
    hue_low: float = 120.0
    hue_high: float = 359.999

    def __post_init__(self):
        for name in ("phi1", "phi2"):
            val = getattr(self, name)
            if not (0.0 <= val < 360.0):
                raise ValueError(f"{name} must lie in [0, 360), got {val}")
        if self.wedge_width <= 0.0:
            raise ValueError("hue wedge width must be positive (phi1 == phi2 gives an empty wedge)")
        if self.a == 0.0 and self.b == 0.0:
            raise ValueError("cut coefficients a and b must not both be zero")
        if not (0.0 <= self.hue_low <= self.hue_high < 360.0):
            raise ValueError(
                f"threshold band must satisfy 0 <= hue_low <= hue_high < 360, "
                f"got [{self.hue_low}, {self.hue_high}]"
            )

    @property
    def wedge_width(self) -> float:
        """Angular width of the wedge in degrees, in (0, 360]."""
        return (self.phi2 - self.phi1) % 360.0


@dataclass(frozen=True)
class SegmentedImage:
    """Subspace membership mask plus remapped hue.

    remapped_hue is defined exactly on mask-true pixels and NaN
    elsewhere.
    """

    mask: Mask
    remapped_hue: np.ndarray


def _wedge_offset(h, phi1: float):
    """Degrees swept counterclockwise from phi1 to hue h (array or scalar)."""
    return np.mod(np.asarray(h, dtype=np.float64) - phi1, 360.0)


def in_subspace(h: float, s: float, v: float, params: SegmentationParams) -> bool:
    """True when hue sits on the wedge arc and (s, v) clears the cut."""
    on_arc = _wedge_offset(h, params.phi1) <= params.wedge_width
    return bool(on_arc and (params.a * s + params.b * v >= params.c))


def remap_hue(h: float, phi1: float, phi2: float) -> float:
    """Stretch hue on the wedge [phi1, phi2] onto the full circle.

    remap(h) = 360 * ((h - phi1) mod 360) / wedge_width, with the far
    endpoint wrapping to 0.  Calling this with a hue off the wedge is a
    contract violation and raises ValueError.
    """
    width = (phi2 - phi1) % 360.0
    if width <= 0.0:
        raise ValueError("degenerate wedge: phi1 == phi2")
    offset = math.fmod(h - phi1, 360.0)
    if offset < 0.0:
        offset += 360.0
    if offset > width:
        raise ValueError(f"hue {h} lies outside the wedge [{phi1}, {phi2}]")
    out = 360.0 * offset / width
    return 0.0 if out == 360.0 else out


def segment(image: ImageHsv, params: SegmentationParams) -> SegmentedImage:
    """Select the subspace and remap hue in one vectorized pass."""
    offset = _wedge_offset(image.h, params.phi1)
    width = params.wedge_width
    keep = (offset <= width) & (params.a * image.s + params.b * image.v >= params.c)

    remapped = np.full(image.h.shape, np.nan)
    stretched = 360.0 * offset / width
    stretched = np.where(stretched == 360.0, 0.0, stretched)
    remapped[keep] = stretched[keep]
    return SegmentedImage(mask=Mask(keep), remapped_hue=remapped)


def threshold_crop(seg: SegmentedImage, params: SegmentationParams) -> Mask:
    """Keep subspace pixels whose remapped hue falls in the crop band."""
    with np.errstate(invalid="ignore"):
        in_band = (seg.remapped_hue >= params.hue_low) & (seg.remapped_hue <= params.hue_high)
    return Mask(seg.mask.bits & in_band)


def morph_open(mask: Mask, radius: int) -> Mask:
    """Binary opening with a (2*radius+1)^2 square element.

    Erosion then dilation; pixels beyond the image border count as
    false for both passes.  radius 0 is the identity.
    """
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    if radius == 0:
        return mask
    size = 2 * radius + 1
    structure = np.ones((size, size), dtype=bool)
    opened = ndimage.binary_opening(mask.bits, structure=structure)
    return Mask(opened)
