"""Image containers and binary PPM/PGM I/O.

Cameras on the field units deliver raw binary PPM (P6) frames; binary
masks go back out as PGM (P5) so stages can be inspected with any
netpbm-aware viewer.  Headers are written with single whitespace
separators and no comments.  Only maxval 255 is supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PnmError(ValueError):
    """Raised for malformed PPM/PGM content (bad magic, header, size, or maxval)."""


@dataclass(frozen=True)
class ImageRgb:
    """8-bit RGB raster, shape (height, width, 3), dtype uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3:
            raise ValueError(f"ImageRgb expects (h, w, 3) pixels, got shape {p.shape}")
        if p.dtype != np.uint8:
            raise ValueError(f"ImageRgb expects uint8 pixels, got {p.dtype}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("image dimensions must be at least 1x1")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class ImageHsv:
    """Hue/saturation/value planes of one frame.

    h is in real degrees in [0, 360), s and v in [0, 1].  Achromatic
    pixels (s == 0) carry the canonical hue 0.
    """

    h: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if not (self.h.shape == self.s.shape == self.v.shape):
            raise ValueError("h, s, v planes must share one shape")
        if self.h.ndim != 2:
            raise ValueError("hsv planes must be 2-d")

    @property
    def height(self) -> int:
        return self.h.shape[0]

    @property
    def width(self) -> int:
        return self.h.shape[1]


@dataclass(frozen=True)
class Mask:
    """Boolean raster, shape (height, width)."""

    bits: np.ndarray

    def __post_init__(self):
        if self.bits.ndim != 2:
            raise ValueError(f"Mask expects a 2-d array, got shape {self.bits.shape}")
        if self.bits.dtype != np.bool_:
            raise ValueError(f"Mask expects bool, got {self.bits.dtype}")
        if self.bits.shape[0] < 1 or self.bits.shape[1] < 1:
            raise ValueError("mask dimensions must be at least 1x1")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())


def _read_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    """Return the next whitespace-delimited header token and the new offset.

    '#' starts a comment running to end of line, as allowed by the netpbm
    grammar on input (we never emit comments ourselves).
    """
    n = len(buf)
    while pos < n:
        c = buf[pos:pos + 1]
        if c == b"#":
            while pos < n and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= n:
        raise PnmError("malformed header: truncated before all fields were read")
    start = pos
    while pos < n and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
        pos += 1
    return buf[start:pos], pos


def _parse_header(buf: bytes, magic: bytes) -> tuple[int, int, int]:
    tok, pos = _read_token(buf, 0)
    if tok != magic:
        raise PnmError(f"not a {magic.decode()} file (magic was {tok[:8]!r})")
    fields = []
    for _ in range(3):
        tok, pos = _read_token(buf, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise PnmError(f"malformed header: non-integer field {tok[:16]!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmError(f"malformed header: bad dimensions {width}x{height}")
    if maxval != 255:
        raise PnmError(f"unsupported maxval {maxval} (only 255 is handled)")
    # Exactly one whitespace byte separates the header from the raster.
    if pos >= len(buf) or not buf[pos:pos + 1].isspace():
        raise PnmError("malformed header: missing whitespace before pixel data")
    return width, height, pos + 1


def load_ppm(path: str | Path) -> ImageRgb:
    """Load a binary P6 PPM frame.

    Raises FileNotFoundError for a missing file and PnmError (with a
    message naming the condition) for bad magic, malformed header,
    maxval other than 255, or truncated pixel data.
    """
    buf = Path(path).read_bytes()
    width, height, data_at = _parse_header(buf, b"P6")
    need = width * height * 3
    data = buf[data_at:data_at + need]
    if len(data) < need:
        raise PnmError(f"truncated pixel data: expected {need} bytes, found {len(data)}")
    pixels = np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3)
    return ImageRgb(pixels.copy())


def save_ppm(image: ImageRgb, path: str | Path) -> None:
    """Write a binary P6 PPM with maxval 255."""
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.pixels.tobytes())


def save_pgm(mask: Mask, path: str | Path) -> None:
    """Write a binary P5 PGM; true pixels map to 255, false to 0."""
    header = f"P5\n{mask.width} {mask.height}\n255\n".encode("ascii")
    raster = np.where(mask.bits, np.uint8(255), np.uint8(0))
    Path(path).write_bytes(header + raster.tobytes())


def rgb_to_hsv(image: ImageRgb) -> ImageHsv:
    """Convert an RGB frame to hue (degrees), saturation, and value planes.

    Uses the hexcone model: v = max/255, s = (max - min)/max (0 where
    v = 0), and hue from the sector formula, wrapped into [0, 360).
    Grey pixels get hue 0.
    """
    rgb = image.pixels.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn

    v = mx / 255.0
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)

    chroma = np.where(delta > 0, delta, 1.0)  # guard divisions on grey pixels
    h = np.zeros_like(mx)
    is_r = (mx == r) & (delta > 0)
    is_g = (mx == g) & (delta > 0) & ~is_r
    is_b = (mx == b) & (delta > 0) & ~is_r & ~is_g
    h = np.where(is_r, 60.0 * ((g - b) / chroma), h)
    h = np.where(is_g, 60.0 * ((b - r) / chroma) + 120.0, h)
    h = np.where(is_b, 60.0 * ((r - g) / chroma) + 240.0, h)
    h = np.mod(h, 360.0)
    return ImageHsv(h=h, s=s, v=v)
