"""Synthetic forward-camera renderer over the cell field.

A pinhole camera is mounted ahead of the vehicle reference point,
below the top of the standing crop (that matters: it makes nearer crop
tower higher in the frame, which is exactly what the end-of-field cue
keys on).  Standing crop and stubble are rendered as solid volumes by
marching each pixel ray through the height slab and taking the first
cell hit; ground, straw, treeline, and sky fill in behind.

Everything is procedurally textured from integer hashes of world
coordinates and the field's texture seed, so a frame is a pure
function of (field, vehicle pose, camera): repeated renders are
bit-identical and there is no RNG state to leak between frames.

Each frame comes with a per-pixel label raster (crop, residue, soil,
background) used as ground truth when scoring the vision stages.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..imaging import ImageRgb
from .world import CellState, FieldState
from .vehicle import VehicleState


class RenderLabel(enum.IntEnum):
    SOIL = 0
    CROP = 1
    RESIDUE = 2
    BACKGROUND = 3


@dataclass(frozen=True)
class CameraParams:
    width: int = 320
    height: int = 240
    hfov_deg: float = 55.0
    height_m: float = 0.6
    pitch_deg: float = 8.0
    forward_m: float = 0.3
    far_m: float = 45.0
    samples: int = 40

    def __post_init__(self):
        if self.width < 8 or self.height < 8:
            raise ValueError("camera frame must be at least 8x8")
        if not (5.0 < self.hfov_deg < 160.0):
            raise ValueError("hfov_deg out of range")
        if self.height_m <= 0.0:
            raise ValueError("camera must sit above the ground")
        if not (0.0 <= self.pitch_deg < 90.0):
            raise ValueError("pitch must be a downward angle in [0, 90)")
        if self.far_m <= 1.0 or self.samples < 4:
            raise ValueError("degenerate far plane or sample count")

    @property
    def focal_px(self) -> float:
        return (self.width / 2.0) / math.tan(math.radians(self.hfov_deg) / 2.0)


_M1 = np.uint64(0x9E3779B97F4A7C15)
_M2 = np.uint64(0xBF58476D1CE4E5B9)
_M3 = np.uint64(0x94D049BB133111EB)


def _hash01(ix: np.ndarray, iy: np.ndarray, salt: int, seed: int) -> np.ndarray:
    """Deterministic [0, 1) noise from integer lattice coordinates."""
    h = ix.astype(np.int64).astype(np.uint64) * _M1
    h ^= iy.astype(np.int64).astype(np.uint64) * _M2
    h ^= np.uint64((salt * 1469598103934665603 + seed * 1099511628211) % (1 << 64))
    h ^= h >> np.uint64(30)
    h *= _M2
    h ^= h >> np.uint64(27)
    h *= _M3
    h ^= h >> np.uint64(31)
    return (h >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def _hsv_to_rgb_u8(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized hexcone inverse; h in degrees, s and v in [0, 1]."""
    hp = (np.mod(h, 360.0)) / 60.0
    i = np.floor(hp).astype(np.int64) % 6
    f = hp - np.floor(hp)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    rgb = np.stack([r, g, b], axis=-1)
    return np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)


def _cell_at(field: FieldState, wx: np.ndarray, wy: np.ndarray) -> np.ndarray:
    """Cell state per query point; OUT_OF_FIELD beyond the grid."""
    ix, iy = field.cell_index(wx, wy)
    ny, nx = field.cells.shape
    ok = (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny)
    out = np.full(wx.shape, int(CellState.OUT_OF_FIELD), dtype=np.int8)
    out[ok] = field.cells[iy[ok], ix[ok]]
    return out


def render_scene(field: FieldState, vehicle: VehicleState, camera: CameraParams):
    """Render one frame; returns (ImageRgb, labels int8 array).

    The ray march uses a quadratic near-bias so the crop face close to
    the blade is sampled at centimeter resolution while the far ground
    is sampled coarsely; ground truth labels come from the same march,
    so image and labels never disagree.
    """
    W, H = camera.width, camera.height
    f = camera.focal_px
    psi = vehicle.heading
    tau = math.radians(camera.pitch_deg)

    ox = vehicle.x + camera.forward_m * math.cos(psi)
    oy = vehicle.y + camera.forward_m * math.sin(psi)
    oz = camera.height_m

    fx = math.cos(psi) * math.cos(tau)
    fy = math.sin(psi) * math.cos(tau)
    fz = -math.sin(tau)
    rx, ry, rz = math.sin(psi), -math.cos(psi), 0.0
    dxv = -math.sin(tau) * math.cos(psi)
    dyv = -math.sin(tau) * math.sin(psi)
    dzv = -math.cos(tau)

    xs = (np.arange(W) - (W - 1) / 2.0) / f
    ys = (np.arange(H) - (H - 1) / 2.0) / f
    X = xs[None, :]
    Y = ys[:, None]
    dx = fx + X * rx + Y * dxv
    dy = fy + X * ry + Y * dyv
    dz = fz + X * rz + Y * dzv
    norm = np.sqrt(dx * dx + dy * dy + dz * dz)
    dx, dy, dz = dx / norm, dy / norm, dz / norm

    descending = dz < -1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        t_ground = np.where(descending, -oz / dz, np.inf)
    h_top = field.crop_height
    t_exit = np.where(descending, t_ground, camera.far_m)
    rising = dz > 1e-12
    if oz < h_top:
        t_top = np.where(rising, (h_top - oz) / dz, np.inf)
        t_exit = np.minimum(t_exit, np.where(rising, t_top, t_exit))
        t_enter = np.zeros_like(t_exit)
    else:
        # Camera above the canopy: rays enter the slab from the top.
        t_enter = np.where(descending, (h_top - oz) / dz, np.inf)
    t_exit = np.minimum(t_exit, camera.far_m)
    span = np.maximum(t_exit - t_enter, 0.0)

    seed = field.texture_seed
    n_px = H * W
    dxf, dyf, dzf = dx.ravel(), dy.ravel(), dz.ravel()
    te_f, tx_f = t_enter.ravel(), t_exit.ravel()
    kind_f = np.zeros(n_px, dtype=np.int8)
    t_hit = np.zeros(n_px)
    K = camera.samples

    # Crop march, restricted to rays whose slab interval overlaps the
    # bounding box of the remaining uncut cells; near-biased (u^2) so
    # the wall face by the blade is sampled at centimeter scale.
    rows, cols = np.nonzero(field.cells == CellState.UNCUT)
    if rows.size:
        cs = field.cell_size
        bx0 = field.origin[0] + cols.min() * cs
        bx1 = field.origin[0] + (cols.max() + 1) * cs
        by0 = field.origin[1] + rows.min() * cs
        by1 = field.origin[1] + (rows.max() + 1) * cs
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (bx0 - ox) / dxf
            t2 = (bx1 - ox) / dxf
            t3 = (by0 - oy) / dyf
            t4 = (by1 - oy) / dyf
        lo_x = np.where(dxf != 0.0, np.minimum(t1, t2), np.where((ox >= bx0) & (ox <= bx1), -np.inf, np.inf))
        hi_x = np.where(dxf != 0.0, np.maximum(t1, t2), np.where((ox >= bx0) & (ox <= bx1), np.inf, -np.inf))
        lo_y = np.where(dyf != 0.0, np.minimum(t3, t4), np.where((oy >= by0) & (oy <= by1), -np.inf, np.inf))
        hi_y = np.where(dyf != 0.0, np.maximum(t3, t4), np.where((oy >= by0) & (oy <= by1), np.inf, -np.inf))
        a_lo = np.maximum(te_f, np.maximum(lo_x, lo_y))
        a_hi = np.minimum(tx_f, np.minimum(hi_x, hi_y))
        cand = np.flatnonzero(a_hi > a_lo)
        if cand.size:
            c_lo = a_lo[cand]
            c_span = a_hi[cand] - c_lo
            c_dx, c_dy = dxf[cand], dyf[cand]
            alive = np.ones(cand.size, dtype=bool)
            for k in range(K):
                live = np.flatnonzero(alive)
                if live.size == 0:
                    break
                u = (k + 0.5) / K
                t = c_lo[live] + c_span[live] * (u * u)
                cell = _cell_at(field, ox + t * c_dx[live], oy + t * c_dy[live])
                got = cell == CellState.UNCUT
                if got.any():
                    won = live[got]
                    kind_f[cand[won]] = 1
                    t_hit[cand[won]] = t[got]
                    alive[won] = False

    # Stubble march: only the short tail of each ray below the stubble
    # top, sampled linearly; sparse clumps, so most rays thread through
    # to the ground between them.
    desc_f = descending.ravel()
    t_ground_f = t_ground.ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        t_res = np.where(desc_f, (field.residue_height - oz) / dzf, np.inf)
    b_lo = np.maximum(te_f, t_res)
    b_hi = np.minimum(tx_f, t_ground_f)
    cand = np.flatnonzero((kind_f == 0) & desc_f & (b_hi > b_lo))
    if cand.size:
        c_lo = b_lo[cand]
        c_step = (b_hi[cand] - c_lo) / 8.0
        c_dx, c_dy = dxf[cand], dyf[cand]
        alive = np.ones(cand.size, dtype=bool)
        for k in range(8):
            live = np.flatnonzero(alive)
            if live.size == 0:
                break
            t = c_lo[live] + c_step[live] * (k + 0.5)
            wx = ox + t * c_dx[live]
            wy = oy + t * c_dy[live]
            cell = _cell_at(field, wx, wy)
            clump = _hash01(np.floor(wx / 0.12), np.floor(wy / 0.12), 61, seed) < 0.35
            got = (cell == CellState.CUT_RESIDUE) & clump
            if got.any():
                won = live[got]
                kind_f[cand[won]] = 2
                t_hit[cand[won]] = t[got]
                alive[won] = False

    hit_kind = kind_f.reshape(H, W)
    hit = hit_kind != 0
    t2d = t_hit.reshape(H, W)
    hit_x = np.where(hit, ox + t2d * dx, 0.0)
    hit_y = np.where(hit, oy + t2d * dy, 0.0)
    hit_z = np.where(hit, oz + t2d * dz, 0.0)

    # Ground behind the volumes.
    grounded = ~hit & np.isfinite(t_ground)
    gx = np.where(grounded, ox + t_ground * dx, 0.0)
    gy = np.where(grounded, oy + t_ground * dy, 0.0)
    gcell = _cell_at(field, gx, gy)
    h_deg = np.zeros((H, W))
    s_sat = np.zeros((H, W))
    v_val = np.zeros((H, W))
    labels = np.full((H, W), int(RenderLabel.BACKGROUND), dtype=np.int8)

    # Standing crop: stalk-quantized golden yellow, never leaving the
    # crop band of the segmentation defaults.
    crop_px = hit_kind == 1
    if crop_px.any():
        qx = np.floor(hit_x[crop_px] / 0.04)
        qy = np.floor(hit_y[crop_px] / 0.04)
        u1 = _hash01(qx, qy, 11, seed)
        u2 = _hash01(qx, qy, 12, seed)
        u3 = _hash01(qx, qy, 13, seed)
        zshade = np.clip(hit_z[crop_px] / max(h_top, 1e-6), 0.0, 1.0)
        h_deg[crop_px] = 52.0 + 6.0 * u1
        s_sat[crop_px] = 0.68 + 0.17 * u2
        v_val[crop_px] = 0.55 + 0.25 * u3 + 0.15 * zshade
        labels[crop_px] = int(RenderLabel.CROP)

    # Stubble faces: same hue family, but patchy brightness.  Dull
    # patches fall below the saturation+value cut, so looking along a
    # cut lane the thresholded mask shows residue as broken speckle
    # rather than solid columns; the texture filter then removes it.
    # The key point is the height term in the hash: standing stalks
    # are vertically coherent, broken residue is not, and that
    # asymmetry is exactly what the line filter keys on.
    stub_px = hit_kind == 2
    if stub_px.any():
        qx = np.floor(hit_x[stub_px] / 0.06)
        qy = np.floor(hit_y[stub_px] / 0.06)
        qz = np.floor(hit_z[stub_px] / 0.03)
        u1 = _hash01(qx, qy, 21, seed)
        u2 = _hash01(qx + 7919.0 * qz, qy, 22, seed)
        lit = _hash01(qx + 7919.0 * qz, qy, 23, seed) < 0.45
        h_deg[stub_px] = 52.0 + 6.0 * u1
        s_sat[stub_px] = np.where(lit, 0.48 + 0.15 * u2, 0.20 + 0.08 * u2)
        v_val[stub_px] = np.where(lit, 0.50 + 0.20 * u1, 0.38 + 0.10 * u1)
        labels[stub_px] = int(RenderLabel.RESIDUE)

    # Ground. Residue cells scatter flat straw strokes (long in world x,
    # thin in y) that keep the crop hue; everything else is dull soil.
    if grounded.any():
        res_ground = grounded & (gcell == CellState.CUT_RESIDUE)
        plain = grounded & ~res_ground
        if plain.any():
            qx = np.floor(gx[plain] / 0.10)
            qy = np.floor(gy[plain] / 0.10)
            u1 = _hash01(qx, qy, 31, seed)
            u2 = _hash01(qx, qy, 32, seed)
            h_deg[plain] = 38.0 + 6.0 * u1
            s_sat[plain] = 0.26 + 0.14 * u2
            v_val[plain] = 0.45 + 0.25 * u1
            labels[plain] = int(RenderLabel.SOIL)
        if res_ground.any():
            sx = np.floor(gx[res_ground] / 0.45)
            sy = np.floor(gy[res_ground] / 0.07)
            straw = _hash01(sx, sy, 41, seed) < 0.20
            qx = np.floor(gx[res_ground] / 0.10)
            qy = np.floor(gy[res_ground] / 0.10)
            u1 = _hash01(qx, qy, 42, seed)
            u2 = _hash01(qx, qy, 43, seed)
            h_deg[res_ground] = np.where(straw, 52.0 + 5.0 * u1, 38.0 + 6.0 * u1)
            s_sat[res_ground] = np.where(straw, 0.50 + 0.12 * u2, 0.26 + 0.14 * u2)
            v_val[res_ground] = np.where(straw, 0.55 + 0.20 * u1, 0.45 + 0.25 * u1)
            lab = labels[res_ground]
            lab[:] = int(RenderLabel.SOIL)
            lab[straw] = int(RenderLabel.RESIDUE)
            labels[res_ground] = lab

    # Sky and the far treeline with an occasional pale shed; none of it
    # survives the hue wedge plus brightness cut.
    skyish = ~hit & ~grounded
    if skyish.any():
        az = np.arctan2(dy, dx)
        treeline = skyish & (dz < 0.045)
        sky = skyish & ~treeline
        if sky.any():
            lift = np.clip(dz[sky] / 0.5, 0.0, 1.0)
            h_deg[sky] = 205.0 + 10.0 * lift
            s_sat[sky] = 0.18 + 0.12 * lift
            v_val[sky] = 0.92 - 0.10 * lift
        if treeline.any():
            block = np.floor(az[treeline] * 14.0)
            zero = np.zeros_like(block)
            ub = _hash01(block, zero, 51, seed)
            u1 = _hash01(np.floor(az[treeline] * 120.0), np.floor(dz[treeline] * 300.0), 52, seed)
            shed = ub < 0.22
            h_deg[treeline] = np.where(shed, 40.0 + 20.0 * u1, 100.0 + 30.0 * u1)
            s_sat[treeline] = np.where(shed, 0.05 * u1, 0.42 + 0.18 * u1)
            v_val[treeline] = np.where(shed, 0.52 + 0.14 * u1, 0.30 + 0.14 * u1)
    rgb = _hsv_to_rgb_u8(h_deg, s_sat, v_val)
    return ImageRgb(rgb), labels
