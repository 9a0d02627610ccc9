"""Complex-log retinotopy, hemispheric split and cortical canvas assembly."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .camera import INFINITY, point
from .grid import GridSpec, meridian_sectors
from .pft import CorticalImage

SIDES = ("left", "right")
LAYOUTS = ("mirrored", "stacked")


class RetinotopyError(ValueError):
    pass


def wrap_angle(theta):
    """Reduce angles to [-pi, pi)."""
    return (np.asarray(theta) + math.pi) % (2 * math.pi) - math.pi


def log_polar(z) -> tuple[float, float]:
    """``(ln|z|, arg z)`` with the angle in [-pi, pi)."""
    p = point(z)
    if p is INFINITY:
        raise RetinotopyError("log-polar coordinates undefined at infinity")
    w = p.value
    if w == 0:
        raise RetinotopyError("log-polar coordinates undefined at 0 (remove the foveal disc)")
    th = cmath.phase(w)
    if th >= math.pi:
        th -= 2 * math.pi
    return math.log(abs(w)), th


def schwartz_map(z, a: float, side: str) -> complex:
    """Schwartz's split complex-log map ``ln(z + a) - ln a`` (left hemisphere).

    The right hemisphere gets the mirror image ``ln(a - z) - ln a``; for
    both, z = 0 maps to 0.
    """
    if not a > 0:
        raise RetinotopyError("a must be positive")
    z = complex(z)
    if side == "left":
        arg = z + a
    elif side == "right":
        arg = a - z
    else:
        raise RetinotopyError(f"side must be one of {SIDES}")
    if arg == 0:
        raise RetinotopyError("logarithm argument is zero")
    return cmath.log(arg) - math.log(a)


@dataclass(frozen=True)
class HemiCortex:
    """Cortical intensities of one brain hemisphere.

    ``side`` names the hemisphere; it holds the opposite visual hemifield.
    ``sectors`` are the grid sector indices in column order of ``values``.
    """

    side: str
    values: np.ndarray
    sectors: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        if self.side not in SIDES:
            raise RetinotopyError(f"side must be one of {SIDES}")
        if np.shape(self.values)[:2] != (self.grid.M, len(self.sectors)):
            raise RetinotopyError("hemicortex values do not match its sectors")


def right_field_sectors(grid: GridSpec) -> np.ndarray:
    return np.flatnonzero(np.cos(grid.center_angles) > 0)


def split_hemispheres(cortical: CorticalImage) -> tuple[HemiCortex, HemiCortex]:
    """(left hemisphere, right hemisphere); left receives the right visual field."""
    grid = cortical.grid
    vals = np.asarray(cortical.intensities)
    right_vf = right_field_sectors(grid)
    left_vf = np.setdiff1d(np.arange(grid.N), right_vf)
    return (
        HemiCortex("left", vals[:, right_vf], right_vf, grid),
        HemiCortex("right", vals[:, left_vf], left_vf, grid),
    )


@dataclass(frozen=True)
class RetinotopicCanvas:
    """Assembled raster plus, per pixel, the flat sample index ``k * N + l`` (-1 = empty)."""

    pixels: np.ndarray
    index: np.ndarray
    layout: str
    seams: tuple


def _row_order(h: HemiCortex, layout: str) -> np.ndarray:
    th = h.grid.center_angles[h.sectors]
    if h.side == "left":
        key = wrap_angle(th)
    elif layout == "mirrored":
        key = wrap_angle(math.pi - th)
    else:
        # continue below -pi/2 so the stacked rectangle spans one full turn
        key = wrap_angle(th) - np.where(wrap_angle(th) > -math.pi / 2, 2 * math.pi, 0.0)
    return np.argsort(-key, kind="stable")


def assemble(left: HemiCortex, right: HemiCortex, layout: str = "mirrored", *,
             drop_meridian: bool = False, fill: float = 0.0) -> RetinotopicCanvas:
    """Cut-and-paste the two hemispheric maps into one canvas.

    ``mirrored``: visual-field orientation, the left field's rings run
    leftwards from the centre column and the right field's rightwards, upper
    field at the top in both halves.  ``stacked``: one ``M``-column
    rectangle whose rows run through a full turn of angle, the right field
    block above the left field block.
    """
    if left.side != "left" or right.side != "right":
        raise RetinotopyError("expected (left, right) hemispheres")
    if left.grid != right.grid:
        raise RetinotopyError("hemispheres were sampled on different grids")
    if layout not in LAYOUTS:
        raise RetinotopyError(f"layout must be one of {LAYOUTS}")
    grid = left.grid
    M, N = grid.M, grid.N
    drop = meridian_sectors(grid) if drop_meridian else np.zeros(N, dtype=bool)

    blocks = []
    for h in (left, right):
        order = _row_order(h, layout)
        keep = ~drop[h.sectors[order]]
        order = order[keep]
        vals = np.swapaxes(np.asarray(h.values)[:, order], 0, 1)  # rows = sectors
        idx = h.sectors[order][:, None] + N * np.arange(M)[None, :]
        blocks.append((vals, idx))
    extra = np.shape(left.values)[2:]

    if layout == "stacked":
        pixels = np.concatenate([blocks[0][0], blocks[1][0]], axis=0)
        index = np.concatenate([blocks[0][1], blocks[1][1]], axis=0)
        return RetinotopicCanvas(pixels, index, layout, (("row", blocks[0][0].shape[0]),))

    rows = max(blocks[0][0].shape[0], blocks[1][0].shape[0])
    pixels = np.full((rows, 2 * M) + extra, fill, dtype=float)
    index = np.full((rows, 2 * M), -1, dtype=np.int64)
    (rv, ri), (lv, li) = blocks  # left hemisphere = right field
    pixels[: lv.shape[0], :M] = lv[:, ::-1]
    index[: li.shape[0], :M] = li[:, ::-1]
    pixels[: rv.shape[0], M:] = rv
    index[: ri.shape[0], M:] = ri
    return RetinotopicCanvas(pixels, index, layout, (("col", M),))
