"""Exp-polar retinal sampling grid and image sampling onto it.

Rings have inner radii ``r_k = r_a * exp(k * delta)``, sectors start at
``theta_l = 2*pi*l / N``.  Samples are taken at the cell centres
``(r_k * (1 + (e^delta - 1)/2), theta_l + pi/N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .kernels import bilinear_sample
from .camera import plane_to_pixel

RB_MODES = ("half-min-side", "half-diagonal")


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class ImageGeometry:
    """Raster of ``A x B`` pixels (width x height) shown at ``K`` dots per unit length."""

    A: int
    B: int
    K: float

    def __post_init__(self):
        if self.A < 2 or self.B < 2:
            raise GridError("image must be at least 2x2 pixels")
        if not self.K > 0:
            raise GridError("K must be positive")

    @property
    def size(self) -> tuple[float, float]:
        return self.A / self.K, self.B / self.K

    def outer_radius(self, mode: str) -> float:
        if mode == "half-min-side":
            return min(self.A, self.B) / (2.0 * self.K)
        if mode == "half-diagonal":
            return math.hypot(self.A, self.B) / (2.0 * self.K)
        raise GridError(f"unknown r_b mode {mode!r}; expected one of {RB_MODES}")


@dataclass(frozen=True)
class GridSpec:
    M: int
    N: int
    r_a: float
    r_b: float
    delta: float

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise GridError("M and N must be positive")
        if not (self.r_a > 0 and self.delta > 0 and self.r_b > 0):
            raise GridError("r_a, r_b and delta must be positive")

    @property
    def alpha(self) -> float:
        return 2.0 * math.pi / self.N

    @property
    def T(self) -> float:
        return self.M * self.delta

    @property
    def weight(self) -> float:
        """Riemann-sum weight ``2 pi T / (M N)`` carried by every sample."""
        return 2.0 * math.pi * self.T / (self.M * self.N)

    @property
    def u(self) -> np.ndarray:
        """Log radii ``u_k = ln r_a + k delta`` of the ring boundaries."""
        return math.log(self.r_a) + self.delta * np.arange(self.M)

    @property
    def theta(self) -> np.ndarray:
        return self.alpha * np.arange(self.N)

    @property
    def ring_radii(self) -> np.ndarray:
        return self.r_a * np.exp(self.delta * np.arange(self.M + 1))

    @property
    def ring_widths(self) -> np.ndarray:
        return self.ring_radii[:-1] * math.expm1(self.delta)

    @property
    def center_factor(self) -> float:
        return 1.0 + math.expm1(self.delta) / 2.0

    @property
    def center_radii(self) -> np.ndarray:
        return self.ring_radii[:-1] * self.center_factor

    @property
    def center_angles(self) -> np.ndarray:
        return self.theta + math.pi / self.N

    @property
    def peripheral_count(self) -> int:
        return self.M * self.N

    # -- text serialisation --------------------------------------------------

    def to_text(self) -> str:
        """key=value block; floats carry 17 significant digits so they round-trip."""
        return (
            f"M={self.M}\nN={self.N}\nr_a={self.r_a:.17g}\n"
            f"r_b={self.r_b:.17g}\ndelta={self.delta:.17g}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "GridSpec":
        vals = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            vals[key.strip()] = value.strip()
        try:
            return cls(
                M=int(vals["M"]),
                N=int(vals["N"]),
                r_a=float(vals["r_a"]),
                r_b=float(vals["r_b"]),
                delta=float(vals["delta"]),
            )
        except KeyError as exc:
            raise GridError(f"grid spec missing key {exc.args[0]}") from None


@dataclass(frozen=True)
class DerivedGrid:
    spec: GridSpec
    r0: float
    N_f: float
    K: float

    @property
    def total_count(self) -> float:
        return self.spec.peripheral_count + self.N_f


def derive_grid(geom: ImageGeometry, N_f: float, r_b_mode: str = "half-diagonal",
                r_b: float | None = None) -> DerivedGrid:
    """Grid from picture geometry and the number of foveal pixels.

    ``r_b`` overrides the mode-derived outer radius when given.
    """
    if not N_f >= 1:
        raise GridError("N_f must be at least 1")
    if r_b is not None and not r_b > 0:
        raise GridError("r_b must be positive")
    K = geom.K
    r0 = math.sqrt(N_f / (math.pi * K * K))
    N = int(math.floor(2.0 * math.pi * r0 * K + math.pi + 0.5))
    delta = math.log1p(1.0 / (r0 * K))
    rb = geom.outer_radius(r_b_mode) if r_b is None else float(r_b)
    if rb <= r0:
        raise GridError(f"outer radius {rb:.6g} does not exceed foveal radius {r0:.6g}")
    M = max(1, int(math.floor(math.log(rb / r0) / delta + 0.5)))
    return DerivedGrid(GridSpec(M=M, N=N, r_a=r0, r_b=rb, delta=delta), r0, N_f, K)


def grid_points(spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Polar coordinates ``(radius, angle)`` of all sample centres, each (M, N)."""
    r = np.repeat(spec.center_radii[:, None], spec.N, axis=1)
    th = np.repeat(spec.center_angles[None, :], spec.M, axis=0)
    return r, th


def grid_points_complex(spec: GridSpec) -> np.ndarray:
    r, th = grid_points(spec)
    return r * np.exp(1j * th)


# -- hemifields ----------------------------------------------------------------


def hemifield_of_sectors(spec: GridSpec) -> np.ndarray:
    """'right' for sectors whose centre has cos(theta) > 0, else 'left'."""
    c = np.cos(spec.center_angles)
    return np.where(c > 0, "right", "left")


def meridian_sectors(spec: GridSpec) -> np.ndarray:
    """Boolean mask of the sectors nearest the vertical meridian on either side.

    For each crossing of theta = pi/2 and theta = 3 pi/2 the sector on each
    side of the line is marked (a sector containing the line counts for both).
    """
    mask = np.zeros(spec.N, dtype=bool)
    lo = spec.theta
    hi = spec.theta + spec.alpha
    for line in (math.pi / 2, 3 * math.pi / 2):
        containing = (lo < line) & (hi > line)
        if containing.any():
            mask |= containing
            continue
        below = int(np.argmin(np.abs(hi - line)))
        mask[below] = True
        mask[(below + 1) % spec.N] = True
    return mask


# -- samples -------------------------------------------------------------------


@dataclass(frozen=True)
class RetinalSamples:
    """Weighted samples ``f_{k,l} = (2 pi T / MN) f(z_{k,l})``.

    ``values`` is (M, N) or (M, N, C).  ``split`` records whether hemifield
    tagging was requested.
    """

    values: np.ndarray
    grid: GridSpec
    split: bool = False
    hemifield: np.ndarray = field(default=None, compare=False)
    meridian: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape[:2] != (self.grid.M, self.grid.N):
            raise GridError(f"samples of shape {v.shape[:2]} do not match grid {self.grid.M}x{self.grid.N}")
        if not np.all(np.isfinite(v)):
            raise GridError("samples must be finite")
        if self.hemifield is None:
            object.__setattr__(self, "hemifield", hemifield_of_sectors(self.grid))
        if self.meridian is None:
            object.__setattr__(self, "meridian", meridian_sectors(self.grid))

    @property
    def intensities(self) -> np.ndarray:
        """Samples with the Riemann weight removed."""
        return np.asarray(self.values) / self.grid.weight


Image = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


def sample_image(img: Image, spec: GridSpec, split: bool = False, K: float = 1.0,
                 fill: float | None = None) -> RetinalSamples:
    """Sample an image at the grid centres and apply the Riemann weight.

    ``img`` is either a raster (H, W) or (H, W, C) whose centre is the fixation
    point, shown at ``K`` pixels per unit length, or a callable taking complex
    plane points and returning intensities.  If the grid leaves the raster and
    no ``fill`` is given a :class:`GridError` lists the clipped rings.
    """
    z = grid_points_complex(spec)
    if callable(img):
        vals = np.asarray(img(z), dtype=float)
    else:
        img = np.asarray(img, dtype=float)
        row, col = plane_to_pixel(z, img.shape, K)
        h, w = img.shape[:2]
        outside = (row < -0.5) | (row > h - 0.5) | (col < -0.5) | (col > w - 0.5)
        if fill is None and outside.any():
            rings = np.flatnonzero(outside.any(axis=1)).tolist()
            raise GridError(f"grid extends beyond the image; clipped rings: {rings}")
        vals = bilinear_sample(img, row, col, 0.0 if fill is None else float(fill))
    return RetinalSamples(vals * spec.weight, spec, split=split)
