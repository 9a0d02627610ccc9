"""Two laterally displaced conformal cameras viewing a scene of planar rectangles.

Scene axes: ``x1`` up, ``x2`` along the head's straight-ahead direction,
``x3`` to the right; each eye images onto its own plane ``x2 = 1`` with
``z = x3 + i x1``.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .camera import (EulerAngles, MoebiusMap, Translation3, euler_rotation, h_from_translation,
                     k_from_euler, pixel_to_plane)
from .grid import GridSpec, RetinalSamples, sample_image
from .pft import CorticalImage, Spectrum, dpft_forward, dpft_inverse
from .retinotopy import RetinotopicCanvas, assemble, split_hemispheres


class SceneError(ValueError):
    pass


@dataclass(frozen=True)
class Rectangle:
    """Planar rectangle with corners in cyclic order, flat color or a texture.

    Texture rows run from corner 0 towards corner 3, columns from corner 0
    towards corner 1.
    """

    corners: np.ndarray
    color: tuple = (1.0, 1.0, 1.0)
    texture: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.corners, dtype=float)
        if c.shape != (4, 3):
            raise SceneError("a rectangle needs four 3-D corners")
        normal = np.cross(c[1] - c[0], c[3] - c[0])
        if np.linalg.norm(normal) == 0:
            raise SceneError("degenerate rectangle")
        n = normal / np.linalg.norm(normal)
        if abs(np.dot(c[2] - c[0], n)) > 1e-9:
            raise SceneError("rectangle corners are not coplanar")
        object.__setattr__(self, "corners", c)
        object.__setattr__(self, "color", tuple(float(x) for x in self.color))

    @property
    def normal(self) -> np.ndarray:
        c = self.corners
        n = np.cross(c[1] - c[0], c[3] - c[0])
        return n / np.linalg.norm(n)


@dataclass(frozen=True)
class Scene:
    rectangles: tuple
    background: tuple = (0.0, 0.0, 0.0)

    @classmethod
    def from_json(cls, text: str) -> "Scene":
        """Parse ``{"rectangles": [{"corners": [[x1,x2,x3] x4], "color": [r,g,b]}], "background": [r,g,b]}``."""
        data = json.loads(text)
        try:
            rects = tuple(Rectangle(np.array(r["corners"], dtype=float), tuple(r.get("color", (1, 1, 1))))
                          for r in data["rectangles"])
        except (KeyError, TypeError) as exc:
            raise SceneError(f"malformed scene description: {exc}") from None
        return cls(rects, tuple(data.get("background", (0.0, 0.0, 0.0))))

    def to_json(self) -> str:
        return json.dumps({
            "rectangles": [{"corners": r.corners.tolist(), "color": list(r.color)} for r in self.rectangles],
            "background": list(self.background),
        }, indent=2)


def demo_scene(depth: float = 100.0) -> Scene:
    """Gray square with a red bar in front of it, centred on the straight-ahead axis."""
    def rect(half_w, half_h, d, color):
        return Rectangle(np.array([
            [half_h, d, -half_w], [half_h, d, half_w], [-half_h, d, half_w], [-half_h, d, -half_w],
        ]), color)

    return Scene((
        rect(20.0, 20.0, depth + 10.0, (0.5, 0.5, 0.5)),
        rect(3.0, 26.0, depth - 10.0, (0.9, 0.1, 0.1)),
    ))


@dataclass(frozen=True)
class EyePose:
    """Eye displaced by ``offset`` along ``x3`` with gaze rotation ``fixation``."""

    offset: float
    fixation: EulerAngles = field(default_factory=lambda: EulerAngles(0.0, 0.0, 0.0))

    @classmethod
    def converged(cls, offset: float, depth: float) -> "EyePose":
        """Eye at ``offset`` turned about ``x1`` to fixate the point (0, depth, 0)."""
        beta = math.atan2(-offset, depth)
        return cls(offset, EulerAngles(math.pi / 2, beta, -math.pi / 2))

    @property
    def position(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.offset])

    @property
    def rotation(self) -> np.ndarray:
        """Eye-to-scene rotation matrix."""
        return euler_rotation(self.fixation)

    def image_map(self) -> MoebiusMap:
        """Möbius part of the pose for objects in the unit-depth plane: k after h."""
        return k_from_euler(self.fixation) @ h_from_translation(Translation3(0.0, 0.0, -self.offset))


def _eye_coords(eye: EyePose, p: np.ndarray) -> np.ndarray:
    return (p - eye.position) @ eye.rotation


def project_scene(scene: Scene, eye: EyePose, shape=(256, 256), K: float = 800.0) -> np.ndarray:
    """RGB raster of the scene on ``eye``'s image plane (``K`` pixels per unit).

    Each pixel's ray is intersected with every rectangle; rectangles are
    painted in input order so later ones cover earlier ones.
    """
    for i, r in enumerate(scene.rectangles):
        if np.any(_eye_coords(eye, r.corners)[:, 1] <= 0):
            raise SceneError(f"rectangle {i} is behind camera (crosses the x2 = 0 plane)")
    z = pixel_to_plane(shape, K)
    d_eye = np.stack([z.imag, np.ones_like(z.real), z.real], axis=-1)
    d = d_eye @ eye.rotation.T
    out = np.empty(tuple(shape[:2]) + (3,))
    out[...] = np.asarray(scene.background, dtype=float)
    o = eye.position
    for r in scene.rectangles:
        c0, e1, e3 = r.corners[0], r.corners[1] - r.corners[0], r.corners[3] - r.corners[0]
        n = r.normal
        den = d @ n
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(den != 0, ((c0 - o) @ n) / den, -1.0)
        q = o + t[..., None] * d - c0
        g = np.array([[e1 @ e1, e1 @ e3], [e1 @ e3, e3 @ e3]])
        rhs = np.stack([q @ e1, q @ e3], axis=-1)
        st = rhs @ np.linalg.inv(g).T
        s, v = st[..., 0], st[..., 1]
        hit = (t > 0) & (s >= 0) & (s <= 1) & (v >= 0) & (v <= 1)
        if r.texture is not None:
            tex = np.asarray(r.texture, dtype=float)
            th, tw = tex.shape[:2]
            ri = np.clip((v * th).astype(int), 0, th - 1)
            ci = np.clip((s * tw).astype(int), 0, tw - 1)
            col = tex[ri, ci]
            if col.ndim == 2:
                col = np.repeat(col[..., None], 3, axis=-1)
            out[hit] = col[hit]
        else:
            out[hit] = r.color
    return out


def disparity(point3, left: EyePose, right: EyePose) -> complex:
    """Image-position difference (left minus right) of a scene point."""
    zl = _eye_coords(left, np.asarray(point3, dtype=float))
    zr = _eye_coords(right, np.asarray(point3, dtype=float))
    return complex(zl[2], zl[0]) / zl[1] - complex(zr[2], zr[0]) / zr[1]


def vieth_muller_circle(left: EyePose, right: EyePose, depth: float) -> tuple[complex, float]:
    """Circle (in the horizontal ``x2, x3`` plane) through both eyes and the fixation point.

    Returned as centre ``x3 + i x2`` and radius.
    """
    pts = [complex(left.offset, 0.0), complex(right.offset, 0.0), complex(0.0, depth)]
    (ax, ay), (bx, by), (cx, cy) = [(p.real, p.imag) for p in pts]
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        raise SceneError("eyes and fixation point are collinear")
    ux = ((ax ** 2 + ay ** 2) * (by - cy) + (bx ** 2 + by ** 2) * (cy - ay) + (cx ** 2 + cy ** 2) * (ay - by)) / d
    uy = ((ax ** 2 + ay ** 2) * (cx - bx) + (bx ** 2 + by ** 2) * (ax - cx) + (cx ** 2 + cy ** 2) * (bx - ax)) / d
    centre = complex(ux, uy)
    return centre, abs(pts[0] - centre)


@dataclass(frozen=True)
class EyeResult:
    raster: np.ndarray
    samples: RetinalSamples
    spectrum: Spectrum
    cortical: CorticalImage
    canvas: RetinotopicCanvas


def run_eye(scene: Scene, eye: EyePose, spec: GridSpec, shape=(256, 256), K: float = 800.0,
            layout: str = "mirrored", split: bool = True, fill: float = 0.0) -> EyeResult:
    raster = project_scene(scene, eye, shape, K)
    samples = sample_image(raster, spec, split=split, K=K, fill=fill)
    spectrum = dpft_forward(samples)
    cortical = dpft_inverse(spectrum)
    left, right = split_hemispheres(cortical)
    canvas = assemble(left, right, layout)
    return EyeResult(raster, samples, spectrum, cortical, canvas)


def binocular_pipeline(scene: Scene, poses: tuple, spec: GridSpec, *, shape=(256, 256),
                       K: float = 800.0, layout: str = "mirrored", split: bool = True,
                       fill: float = 0.0, threads: int = 1) -> dict:
    """Run projection, sampling, DPFT, inverse DPFT and assembly for ``(left, right)`` poses."""
    names = ("left", "right")
    if threads > 1:
        with ThreadPoolExecutor(2) as ex:
            futs = [ex.submit(run_eye, scene, p, spec, shape, K, layout, split, fill) for p in poses]
            res = [f.result() for f in futs]
    else:
        res = [run_eye(scene, p, spec, shape, K, layout, split, fill) for p in poses]
    return dict(zip(names, res))
