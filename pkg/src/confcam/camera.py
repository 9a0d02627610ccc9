"""Conformal camera geometry.

Points of the extended image plane are ``z = x3 + i*x1`` plus a single point
at infinity.  A determinant-one matrix ``((a, b), (c, d))`` acts on them by

    z  ->  (d*z + c) / (b*z + a)

which is the slope action on column vectors ``(z1, z2)`` written out.  With
this convention plain matrix multiplication is the group law:
``apply(g1 @ g2, z) == apply(g1, apply(g2, z))``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .kernels import moebius_apply_array

TWO_PI = 2.0 * math.pi
POLE_TOL = 1e-14
DET_TOL = 1e-12


class CameraError(ValueError):
    """Raised for geometrically undefined camera operations."""


# -- extended plane ----------------------------------------------------------


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("confcam.INFINITY")


INFINITY = _Infinity()


@dataclass(frozen=True)
class Finite:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise CameraError(f"non-finite point {v!r}; use INFINITY")
        object.__setattr__(self, "value", v)


ExtendedPoint = Union[Finite, _Infinity]


def point(z) -> ExtendedPoint:
    """Coerce a complex number (or an existing point) to an ExtendedPoint."""
    if isinstance(z, Finite) or z is INFINITY:
        return z
    return Finite(complex(z))


def is_infinite(p: ExtendedPoint) -> bool:
    return p is INFINITY


# -- scene points ------------------------------------------------------------


@dataclass(frozen=True)
class SpacePoint:
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for v in (self.x1, self.x2, self.x3):
            if not math.isfinite(v):
                raise CameraError("space point components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3], dtype=float)


def project(p: SpacePoint) -> ExtendedPoint:
    """Central projection onto the image plane ``x2 = 1``."""
    if p.x1 == 0.0 and p.x2 == 0.0 and p.x3 == 0.0:
        raise CameraError("ray undefined: cannot project the origin")
    if p.x2 == 0.0:
        return INFINITY
    return Finite(complex(p.x3, p.x1) / p.x2)


SPHERE_CENTER = np.array([0.0, 1.0, 0.0])


def stereographic(s) -> ExtendedPoint:
    """Map a point of the unit sphere centred at (0, 1, 0) to the extended plane."""
    s = np.asarray(s, dtype=float)
    if s.shape != (3,):
        raise CameraError("sphere point must have three components")
    if abs(np.linalg.norm(s - SPHERE_CENTER) - 1.0) > 1e-9:
        raise CameraError(f"point {tuple(s)} is not on the unit sphere about (0,1,0)")
    if np.allclose(s, 0.0, atol=1e-12):
        return INFINITY
    return project(SpacePoint(*s))


def inverse_stereographic(p: ExtendedPoint) -> np.ndarray:
    p = point(p)
    if p is INFINITY:
        return np.zeros(3)
    z = p.value
    t = 2.0 / (1.0 + abs(z) ** 2)
    return np.array([t * z.imag, t, t * z.real])


# -- Möbius maps -------------------------------------------------------------


@dataclass(frozen=True)
class EulerAngles:
    psi: float
    phi: float
    psi_prime: float

    def __post_init__(self):
        for name in ("psi", "phi", "psi_prime"):
            object.__setattr__(self, name, float(getattr(self, name)) % TWO_PI)


@dataclass(frozen=True)
class Translation3:
    b1: float
    b2: float
    b3: float

    def __post_init__(self):
        if self.b2 == -1.0:
            raise CameraError("degenerate translation: b2 = -1")


class MoebiusMap:
    """Determinant-one complex 2x2 matrix acting on the extended image plane.

    Inputs with any nonzero determinant are rescaled by a square root of the
    determinant.  ``g`` and ``-g`` act identically; use :meth:`same_action`
    rather than ``==`` on entries to compare maps.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if det == 0 or not cmath.isfinite(det):
            raise CameraError("singular matrix cannot define a Möbius map")
        if abs(det - 1.0) > DET_TOL:
            s = cmath.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("MoebiusMap is immutable")

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return compose(self, other)

    def __neg__(self) -> "MoebiusMap":
        return MoebiusMap(-self.a, -self.b, -self.c, -self.d)

    def __call__(self, z):
        return apply(self, z)

    def __repr__(self) -> str:
        return f"MoebiusMap(a={self.a:.6g}, b={self.b:.6g}, c={self.c:.6g}, d={self.d:.6g})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return self.same_action(other)

    __hash__ = None

    def same_action(self, other: "MoebiusMap", tol: float = 1e-12) -> bool:
        """True when both maps agree (projectively) as elements of PSL(2,C)."""
        m1, m2 = self.matrix.ravel(), other.matrix.ravel()
        return bool(np.allclose(m1, m2, rtol=0.0, atol=tol) or np.allclose(m1, -m2, rtol=0.0, atol=tol))

    def is_identity(self, tol: float = 1e-12) -> bool:
        return self.same_action(MoebiusMap.identity(), tol)


def apply(g: MoebiusMap, z) -> ExtendedPoint:
    """Linear-fractional action ``z -> (d z + c) / (b z + a)``, total on the extended plane."""
    z = point(z)
    if z is INFINITY:
        if g.b == 0:
            return INFINITY
        return Finite(g.d / g.b)
    w = z.value
    den = g.b * w + g.a
    if abs(den) < POLE_TOL:
        return INFINITY
    return Finite((g.d * w + g.c) / den)


def apply_array(g: MoebiusMap, z: np.ndarray) -> np.ndarray:
    """Vectorised action on finite points; poles come back as complex infinity."""
    z = np.asarray(z, dtype=complex)
    return moebius_apply_array(g.a, g.b, g.c, g.d, z)


def compose(g1: MoebiusMap, g2: MoebiusMap) -> MoebiusMap:
    """The map ``z -> g1(g2(z))``."""
    return MoebiusMap.from_matrix(g1.matrix @ g2.matrix)


def inverse(g: MoebiusMap) -> MoebiusMap:
    return MoebiusMap(g.d, -g.b, -g.c, g.a)


def k_from_euler(e: EulerAngles) -> MoebiusMap:
    """SU(2) element for the sphere rotation with Euler angles ``e`` (+ branch)."""
    s, t = e.psi + e.psi_prime, e.psi - e.psi_prime
    ch, sh = math.cos(e.phi / 2), math.sin(e.phi / 2)
    return MoebiusMap(
        cmath.exp(0.5j * s) * ch,
        1j * cmath.exp(0.5j * t) * sh,
        1j * cmath.exp(-0.5j * t) * sh,
        cmath.exp(-0.5j * s) * ch,
    )


_EPSILON = np.array([[-1j, 0], [0, 1j]])


def h_from_translation(b: Translation3) -> MoebiusMap:
    """Image map induced by translating the image plane by ``b`` (+ branch).

    Acts as ``z -> (z + b3 + i b1) / (1 + b2)``.  For ``1 + b2 < 0`` the
    matrix is built as ``epsilon @ A @ Nbar`` from principal roots of
    ``|1 + b2|``.
    """
    s = 1.0 + b.b2
    if s == 0.0:
        raise CameraError("degenerate translation: b2 = -1")
    xi = complex(b.b3, b.b1)
    rho = math.sqrt(abs(s))
    an = np.array([[rho, 0], [xi / rho, 1 / rho]], dtype=complex)
    if s > 0:
        return MoebiusMap.from_matrix(an)
    return MoebiusMap.from_matrix(_EPSILON @ an)


# -- image transforms --------------------------------------------------------


def pixel_to_plane(shape, K: float = 1.0) -> np.ndarray:
    """Complex plane coordinates of every pixel centre of a raster of ``shape``.

    The fixation point is the picture centre; the real axis points right and
    the imaginary axis up.  ``K`` is pixels per unit length.
    """
    rows, cols = shape[:2]
    x = (np.arange(cols) + 0.5 - cols / 2.0) / K
    y = (rows / 2.0 - 0.5 - np.arange(rows)) / K
    return x[None, :] + 1j * y[:, None]


def plane_to_pixel(z: np.ndarray, shape, K: float = 1.0):
    """Fractional (row, col) raster coordinates of plane points."""
    rows, cols = shape[:2]
    col = z.real * K + cols / 2.0 - 0.5
    row = rows / 2.0 - 0.5 - z.imag * K
    return row, col


def transform_image(img: np.ndarray, g: MoebiusMap, K: float = 1.0, fill: float = 0.0) -> np.ndarray:
    """Projective image transform ``out(z) = img(g^-1 . z)`` with bilinear lookup."""
    from .kernels import bilinear_sample

    img = np.asarray(img, dtype=float)
    if g.is_identity(0.0):
        return img.copy()
    zs = apply_array(inverse(g), pixel_to_plane(img.shape, K))
    row, col = plane_to_pixel(zs, img.shape, K)
    return bilinear_sample(img, row, col, fill)


# -- geometric checks ----------------------------------------------------------


def cross_ratio(z1, z2, z3, z4):
    return (z1 - z3) * (z2 - z4) / ((z1 - z4) * (z2 - z3))


def rotation_matrix(axis: int, angle: float) -> np.ndarray:
    """Right-handed rotation about scene axis ``x1``, ``x2`` or ``x3`` (0, 1, 2)."""
    c, s = math.cos(angle), math.sin(angle)
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    r = np.eye(3)
    r[i, i] = r[j, j] = c
    r[i, j], r[j, i] = -s, s
    return r


def euler_rotation(e: EulerAngles) -> np.ndarray:
    """Sphere rotation (about its centre) whose conjugate by ``j`` is ``k_from_euler(e)``."""
    return rotation_matrix(1, -e.psi) @ rotation_matrix(2, -e.phi) @ rotation_matrix(1, -e.psi_prime)
