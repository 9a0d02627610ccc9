"""Perisaccadic remapping by the Fourier shift property, and the compression it implies."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .camera import INFINITY, point
from .grid import GridSpec
from .pft import CorticalImage, Spectrum

CSV_HEADER = ("label", "true_r", "true_theta", "perc_r", "perc_theta", "dr", "dtheta", "ratio")
DEFAULT_WINDOWS = {"presaccadic": 50.0, "intrasaccadic": 30.0, "postsaccadic": 50.0}


class SaccadeError(ValueError):
    pass


def _check_annulus(r: float, spec: GridSpec, what: str) -> None:
    if not (spec.r_a <= r <= spec.r_b):
        raise SaccadeError(f"{what} radius {r:.6g} outside the annulus [{spec.r_a:.6g}, {spec.r_b:.6g}]")


def steps_for_target(target, spec: GridSpec) -> int:
    """Ring shift ``j = round(ln(|target| / r_a) / delta)`` bringing the target to the foveal edge."""
    p = point(target)
    if p is INFINITY:
        raise SaccadeError("saccade target must be finite")
    r = abs(p.value)
    _check_annulus(r, spec, "target")
    return int(math.floor(math.log(r / spec.r_a) / spec.delta + 0.5))


def sector_for_angle(theta: float, spec: GridSpec) -> int:
    """Index of the sector whose centre is nearest ``theta``."""
    return int(math.floor((theta - math.pi / spec.N) / spec.alpha + 0.5)) % spec.N


@dataclass(frozen=True)
class SaccadeEvent:
    target: complex
    j: int
    windows: dict = field(default_factory=lambda: dict(DEFAULT_WINDOWS))

    @classmethod
    def toward(cls, target, spec: GridSpec, **kw) -> "SaccadeEvent":
        return cls(complex(point(target).value), steps_for_target(target, spec), **kw)

    def validate(self, spec: GridSpec) -> None:
        if not 0 <= self.j <= spec.M:
            raise SaccadeError(f"ring shift {self.j} outside [0, {spec.M}]")
        _check_annulus(abs(self.target), spec, "target")

    def angular_steps(self, spec: GridSpec) -> int:
        return sector_for_angle(math.atan2(self.target.imag, self.target.real), spec)


def shift_spectrum(S: Spectrum, j: int, q: int = 0) -> Spectrum:
    """Multiply by ``e^{2 pi i (m j / M + n q / N)}``: a cyclic shift by j rings and q sectors."""
    M, N = S.grid.M, S.grid.N
    ph = np.exp(2j * np.pi * (np.outer(np.arange(M) * j % M, np.ones(N)) / M
                              + np.outer(np.ones(M), np.arange(N) * q % N) / N))
    coef = np.asarray(S.coef)
    if coef.ndim == 3:
        ph = ph[..., None]
    return Spectrum(coef * ph, S.grid)


def remap(S: Spectrum, j: int, q: int = 0, *, blank_wrapped: bool = False) -> CorticalImage:
    """Cortical image seen through a ring shift of ``j`` (and sector shift ``q``).

    Output ring ``k`` holds input ring ``(k + j) mod M``: content from radius
    ``e^{j delta} r`` is displayed at ``r``.  Rings that wrap past the outer
    edge are zeroed when ``blank_wrapped`` is set.
    """
    grid = S.grid
    M = grid.M
    if not 0 <= j <= M:
        raise SaccadeError(f"ring shift {j} outside [0, {M}]")
    shifted = shift_spectrum(S, j, q)
    g = np.fft.ifft2(shifted.coef, axes=(0, 1))
    src = (np.arange(M) + j) % M
    amp = np.exp(-grid.u[src])
    amp = amp.reshape((-1,) + (1,) * (g.ndim - 1))
    out = g * amp
    if np.max(np.abs(out.imag), initial=0.0) <= 1e-9 * max(1.0, np.max(np.abs(out), initial=0.0)):
        out = out.real
    if blank_wrapped:
        out = out.copy()
        out[np.arange(M) + j >= M] = 0
    return CorticalImage(out, grid)


# -- flashes ---------------------------------------------------------------------


@dataclass(frozen=True)
class FlashSet:
    points: np.ndarray
    labels: tuple

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).reshape(-1)
        if len(self.labels) != pts.size:
            raise SaccadeError("one label per flash required")
        if not np.all(np.isfinite(pts)) or np.any(pts == 0):
            raise SaccadeError("flashes must be finite and nonzero")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    def __len__(self) -> int:
        return self.points.size

    @classmethod
    def ring(cls, center, radius: float, count: int = 24, prefix: str = "f") -> "FlashSet":
        ang = 2 * np.pi * np.arange(count) / count
        pts = complex(center) + radius * np.exp(1j * ang)
        return cls(pts, tuple(f"{prefix}{i}" for i in range(count)))

    @classmethod
    def from_csv(cls, text: str) -> "FlashSet":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(
            np.array([complex(float(r["x"]), float(r["y"])) for r in rows], dtype=complex),
            tuple(r["label"] for r in rows),
        )


@dataclass(frozen=True)
class Perceived:
    flashes: FlashSet
    true: FlashSet
    excluded: tuple


def perceived_positions(flashes: FlashSet, j: int, spec: GridSpec, q: int = 0) -> Perceived:
    """Where each flash is seen after the ring shift: radius ``r e^{-j delta}``.

    ``q`` adds the angular part of a target-centred remap (angle ``- q alpha``).
    Flashes outside the annulus are excluded and reported.
    """
    r = np.abs(flashes.points)
    inside = (r >= spec.r_a) & (r <= spec.r_b)
    excluded = tuple(lbl for lbl, ok in zip(flashes.labels, inside) if not ok)
    kept = flashes.points[inside]
    labels = tuple(lbl for lbl, ok in zip(flashes.labels, inside) if ok)
    # scale and rotate in place so j = q = 0 leaves every point bit-for-bit unchanged
    moved = kept * math.exp(-j * spec.delta) * complex(math.cos(q * spec.alpha), -math.sin(q * spec.alpha))
    return Perceived(FlashSet(moved, labels), FlashSet(kept, labels), excluded)


def mislocalization_report(flashes: FlashSet, event: SaccadeEvent, spec: GridSpec,
                           mode: str = "radial") -> list[dict]:
    """Per-flash rows of true vs perceived polar position and the compression ratio."""
    event.validate(spec)
    if mode == "radial":
        q = 0
    elif mode == "retarget":
        q = event.angular_steps(spec)
    else:
        raise SaccadeError("mode must be 'radial' or 'retarget'")
    res = perceived_positions(flashes, event.j, spec, q)
    ratio = math.exp(-event.j * spec.delta)
    rows = []
    for lbl, t, p in zip(res.true.labels, res.true.points, res.flashes.points):
        tr, tt = abs(t), math.atan2(t.imag, t.real)
        pr, pt = abs(p), math.atan2(p.imag, p.real)
        dtheta = (pt - tt + math.pi) % (2 * math.pi) - math.pi
        rows.append({
            "label": lbl, "true_r": tr, "true_theta": tt, "perc_r": pr, "perc_theta": pt,
            "dr": pr - tr, "dtheta": dtheta, "ratio": ratio,
        })
    return rows


def report_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r["label"]] + [format(r[k], ".17g") for k in CSV_HEADER[1:]])
    return buf.getvalue()
