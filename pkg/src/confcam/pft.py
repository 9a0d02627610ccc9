"""Discrete projective Fourier transform (DPFT) in log-polar coordinates.

Forward: ``F[m, n] = sum_{k,l} f[k, l] e^{u_k} e^{-2 pi i (mk/M + nl/N)}``, a
plain 2-D DFT of ``g = f * e^{u}`` (any M, N; NumPy's pocketfft is
mixed-radix so no padding happens).  Inverse: ``f[k, l] = e^{-u_k} IDFT(F)``.
"""
from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .camera import MoebiusMap, apply_array, inverse
from .grid import GridSpec, RetinalSamples, grid_points_complex
from .kernels import render_sum

MAGIC = b"DPFT"
VERSION = 1
RENDER_CAP = 2 ** 20


class PFTError(ValueError):
    pass


class ConvergenceError(PFTError):
    def __init__(self, message, estimates):
        super().__init__(message)
        self.estimates = estimates


@dataclass(frozen=True)
class Spectrum:
    """DPFT coefficients, (M, N) or (M, N, C) complex, ``F[m, n] ~ fhat(2 pi m / T, n)``."""

    coef: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        if np.shape(self.coef)[:2] != (self.grid.M, self.grid.N):
            raise PFTError("spectrum shape does not match grid")

    def frequencies(self) -> tuple[np.ndarray, np.ndarray]:
        """Continuous frequencies ``(s_m, k_n) = (2 pi m / T, n)``."""
        return 2 * math.pi * np.arange(self.grid.M) / self.grid.T, np.arange(self.grid.N)


@dataclass(frozen=True)
class CorticalImage:
    """Inverse-DPFT output laid out on the uniform ``(u_k, theta_l)`` grid."""

    values: np.ndarray
    grid: GridSpec

    @property
    def intensities(self) -> np.ndarray:
        return np.asarray(self.values) / self.grid.weight

    def as_samples(self, split: bool = False) -> RetinalSamples:
        return RetinalSamples(np.real_if_close(self.values, tol=1e6).real.copy(), self.grid, split=split)


def _exp_u(grid: GridSpec, ndim: int) -> np.ndarray:
    w = np.exp(grid.u)
    return w.reshape((-1,) + (1,) * (ndim - 1))


def dpft_forward(s: RetinalSamples) -> Spectrum:
    v = np.asarray(s.values)
    g = v * _exp_u(s.grid, v.ndim)
    return Spectrum(np.fft.fft2(g, axes=(0, 1)), s.grid)


def dpft_inverse(S: Spectrum) -> CorticalImage:
    g = np.fft.ifft2(S.coef, axes=(0, 1))
    out = g / _exp_u(S.grid, g.ndim)
    if np.isrealobj(S.coef) or np.max(np.abs(out.imag), initial=0.0) <= 1e-9 * max(1.0, np.max(np.abs(out), initial=0.0)):
        out = out.real
    return CorticalImage(out, S.grid)


def direct_dpft(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Forward DPFT summed directly (no FFT).

    ``einsum`` without path optimisation visits every (m, n, k, l) term, so
    this is the plain O(M^2 N^2) double sum used as the FFT's reference.
    """
    g = np.asarray(values) * _exp_u(grid, np.ndim(values))
    wm = np.exp(-2j * np.pi * np.outer(np.arange(grid.M), np.arange(grid.M)) / grid.M)
    wn = np.exp(-2j * np.pi * np.outer(np.arange(grid.N), np.arange(grid.N)) / grid.N)
    return np.einsum("mk,kl...,ln->mn...", wm, g, wn)


# -- continuous transform -----------------------------------------------------


def continuous_pft(f, s: float, k: int, r_a: float, r_b: float, *, start: int = 32,
                   rtol: float = 1e-6, max_level: int = 7) -> complex:
    """Projective Fourier transform on the annulus ``r_a <= |z| <= r_b``.

    ``f`` takes complex points.  The log-polar integrand
    ``f(e^{u + i theta}) e^{u} e^{-i(u s + theta k)}`` is integrated with the
    trapezoid rule (periodic in theta), halving the step until two successive
    estimates agree to ``rtol``.  Values that cancel to nothing are accepted
    once the change falls below ``1e-12`` of the integral of ``|f| e^u``.
    """
    ua, ub = math.log(r_a), math.log(r_b)

    def estimate(n: int) -> tuple[complex, float]:
        u = np.linspace(ua, ub, n + 1)
        th = np.arange(n) * (2 * math.pi / n)
        U, TH = np.meshgrid(u, th, indexing="ij")
        vals = np.asarray(f(np.exp(U + 1j * TH)), dtype=complex)
        wu = np.full(n + 1, (ub - ua) / n)
        wu[[0, -1]] *= 0.5
        weighted = wu[:, None] * vals * np.exp(U) * (2 * math.pi / n)
        value = np.sum(weighted * np.exp(-1j * (U * s + TH * k)))
        return complex(value), float(np.sum(np.abs(weighted)))

    n = start
    prev, _ = estimate(n)
    for _ in range(max_level):
        n *= 2
        cur, mass = estimate(n)
        scale = max(abs(cur), abs(prev))
        if abs(cur - prev) <= max(rtol * scale, 1e-12 * mass) or scale == 0.0:
            return cur
        prev = cur
    raise ConvergenceError(f"quadrature did not converge to rtol={rtol}", (prev, cur))


# -- projectively adapted rendering -------------------------------------------


@dataclass(frozen=True)
class RenderResult:
    samples: RetinalSamples
    invalid: np.ndarray
    extrapolated: np.ndarray
    max_imag: float


def _signed(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetric frequency list and the index each entry draws from.

    An even-length Nyquist term is split in half between +n/2 and -n/2 so
    real data give real interpolants.
    """
    idx = np.arange(n)
    freq = np.where(idx > n // 2, idx - n, idx).astype(float)
    scale = np.ones(n)
    if n % 2 == 0 and n > 1:
        idx = np.append(idx, n // 2)
        freq = np.append(freq, -n / 2)
        scale = np.append(scale, 0.5)
        scale[n // 2] = 0.5
    return idx, freq, scale


def projective_render(S: Spectrum, g: MoebiusMap, *, frequencies: str = "centered",
                      cap: int = RENDER_CAP, threads: int = 1) -> RenderResult:
    """Samples of the image transformed by ``g``, evaluated from its spectrum.

    Every grid node ``z`` is pulled back to ``z' = g^-1 . z`` and the inverse
    DPFT series is summed there directly (O(M^2 N^2) in total).  The series is
    anchored at the first sample node, so at unmoved nodes it reproduces
    :func:`dpft_inverse` exactly.  ``frequencies="literal"`` sums
    ``m = 0..M-1, n = 0..N-1`` as written; the default uses the equivalent
    symmetric set, which agrees on the grid and interpolates smoothly off it.
    """
    grid = S.grid
    M, N = grid.M, grid.N
    if M * N > cap:
        raise PFTError(f"render over {M * N} nodes exceeds the node cap {cap}")
    z = grid_points_complex(grid)
    zp = apply_array(inverse(g), z)
    invalid = ~np.isfinite(zp) | (np.abs(zp) == 0)
    zs = np.where(invalid, 1.0, zp)
    up = np.log(np.abs(zs))
    thp = np.angle(zs)
    lo, hi = math.log(grid.r_a) - grid.T, math.log(grid.r_b) + grid.T
    extrapolated = ~invalid & ((up < lo) | (up > hi))

    u0 = math.log(grid.center_radii[0])
    th0 = grid.center_angles[0]
    du = (up - u0).ravel()
    dth = (thp - th0).ravel()

    if frequencies == "literal":
        im, fm, sm = np.arange(M), np.arange(M, dtype=float), np.ones(M)
        jn, fn, sn = np.arange(N), np.arange(N, dtype=float), np.ones(N)
    elif frequencies == "centered":
        im, fm, sm = _signed(M)
        jn, fn, sn = _signed(N)
    else:
        raise PFTError(f"unknown frequency set {frequencies!r}")
    wm = 2 * math.pi * fm / grid.T
    wn = fn

    coef = np.asarray(S.coef)
    chans = [coef] if coef.ndim == 2 else [coef[..., c] for c in range(coef.shape[2])]
    outs = []
    for C in chans:
        Cx = C[np.ix_(im, jn)] * np.outer(sm, sn)
        if threads > 1:
            parts = np.array_split(np.arange(du.size), threads)
            with ThreadPoolExecutor(threads) as ex:
                res = list(ex.map(lambda p: render_sum(Cx, wm, wn, du[p], dth[p]), parts))
            G = np.concatenate(res)
        else:
            G = render_sum(Cx, wm, wn, du, dth)
        outs.append(G.reshape(M, N) / (M * N))
    G = outs[0] if coef.ndim == 2 else np.stack(outs, axis=-1)

    # g at node k corresponds to f * e^{u_k} with u_k = ln r_a + k delta
    amp = np.exp(-(up - u0)) / grid.r_a
    if G.ndim == 3:
        amp = amp[..., None]
    vals = G * amp
    max_imag = float(np.max(np.abs(vals.imag), initial=0.0))
    vals = vals.real
    mask = invalid[..., None] if vals.ndim == 3 else invalid
    vals = np.where(mask, 0.0, vals)
    return RenderResult(RetinalSamples(vals, grid), invalid, extrapolated, max_imag)


# -- binary spectrum files ------------------------------------------------------


def write_spectrum(path, S: Spectrum) -> None:
    """Write ``magic, version, M, N (int32), T, r_a (float64), M*N complex128`` little endian."""
    coef = np.asarray(S.coef)
    if coef.ndim != 2:
        raise PFTError("spectrum files hold a single channel")
    head = MAGIC + struct.pack("<Biidd", VERSION, S.grid.M, S.grid.N, S.grid.T, S.grid.r_a)
    body = np.empty((S.grid.M * S.grid.N, 2), dtype="<f8")
    flat = coef.reshape(-1)
    body[:, 0] = flat.real
    body[:, 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(body.tobytes())


def read_spectrum(path) -> Spectrum:
    with open(path, "rb") as fh:
        data = fh.read()
    hsize = 4 + struct.calcsize("<Biidd")
    if data[:4] != MAGIC:
        raise PFTError(f"{path}: not a DPFT spectrum file")
    version, M, N, T, r_a = struct.unpack("<Biidd", data[4:hsize])
    if version != VERSION:
        raise PFTError(f"{path}: unsupported version {version}")
    body = np.frombuffer(data[hsize:], dtype="<f8")
    if body.size != 2 * M * N:
        raise PFTError(f"{path}: expected {M * N} coefficients, found {body.size // 2}")
    coef = (body[0::2] + 1j * body[1::2]).reshape(M, N)
    delta = T / M
    grid = GridSpec(M=M, N=N, r_a=r_a, r_b=r_a * math.exp(T), delta=delta)
    return Spectrum(coef, grid)
