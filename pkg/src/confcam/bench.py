"""Timing harness: FFT DPFT vs direct DFT vs geometric log-polar resampling,
and compiled vs NumPy kernels."""
from __future__ import annotations

import csv
import io
import math
import time

import numpy as np

from . import kernels
from .camera import pixel_to_plane, plane_to_pixel
from .grid import GridSpec, RetinalSamples, grid_points_complex
from .pft import _signed, direct_dpft, dpft_forward

COLUMNS = ("M", "N", "method", "backend", "reps", "seconds", "max_abs_err")
EQUIV_TOL = 1e-10


class EquivalenceError(RuntimeError):
    pass


def bench_grid(M: int, N: int) -> GridSpec:
    """Grid with near-square log-polar cells (delta = 2 pi / N) and r_a = 1."""
    delta = 2 * math.pi / N
    return GridSpec(M=M, N=N, r_a=1.0, r_b=math.exp(M * delta), delta=delta)


def _time(fn, reps: int) -> float:
    best = math.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_size(M: int, N: int, reps: int = 3, seed: int = 0, render_max: int = 4096) -> list[dict]:
    spec = bench_grid(M, N)
    rng = np.random.default_rng(seed)
    vals = rng.random((M, N)) * spec.weight
    samples = RetinalSamples(vals, spec)
    ref = dpft_forward(samples).coef
    direct = direct_dpft(vals, spec)
    err = float(np.max(np.abs(direct - ref)))
    if err >= EQUIV_TOL:
        raise EquivalenceError(f"FFT and direct DFT disagree by {err:.3g} at {M}x{N}")
    rows = [
        dict(M=M, N=N, method="fft_dpft", backend="numpy", reps=reps,
             seconds=_time(lambda: dpft_forward(samples), reps), max_abs_err=0.0),
        dict(M=M, N=N, method="direct_dft", backend="numpy", reps=reps,
             seconds=_time(lambda: direct_dpft(vals, spec), reps), max_abs_err=err),
    ]

    # geometric approach: resample a raster straight onto the exp-polar grid
    side = int(2 * math.ceil(spec.r_b) * 4)
    K = side / (2 * spec.r_b)
    zr = pixel_to_plane((side, side), K)
    raster = np.cos(3 * np.abs(zr)) * np.cos(5 * np.angle(zr))
    row, col = plane_to_pixel(grid_points_complex(spec), raster.shape, K)
    backs = kernels.backends()
    geo_ref = backs["numpy"].bilinear_sample(raster, row, col, 0.0)
    for name, mod in backs.items():
        out = mod.bilinear_sample(raster, row, col, 0.0)
        rows.append(dict(M=M, N=N, method="geometric_resample", backend=name, reps=reps,
                         seconds=_time(lambda: mod.bilinear_sample(raster, row, col, 0.0), reps),
                         max_abs_err=float(np.max(np.abs(out - geo_ref)))))

    if M * N <= render_max:
        im, fm, sm = _signed(M)
        jn, fn, sn = _signed(N)
        coef = ref[np.ix_(im, jn)] * np.outer(sm, sn) / (M * N)
        wm = 2 * math.pi * fm / spec.T
        pts = grid_points_complex(spec) * np.exp(0.01j) * 1.01
        du = (np.log(np.abs(pts)) - math.log(spec.center_radii[0])).ravel()
        dth = (np.angle(pts) - spec.center_angles[0]).ravel()
        r_ref = backs["numpy"].render_sum(coef, wm, fn, du, dth)
        for name, mod in backs.items():
            out = mod.render_sum(coef, wm, fn, du, dth)
            rows.append(dict(M=M, N=N, method="projective_render", backend=name, reps=reps,
                             seconds=_time(lambda: mod.render_sum(coef, wm, fn, du, dth), reps),
                             max_abs_err=float(np.max(np.abs(out - r_ref)))))
    return rows


def run_bench(sizes, reps: int = 3, seed: int = 0, render_max: int = 4096) -> list[dict]:
    rows = []
    for M, N in sizes:
        rows.extend(bench_size(M, N, reps, seed, render_max))
    return rows


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (format(r[k], ".6g") if isinstance(r[k], float) else r[k]) for k in COLUMNS})
    return buf.getvalue()


def parse_sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        m, _, n = part.partition("x")
        out.append((int(m), int(n or m)))
    if not out:
        raise ValueError("no sizes given")
    return out
