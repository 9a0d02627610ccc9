"""Command-line front end: ``confcam grid|pipeline|transform|saccade|bench|binocular``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .binocular import EyePose, Scene, binocular_pipeline, demo_scene
from .bench import parse_sizes, run_bench, to_csv
from .camera import EulerAngles, MoebiusMap, Translation3, h_from_translation, k_from_euler
from .grid import RB_MODES, DerivedGrid, GridSpec, ImageGeometry, derive_grid, sample_image
from .imageio import extension_for, read_image, write_image
from .pft import (PFTError, Spectrum, dpft_forward, dpft_inverse, projective_render, read_spectrum,
                  write_spectrum)
from .retinotopy import LAYOUTS, assemble, split_hemispheres
from .saccade import (FlashSet, SaccadeEvent, mislocalization_report, remap, report_csv,
                      steps_for_target)

CHANNELS = ("r", "g", "b")


def g6(x) -> str:
    return format(float(x), ".6g")


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CONFCAM_THREADS", "1")))
    except ValueError:
        return 1


def cortical_raster(values: np.ndarray) -> np.ndarray:
    """Display layout of an (M, N[, C]) cortical array: columns = u, rows = theta upwards."""
    return np.swapaxes(np.asarray(values), 0, 1)[::-1]


def write_config(outdir: Path, command: str, args: argparse.Namespace, **extra) -> None:
    cfg = {"command": command}
    for k, v in sorted(vars(args).items()):
        if k == "func":
            continue
        cfg[k] = v
    cfg.update(extra)
    (outdir / "config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True, default=str) + "\n")


def _outdir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _read_spec(path) -> GridSpec:
    return GridSpec.from_text(Path(path).read_text())


# -- commands ------------------------------------------------------------------


def cmd_grid(args) -> int:
    geom = ImageGeometry(args.A, args.B, args.K)
    d: DerivedGrid = derive_grid(geom, args.Nf, args.rb)
    s = d.spec
    print(f"M={s.M} N={s.N} r0={g6(d.r0)} delta={g6(s.delta)} rb={g6(s.r_b)}")
    print(f"ra={g6(s.r_a)} T={g6(s.T)} peripheral={s.peripheral_count} "
          f"total={g6(d.total_count)}")
    Path(args.out).write_text(s.to_text())
    return 0


def cmd_pipeline(args) -> int:
    spec = _read_spec(args.spec)
    img = read_image(args.image)
    out = _outdir(args.outdir)
    samples = sample_image(img, spec, split=args.split, K=args.K, fill=args.fill)
    S = dpft_forward(samples)
    cortical = dpft_inverse(S)
    np.save(out / "samples.npy", np.asarray(samples.values))
    coef = np.asarray(S.coef)
    if coef.ndim == 2:
        write_spectrum(out / "spectrum.dpft", S)
    else:
        for c in range(coef.shape[2]):
            write_spectrum(out / f"spectrum_{CHANNELS[c] if c < 3 else c}.dpft", Spectrum(coef[..., c], spec))
    ext = extension_for(cortical.intensities)
    write_image(out / f"cortical{ext}", cortical_raster(cortical.intensities))
    if args.assemble:
        left, right = split_hemispheres(cortical)
        canvas = assemble(left, right, args.assemble, drop_meridian=args.drop_meridian)
        write_image(out / f"canvas{ext}", canvas.pixels)
    extra = {"M": spec.M, "N": spec.N, "backend": kernels.BACKEND}
    if args.verify:
        err = float(np.max(np.abs(np.asarray(cortical.values) - np.asarray(samples.values)), initial=0.0))
        print(f"max round-trip error: {g6(err)}")
        extra["roundtrip_error"] = err
    print(f"samples: {spec.M}x{spec.N} = {spec.peripheral_count}")
    write_config(out, "pipeline", args, **extra)
    return 0


def _transform_map(args) -> MoebiusMap:
    if args.euler is not None:
        return k_from_euler(EulerAngles(*args.euler))
    return h_from_translation(Translation3(*args.translate))


def cmd_transform(args) -> int:
    S = read_spectrum(args.spectrum)
    g = _transform_map(args)
    res = projective_render(S, g, frequencies=args.frequencies, threads=args.threads)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_image(out, cortical_raster(res.samples.intensities))
    np.save(out.with_suffix(".npy"), np.asarray(res.samples.values))
    print(f"invalid={int(res.invalid.sum())} extrapolated={int(res.extrapolated.sum())} "
          f"max_imag={g6(res.max_imag)}")
    return 0


def cmd_saccade(args) -> int:
    S = read_spectrum(args.spectrum)
    spec = S.grid
    if args.target is not None:
        target = complex(*args.target)
        j = steps_for_target(target, spec)
    else:
        j = args.steps
        target = spec.r_a * math.exp(j * spec.delta)
    event = SaccadeEvent(target, j)
    event.validate(spec)
    q = event.angular_steps(spec) if args.mode == "retarget" else 0
    if args.flashes:
        flashes = FlashSet.from_csv(Path(args.flashes).read_text())
    else:
        flashes = FlashSet.ring(0.0, math.sqrt(spec.r_a * spec.r_b), 24)
    out = _outdir(args.outdir)
    cortical = remap(S, j, q, blank_wrapped=args.blank_wrapped)
    write_image(out / "remapped.pgm", cortical_raster(cortical.intensities))
    rows = mislocalization_report(flashes, event, spec, args.mode)
    (out / "mislocalization.csv").write_text(report_csv(rows))
    print(f"j={j} q={q} ratio={g6(math.exp(-j * spec.delta))} flashes={len(rows)}/{len(flashes)}")
    write_config(out, "saccade", args, j=j, q=q)
    return 0


def cmd_bench(args) -> int:
    rows = run_bench(parse_sizes(args.sizes), args.reps, args.seed, args.render_max)
    text = to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    for M, N in sorted({(r["M"], r["N"]) for r in rows}):
        t = {r["method"]: r["seconds"] for r in rows if (r["M"], r["N"]) == (M, N)}
        print(f"{M}x{N}: direct/fft speed ratio {g6(t['direct_dft'] / t['fft_dpft'])}")
    return 0


def cmd_binocular(args) -> int:
    scene = Scene.from_json(Path(args.scene).read_text()) if args.scene else demo_scene(args.depth)
    shape = (args.size, args.size)
    spec = derive_grid(ImageGeometry(args.size, args.size, args.K), args.Nf).spec
    half = args.offset / 2
    if args.parallel:
        poses = (EyePose(-half), EyePose(half))
    else:
        poses = (EyePose.converged(-half, args.depth), EyePose.converged(half, args.depth))
    res = binocular_pipeline(scene, poses, spec, shape=shape, K=args.K, layout=args.assemble,
                             split=True, fill=0.0, threads=args.threads)
    out = _outdir(args.outdir)
    for name, r in res.items():
        write_image(out / f"{name}_eye.ppm", r.raster)
        write_image(out / f"{name}_cortical.ppm", cortical_raster(r.cortical.intensities))
        write_image(out / f"{name}_canvas.ppm", r.canvas.pixels)
    print(f"M={spec.M} N={spec.N} canvas={'x'.join(map(str, res['left'].canvas.pixels.shape[:2]))}")
    write_config(out, "binocular", args, M=spec.M, N=spec.N)
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="confcam", description="Conformal camera and DPFT imaging tools.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grid", help="derive a log-polar sampling grid")
    g.add_argument("--A", type=float, required=True, help="image width in pixels")
    g.add_argument("--B", type=float, required=True, help="image height in pixels")
    g.add_argument("--K", type=float, required=True, help="pixels per unit length")
    g.add_argument("--Nf", type=float, required=True, help="foveal sample count")
    g.add_argument("--rb", choices=RB_MODES, default="half-diagonal")
    g.add_argument("--out", default="grid.spec")
    g.set_defaults(func=cmd_grid)

    pl = sub.add_parser("pipeline", help="sample an image, transform and write cortical outputs")
    pl.add_argument("image")
    pl.add_argument("--spec", required=True)
    pl.add_argument("--K", type=float, required=True)
    pl.add_argument("--outdir", default="out")
    pl.add_argument("--split", action="store_true")
    pl.add_argument("--assemble", choices=LAYOUTS)
    pl.add_argument("--drop-meridian", action="store_true")
    pl.add_argument("--fill", type=float, default=None)
    pl.add_argument("--verify", action="store_true")
    pl.set_defaults(func=cmd_pipeline)

    t = sub.add_parser("transform", help="render a spectrum under an image projective transformation")
    t.add_argument("spectrum")
    how = t.add_mutually_exclusive_group(required=True)
    how.add_argument("--euler", type=float, nargs=3, metavar=("PSI", "PHI", "PSI2"))
    how.add_argument("--translate", type=float, nargs=3, metavar=("B1", "B2", "B3"))
    t.add_argument("--frequencies", choices=("centered", "literal"), default="centered")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("saccade", help="remap a spectrum for a saccade and report mislocalization")
    s.add_argument("spectrum")
    tgt = s.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--target", type=float, nargs=2, metavar=("X", "Y"))
    tgt.add_argument("--steps", type=int)
    s.add_argument("--mode", choices=("radial", "retarget"), default="radial")
    s.add_argument("--flashes", help="CSV with columns label,x,y")
    s.add_argument("--blank-wrapped", action="store_true")
    s.add_argument("--outdir", default="saccade_out")
    s.set_defaults(func=cmd_saccade)

    b = sub.add_parser("bench", help="time FFT DPFT, direct DFT and geometric resampling")
    b.add_argument("--sizes", default="16x16,37x64,128x256")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--render-max", type=int, default=4096,
                   help="largest M*N for which the render kernel is timed")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    bi = sub.add_parser("binocular", help="two-eye pipeline on a rectangle scene")
    bi.add_argument("--scene", help="scene JSON (default: gray square with red bar)")
    bi.add_argument("--offset", type=float, default=6.5, help="distance between the eyes")
    bi.add_argument("--depth", type=float, default=100.0, help="fixation depth")
    bi.add_argument("--parallel", action="store_true", help="keep gaze straight ahead")
    bi.add_argument("--size", type=int, default=256)
    bi.add_argument("--K", type=float, default=800.0)
    bi.add_argument("--Nf", type=float, default=60.0)
    bi.add_argument("--assemble", choices=LAYOUTS, default="mirrored")
    bi.add_argument("--outdir", default="binocular_out")
    bi.set_defaults(func=cmd_binocular)

    for sp in (pl, t, s, b, bi):
        sp.add_argument("--threads", type=int, default=default_threads())
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (ValueError, OSError, PFTError) as exc:
        print(f"confcam: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
