import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from confcam.camera import INFINITY
from confcam.grid import GridSpec, ImageGeometry, derive_grid, grid_points_complex, sample_image
from confcam.pft import CorticalImage, dpft_forward, dpft_inverse
from confcam.retinotopy import (HemiCortex, RetinotopyError, assemble, log_polar, right_field_sectors,
                                schwartz_map, split_hemispheres)


@pytest.fixture(scope="module")
def example():
    return derive_grid(ImageGeometry(512, 512, 4), 296).spec


def cortical_of(f, spec):
    return dpft_inverse(dpft_forward(sample_image(f, spec)))


@pytest.mark.parametrize("z, want", [(1, (0.0, 0.0)), (math.e * 1j, (1.0, math.pi / 2)),
                                     (-math.e ** 2, (2.0, -math.pi))])
def test_log_polar_examples(z, want):
    got = log_polar(z)
    assert got[0] == pytest.approx(want[0]) and got[1] == pytest.approx(want[1])


@pytest.mark.parametrize("z", [0, INFINITY])
def test_log_polar_singular(z):
    with pytest.raises(RetinotopyError):
        log_polar(z)


@given(st.floats(0.1, 10), st.floats(-3, 3), st.floats(-1, 1), st.floats(0.1, 5))
def test_log_polar_rotation_and_zoom(r, th, phi, rho):
    z = r * cmath.exp(1j * th)
    u, t = log_polar(z)
    u2, t2 = log_polar(cmath.exp(1j * phi) * z)
    assert abs(cmath.exp(1j * t2) - cmath.exp(1j * (t + phi))) < 1e-12 and abs(u2 - u) < 1e-12
    u3, t3 = log_polar(rho * z)
    assert abs(u3 - u - math.log(rho)) < 1e-12 and abs(cmath.exp(1j * t3) - cmath.exp(1j * t)) < 1e-12


def test_schwartz_origin_and_regimes():
    a = 0.7
    for side in ("left", "right"):
        assert schwartz_map(0, a, side) == 0
    z = a / 100 * cmath.exp(0.4j)
    assert abs(schwartz_map(z, a, "left") - z / a) < abs(z) ** 2 / a ** 2
    assert abs(schwartz_map(-z, a, "right") - z / a) < abs(z) ** 2 / a ** 2
    big = 1e4 * a * cmath.exp(0.3j)
    want = cmath.log(big) - math.log(a)
    assert abs(schwartz_map(big, a, "left") - want) < 1e-3 * abs(want)


def test_schwartz_errors():
    with pytest.raises(RetinotopyError):
        schwartz_map(-1.0, 1.0, "left")
    with pytest.raises(RetinotopyError):
        schwartz_map(0.5, 0.0, "left")
    with pytest.raises(RetinotopyError):
        schwartz_map(0.5, 1.0, "up")


def test_split_routes_right_field_to_left_hemisphere(example):
    cort = cortical_of(lambda z: (z.real > 0).astype(float), example)
    left, right = split_hemispheres(cort)
    assert left.side == "left" and np.allclose(left.values, 1.0)
    assert np.allclose(right.values, 0.0, atol=1e-12)
    assert np.array_equal(left.sectors, right_field_sectors(example))


@pytest.mark.parametrize("layout", ["mirrored", "stacked"])
def test_assemble_is_bijection_on_samples(example, layout):
    rng = np.random.default_rng(0)
    cort = CorticalImage(rng.random((example.M, example.N)) * example.weight, example)
    canvas = assemble(*split_hemispheres(cort), layout)
    idx = canvas.index[canvas.index >= 0]
    assert np.array_equal(np.sort(idx), np.arange(example.M * example.N))
    flat = cort.intensities.reshape(-1)
    ok = canvas.index >= 0
    assert np.array_equal(canvas.pixels[ok], flat[canvas.index[ok]])


def test_mirrored_layout_geometry(example):
    cort = cortical_of(lambda z: (z.real > 0).astype(float), example)
    canvas = assemble(*split_hemispheres(cort), "mirrored")
    M = example.M
    assert canvas.pixels.shape == (32, 2 * M)
    # right visual field shows on the right half, fovea at the centre column
    assert np.allclose(canvas.pixels[:, M:], 1) and np.allclose(canvas.pixels[:, :M], 0, atol=1e-12)
    k = canvas.index % example.N, canvas.index // example.N
    assert np.all(k[1][:, M] == 0) and np.all(k[1][:, M - 1] == 0)
    # upper field on top in both halves
    th = example.center_angles[k[0]]
    assert np.sin(th[0, M]) > 0.9 and np.sin(th[-1, M]) < -0.9
    assert np.sin(th[0, 0]) > 0.9 and np.sin(th[-1, 0]) < -0.9


def test_stacked_layout_spans_full_turn(example):
    cort = cortical_of(lambda z: np.ones(z.shape), example)
    canvas = assemble(*split_hemispheres(cort), "stacked")
    assert canvas.pixels.shape == (example.N, example.M)
    th = example.center_angles[canvas.index[:, 0] % example.N]
    unwrapped = np.unwrap(th)
    assert np.all(np.diff(unwrapped) < 0)
    assert abs(unwrapped[0] - unwrapped[-1]) == pytest.approx(2 * math.pi - example.alpha)


def test_constant_hemifields_give_constant_canvas(example):
    cort = cortical_of(lambda z: np.full(z.shape, 0.25), example)
    canvas = assemble(*split_hemispheres(cort), "mirrored")
    assert np.allclose(canvas.pixels, 0.25)


def test_drop_meridian(example):
    cort = cortical_of(lambda z: np.ones(z.shape), example)
    canvas = assemble(*split_hemispheres(cort), "mirrored", drop_meridian=True)
    assert canvas.pixels.shape == (30, 2 * example.M)
    kept = set((canvas.index[canvas.index >= 0] % example.N).tolist())
    assert kept.isdisjoint({15, 16, 47, 48})


def test_assemble_errors(example):
    left, right = split_hemispheres(CorticalImage(np.zeros((example.M, example.N)), example))
    with pytest.raises(RetinotopyError):
        assemble(right, left)
    with pytest.raises(RetinotopyError):
        assemble(left, right, "diagonal")
    other = GridSpec(M=example.M, N=example.N, r_a=1.0, r_b=example.r_b, delta=example.delta)
    _, r2 = split_hemispheres(CorticalImage(np.zeros((example.M, example.N)), other))
    with pytest.raises(RetinotopyError):
        assemble(left, r2)
    with pytest.raises(RetinotopyError):
        HemiCortex("left", np.zeros((3, 2)), np.arange(5), example)


def test_color_canvas(example):
    f = lambda z: np.stack([np.ones(z.shape), np.zeros(z.shape), 0.5 * np.ones(z.shape)], axis=-1)
    cort = cortical_of(f, example)
    canvas = assemble(*split_hemispheres(cort), "stacked")
    assert canvas.pixels.shape == (example.N, example.M, 3)
    assert np.allclose(canvas.pixels, [1, 0, 0.5])


def test_grid_points_follow_log_polar(example):
    z = grid_points_complex(example)
    u, th = log_polar(z[4, 3])
    assert u == pytest.approx(math.log(example.center_radii[4]))
    assert th == pytest.approx(example.center_angles[3])
