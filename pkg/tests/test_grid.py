import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from confcam.camera import pixel_to_plane
from confcam.grid import (GridError, GridSpec, ImageGeometry, derive_grid, grid_points,
                          grid_points_complex, hemifield_of_sectors, meridian_sectors, sample_image)

EXAMPLE = ImageGeometry(512, 512, 4)


@pytest.fixture
def example():
    return derive_grid(EXAMPLE, 296, "half-diagonal")


def test_example_grid_numbers(example):
    s = example.spec
    assert (s.M, s.N) == (37, 64)
    assert abs(example.r0 - 2.427) < 1e-3
    assert abs(s.r_b - 90.5) < 0.1
    # delta is ln(1 + 1/(r0 K)) evaluated exactly
    assert s.delta == pytest.approx(math.log(1 + 1 / math.sqrt(296 / math.pi)), abs=1e-15)


def test_example_pixel_economy(example):
    assert example.spec.peripheral_count == 2368
    assert example.total_count == 2664
    assert 512 * 512 / 2368 > 100


def test_example_first_centres(example):
    r, th = grid_points(example.spec)
    assert abs(r[0, 0] - 2.552) < 1e-3
    assert th[0, 0] == pytest.approx(math.pi / 64)
    assert abs(r[1, 0] - 2.552 * math.exp(0.09804)) < 2e-3
    assert np.allclose(np.diff(th[0]), 2 * math.pi / 64)


def test_tiny_closed_form():
    d = derive_grid(ImageGeometry(2, 2, 1), math.pi, r_b=math.e)
    s = d.spec
    assert d.r0 == pytest.approx(1.0)
    assert s.delta == pytest.approx(math.log(2))
    assert (s.M, s.N) == (1, 9)


def test_half_min_side_mode():
    s = derive_grid(EXAMPLE, 296, "half-min-side").spec
    assert s.r_b == 64.0
    assert s.M == round(math.log(64 / s.r_a) / s.delta)


@pytest.mark.parametrize("kw", [dict(N_f=0), dict(N_f=10, r_b_mode="bogus"), dict(N_f=10, r_b=-1.0)])
def test_derive_grid_rejects_bad_input(kw):
    with pytest.raises(GridError):
        derive_grid(EXAMPLE, **kw)


def test_geometry_validation():
    with pytest.raises(GridError):
        ImageGeometry(1, 5, 1)
    with pytest.raises(GridError):
        ImageGeometry(5, 5, 0)


def test_first_ring_is_one_pixel(example):
    s = example.spec
    assert abs(s.ring_widths[0] - 1 / 4) < 1e-9
    assert np.allclose(s.ring_widths / s.ring_radii[:-1], math.expm1(s.delta))


def test_log_centres_are_arithmetic(example):
    lr = np.log(example.spec.center_radii)
    assert np.allclose(np.diff(lr), example.spec.delta, atol=1e-13)


@given(st.floats(0.5, 20), st.floats(1, 500))
def test_scale_consistency(K, Nf):
    a = derive_grid(ImageGeometry(4000, 4000, K), Nf)
    b = derive_grid(ImageGeometry(4000, 4000, 2 * K), 4 * Nf)
    assert a.r0 == pytest.approx(b.r0, rel=1e-12)


def test_spec_text_round_trip(example):
    s = example.spec
    assert GridSpec.from_text(s.to_text()) == s
    with pytest.raises(GridError, match="missing"):
        GridSpec.from_text("M=3\nN=4\n")


def test_T_equals_M_delta(example):
    s = example.spec
    assert abs(s.T - s.M * s.delta) < 1e-9
    assert abs(s.ring_radii[-1] - s.r_b) < s.ring_radii[-1] * math.expm1(s.delta)


def test_hemifields_and_meridian(example):
    s = example.spec
    hf = hemifield_of_sectors(s)
    right = np.flatnonzero(hf == "right")
    assert np.all(np.cos(s.center_angles[right]) > 0)
    assert len(right) == 32
    assert np.flatnonzero(meridian_sectors(s)).tolist() == [15, 16, 47, 48]


def test_meridian_odd_N():
    s = GridSpec(M=2, N=9, r_a=1.0, r_b=2.0, delta=0.35)
    m = meridian_sectors(s)
    # with N = 9 the line theta = pi/2 falls inside sector 2
    assert m[2]


def test_sample_constant_image(example):
    s = example.spec
    img = np.ones((512, 512))
    smp = sample_image(img, s, K=4, fill=1.0)
    assert np.allclose(smp.values, s.weight)
    assert np.allclose(smp.intensities, 1.0)


def test_sample_clipped_rings_error(example):
    with pytest.raises(GridError, match="clipped rings"):
        sample_image(np.ones((512, 512)), example.spec, K=4)


def test_sample_zero_outside_fovea(example):
    s = example.spec
    z = pixel_to_plane((512, 512), 4)
    img = (np.abs(z) < s.r_a - 0.5).astype(float)
    assert np.all(sample_image(img, s, K=4, fill=0.0).values == 0)


def test_radial_grating_against_analytic(example):
    s = example.spec
    f = lambda z: np.cos(0.7 * np.abs(z))
    got = sample_image(f, s, K=4).intensities
    want = np.cos(0.7 * np.abs(grid_points_complex(s)))
    assert np.max(np.abs(got - want)) < 1e-6


def test_raster_sampling_close_to_analytic(example):
    s = example.spec
    z = pixel_to_plane((512, 512), 4)
    img = 0.5 + 0.5 * np.cos(0.3 * np.abs(z))
    got = sample_image(img, s, K=4, fill=0.0).intensities
    want = 0.5 + 0.5 * np.cos(0.3 * np.abs(grid_points_complex(s)))
    inside = np.abs(grid_points_complex(s)) < 63
    # bilinear error bound for a smooth grating at 4 px per unit
    assert np.max(np.abs(got - want)[inside]) < 2e-3


def test_color_sampling_per_channel(example):
    s = example.spec
    img = np.random.default_rng(0).random((512, 512, 3))
    smp = sample_image(img, s, K=4, fill=0.0)
    assert smp.values.shape == (37, 64, 3)
    g = sample_image(img[..., 1], s, K=4, fill=0.0)
    assert np.array_equal(smp.values[..., 1], g.values)


def test_split_flag_recorded(example):
    smp = sample_image(lambda z: np.ones(z.shape), example.spec, split=True)
    assert smp.split and smp.meridian.sum() == 4
