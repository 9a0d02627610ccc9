import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from confcam.camera import (EulerAngles, MoebiusMap, Translation3, apply_array, h_from_translation,
                            inverse, k_from_euler)
from confcam.grid import GridSpec, ImageGeometry, RetinalSamples, derive_grid, grid_points_complex, sample_image
from confcam.pft import (ConvergenceError, PFTError, Spectrum, continuous_pft, direct_dpft, dpft_forward,
                         dpft_inverse, projective_render, read_spectrum, write_spectrum)


def make_spec(M, N, r_a=1.5, delta=0.1):
    return GridSpec(M=M, N=N, r_a=r_a, r_b=r_a * math.exp(M * delta), delta=delta)


def random_samples(spec, seed=0):
    rng = np.random.default_rng(seed)
    return RetinalSamples(rng.random((spec.M, spec.N)) * spec.weight, spec)


def double_sum(values, spec):
    """Forward transform written out term by term."""
    M, N = spec.M, spec.N
    u = math.log(spec.r_a) + spec.delta * np.arange(M)
    out = np.zeros((M, N), dtype=complex)
    for m in range(M):
        for n in range(N):
            acc = 0j
            for k in range(M):
                for l in range(N):
                    acc += values[k, l] * math.exp(u[k]) * np.exp(-2j * np.pi * (m * k / M + n * l / N))
            out[m, n] = acc
    return out


@pytest.fixture(scope="module")
def example():
    return derive_grid(ImageGeometry(512, 512, 4), 296).spec


def test_fft_matches_double_sum_8x8():
    spec = make_spec(8, 8)
    s = random_samples(spec)
    assert np.max(np.abs(dpft_forward(s).coef - double_sum(s.values, spec))) < 1e-10


def test_direct_dft_matches_fft_mixed_radix(example):
    s = random_samples(example, 4)
    assert np.max(np.abs(direct_dpft(s.values, example) - dpft_forward(s).coef)) < 1e-10


def test_single_weighted_impulse_gives_flat_spectrum():
    spec = make_spec(5, 6)
    v = np.zeros((5, 6))
    v[0, 0] = math.exp(-math.log(spec.r_a))
    S = dpft_forward(RetinalSamples(v, spec))
    assert np.allclose(S.coef, 1.0, atol=1e-14)
    back = dpft_inverse(Spectrum(np.ones((5, 6), dtype=complex), spec))
    assert np.allclose(back.values, v, atol=1e-15)


def test_zero_in_zero_out():
    spec = make_spec(4, 7)
    S = dpft_forward(RetinalSamples(np.zeros((4, 7)), spec))
    assert not np.any(S.coef)


@pytest.mark.parametrize("M,N", [(8, 8), (16, 16), (16, 32), (37, 64), (15, 21)])
def test_round_trip(M, N):
    spec = make_spec(M, N)
    s = random_samples(spec, M * N)
    back = dpft_inverse(dpft_forward(s)).values
    assert np.isrealobj(back)
    assert np.max(np.abs(back - s.values) / np.abs(s.values)) < 1e-10


def test_linearity_and_parseval():
    spec = make_spec(9, 12)
    a, b = random_samples(spec, 1), random_samples(spec, 2)
    combo = RetinalSamples(2.0 * a.values - 0.5 * b.values, spec)
    lhs = dpft_forward(combo).coef
    rhs = 2.0 * dpft_forward(a).coef - 0.5 * dpft_forward(b).coef
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    g = a.values * np.exp(spec.u)[:, None]
    F = dpft_forward(a).coef
    assert abs(np.sum(g ** 2) - np.sum(np.abs(F) ** 2) / F.size) < 1e-10 * np.sum(g ** 2)
    assert np.all(np.abs(F) <= np.sum(np.abs(g)) * (1 + 1e-12))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 1000))
def test_round_trip_property(M, N, seed):
    spec = make_spec(M, N)
    s = random_samples(spec, seed)
    assert np.allclose(dpft_inverse(dpft_forward(s)).values, s.values, rtol=1e-10, atol=0)


def test_color_channels_transform_independently():
    spec = make_spec(6, 10)
    rng = np.random.default_rng(0)
    v = rng.random((6, 10, 3)) * spec.weight
    S = dpft_forward(RetinalSamples(v, spec))
    for c in range(3):
        assert np.allclose(S.coef[..., c], dpft_forward(RetinalSamples(v[..., c], spec)).coef)


# -- continuous transform ----------------------------------------------------


def test_continuous_zero_function():
    assert continuous_pft(lambda z: np.zeros(z.shape), 1.0, 2, 1.0, 5.0) == 0


def test_continuous_angular_orthogonality():
    f = lambda z: np.cos(np.angle(z)) / np.abs(z)
    assert abs(continuous_pft(f, 0.7, 0, 1.0, 6.0)) < 1e-8
    assert abs(continuous_pft(f, 0.7, 1, 1.0, 6.0)) > 0.1


def test_continuous_gaussian_against_gauss_legendre():
    c = 3.0 + 1.0j
    f = lambda z: np.exp(-np.abs(z - c) ** 2 / 0.5)
    r_a, r_b, s, k = 1.0, 8.0, 1.0, 2
    got = continuous_pft(f, s, k, r_a, r_b, rtol=1e-9)

    # oracle: Gauss-Legendre in u, fine uniform rule in theta
    x, w = np.polynomial.legendre.leggauss(400)
    ua, ub = math.log(r_a), math.log(r_b)
    u = 0.5 * (ub - ua) * x + 0.5 * (ub + ua)
    wu = 0.5 * (ub - ua) * w
    th = 2 * np.pi * np.arange(2048) / 2048
    U, TH = np.meshgrid(u, th, indexing="ij")
    integrand = f(np.exp(U + 1j * TH)) * np.exp(U) * np.exp(-1j * (U * s + TH * k))
    want = np.sum(wu[:, None] * integrand) * (2 * np.pi / 2048)
    assert abs(got - want) < 1e-6 * abs(want)


def test_continuous_non_convergence_reports_estimates():
    rng = np.random.default_rng(0)
    noisy = lambda z: rng.random(z.shape)
    with pytest.raises(ConvergenceError) as info:
        continuous_pft(noisy, 0.0, 0, 1.0, 2.0, max_level=2)
    assert len(info.value.estimates) == 2


def test_discrete_coefficients_approximate_continuous(example):
    f = lambda z: np.exp(-np.abs(z - (20 + 10j)) ** 2 / 30.0)
    S = dpft_forward(sample_image(f, example))
    s_m, k_n = S.frequencies()
    for m, n in [(0, 0), (1, 2), (3, 5)]:
        cont = continuous_pft(f, s_m[m], k_n[n], example.r_a, example.r_b, rtol=1e-8)
        # the sum is a midpoint rule whose nodes sit at ln(r_a * centre factor) + k delta
        # and theta_l + pi / N, while the coefficients carry the phase of u_k and theta_l
        u_shift = math.log(example.r_a * example.center_factor)
        phase = np.exp(-1j * (s_m[m] * u_shift + k_n[n] * math.pi / example.N))
        assert abs(S.coef[m, n] * phase * example.center_factor - cont) < 1e-6 * abs(cont)


# -- projective render ---------------------------------------------------------


def test_render_identity_is_inverse(example):
    s = random_samples(example, 11)
    S = dpft_forward(s)
    res = projective_render(S, MoebiusMap.identity())
    ref = dpft_inverse(S).values
    assert np.max(np.abs(res.samples.values - ref)) < 1e-9 * np.max(np.abs(ref))
    assert not res.invalid.any() and not res.extrapolated.any()


def test_render_literal_frequencies_agree_on_grid(example):
    S = dpft_forward(random_samples(example, 12))
    a = projective_render(S, MoebiusMap.identity(), frequencies="literal").samples.values
    assert np.max(np.abs(a - dpft_inverse(S).values)) < 1e-9 * np.max(np.abs(a))
    with pytest.raises(PFTError):
        projective_render(S, MoebiusMap.identity(), frequencies="odd")


def test_render_one_sector_rotation(example):
    s = random_samples(example, 13)
    S = dpft_forward(s)
    g = k_from_euler(EulerAngles(0, 0, 2 * math.pi / example.N))
    out = projective_render(S, g).samples.values
    oracle = np.roll(dpft_inverse(S).values, -1, axis=1)
    assert np.max(np.abs(out - oracle)) < 1e-6 * np.max(np.abs(oracle))


def test_render_translation_of_log_periodic_image(example):
    """When f e^u is T-periodic in u its interpolant is exact between nodes."""
    u0 = math.log(example.center_radii[0])

    def f(z):
        u = np.log(np.abs(z)) - u0
        return np.exp(-u) * (2 + np.cos(2 * np.pi * u / example.T) * np.cos(np.angle(z)))

    g = h_from_translation(Translation3(0.2, 0.05, 0.3))
    res = projective_render(dpft_forward(sample_image(f, example)), g)
    want = f(apply_array(inverse(g), grid_points_complex(example)))
    assert np.max(np.abs(res.samples.intensities - want)) < 1e-10


@pytest.mark.xfail(strict=True, reason="trigonometric interpolation in u rings at the "
                   "non-periodic jump of f e^u (Gibbs); the direct series cannot reach 5% RMS")
def test_render_bar_pattern_small_translation(example):
    bars = lambda z: 0.5 + 0.5 * np.cos(0.5 * z.real)
    g = h_from_translation(Translation3(0, 0, 0.3))
    res = projective_render(dpft_forward(sample_image(bars, example)), g)
    want = bars(apply_array(inverse(g), grid_points_complex(example)))
    assert np.sqrt(np.mean((res.samples.intensities - want) ** 2)) < 0.05


def test_render_flags_invalid_nodes():
    spec = make_spec(4, 8, r_a=1.0, delta=0.2)
    z0 = grid_points_complex(spec)[1, 2]
    g = MoebiusMap(1, 0, -z0, 1)  # z -> z - z0 sends z0 to 0, so g^-1 pulls nothing there
    g = inverse(g)  # g^-1 (z0) = 0
    res = projective_render(dpft_forward(random_samples(spec)), g)
    assert res.invalid[1, 2] and res.invalid.sum() == 1
    assert res.samples.values[1, 2] == 0


def test_render_flags_extrapolation():
    spec = make_spec(4, 8, r_a=1.0, delta=0.2)
    g = h_from_translation(Translation3(0, -0.99, 0))  # z -> 100 z pulls nodes inwards
    res = projective_render(dpft_forward(random_samples(spec)), g)
    assert res.extrapolated.all()


def test_render_node_cap():
    spec = make_spec(8, 8)
    with pytest.raises(PFTError, match="cap"):
        projective_render(dpft_forward(random_samples(spec)), MoebiusMap.identity(), cap=63)


def test_render_threads_are_bitwise_identical(example):
    S = dpft_forward(random_samples(example, 3))
    g = h_from_translation(Translation3(0.1, 0.02, -0.1))
    a = projective_render(S, g, threads=1).samples.values
    b = projective_render(S, g, threads=4).samples.values
    assert np.array_equal(a, b)


# -- spectrum files --------------------------------------------------------------


def test_spectrum_file_layout(tmp_path, example):
    S = dpft_forward(random_samples(example, 5))
    p = tmp_path / "s.dpft"
    write_spectrum(p, S)
    data = p.read_bytes()
    assert data[:4] == b"DPFT" and data[4] == 1
    M, N = struct.unpack("<ii", data[5:13])
    T, r_a = struct.unpack("<dd", data[13:29])
    assert (M, N) == (37, 64) and T == example.T and r_a == example.r_a
    body = np.frombuffer(data[29:], dtype="<f8")
    assert body.size == 2 * M * N
    assert body[0] == S.coef[0, 0].real and body[3] == S.coef[0, 1].imag


def test_spectrum_file_round_trip(tmp_path, example):
    S = dpft_forward(random_samples(example, 6))
    p = tmp_path / "s.dpft"
    write_spectrum(p, S)
    R = read_spectrum(p)
    assert np.array_equal(R.coef, S.coef)
    assert (R.grid.M, R.grid.N, R.grid.r_a) == (example.M, example.N, example.r_a)
    assert R.grid.delta == pytest.approx(example.delta, rel=1e-15)


def test_spectrum_file_errors(tmp_path):
    p = tmp_path / "bad.dpft"
    p.write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(PFTError, match="not a DPFT"):
        read_spectrum(p)
    spec = make_spec(2, 2)
    with pytest.raises(PFTError):
        write_spectrum(p, Spectrum(np.zeros((2, 2, 3), dtype=complex), spec))
