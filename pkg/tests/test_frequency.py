import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import const_exp, const_s
from varsmooth import (
    Grid,
    InvalidConfigError,
    KernelConstructionError,
    PreconditionError,
    SampledFunction,
    SmoothnessFunction,
    VariableExponent,
    besov_norm_fourier,
    build_local_means_kernels,
    build_resolution_of_unity,
    default_levels,
    eta_kernel,
    kernel_diagnostics,
    kernel_symbol,
    local_means_block,
    local_means_norm,
    lp_blocks,
    luxemburg_norm,
    make_family_sample,
    peetre_maximal,
    peetre_norm,
    peetre_threshold,
    phi0,
    quadrature,
    resolve_peetre_parameter,
    tl_norm_fourier,
    weights_from_smoothness,
)


def test_phi0_support():
    assert phi0(np.array(0.5)) == 1.0
    assert phi0(np.array(2.5)) == 0.0
    r = np.linspace(0, 3, 301)
    assert np.all(np.diff(phi0(r)) <= 0)


def test_default_levels():
    assert default_levels(Grid(1, 512)) == 7
    assert default_levels(Grid(2, 128)) == 5
    with pytest.raises(InvalidConfigError):
        build_resolution_of_unity(Grid(1, 64), 5)


@pytest.mark.parametrize("dim,n", [(1, 512), (2, 64)])
def test_partition_and_supports(dim, n):
    g = Grid(dim, n)
    bank = build_resolution_of_unity(g)
    r = g.frequency_modulus()
    covered = r <= 2.0**bank.J
    assert np.max(np.abs(bank.filters.sum(axis=0) - 1)[covered]) <= 1e-12
    assert np.all(bank.filters[0][r > 2] == 0)
    for j in range(1, bank.J + 1):
        outside = (r < 2.0 ** (j - 1)) | (r > 2.0 ** (j + 1))
        assert np.all(bank.filters[j][outside] == 0)
        assert np.all(bank.filters[j] >= 0)


def test_telescoping():
    xi = np.linspace(0, 20, 401)
    lhs = (phi0(xi / 2) - phi0(xi)) + (phi0(xi / 4) - phi0(xi / 2))
    assert np.max(np.abs(lhs - (phi0(xi / 4) - phi0(xi)))) < 1e-15


def test_single_mode_blocks(grid512):
    x = grid512.coordinates()[0]
    bank = build_resolution_of_unity(grid512)
    blocks = lp_blocks(SampledFunction(grid512, np.exp(3j * x)), bank).values
    energy = np.abs(blocks).max(axis=1)
    # phi_1(3) = phi_2(3) = 1/2 by the symmetric smooth step
    assert np.allclose(energy[[1, 2]], 0.5, atol=1e-12)
    assert np.all(energy[[0, 3, 4, 5, 6, 7]] < 1e-12)
    ones = lp_blocks(SampledFunction(grid512, np.ones(512)), bank).values
    assert np.allclose(ones[0], 1, atol=1e-14) and np.abs(ones[1:]).max() < 1e-14


def test_reconstruction(grid512):
    f = make_family_sample("band_limited_random", grid512, 3, 0)
    blocks = lp_blocks(f, build_resolution_of_unity(grid512)).values
    assert np.max(np.abs(blocks.sum(axis=0) - f.values)) < 1e-10


def test_fourier_norm_examples(grid512):
    g = grid512
    x = g.coordinates()[0]
    two = const_exp(2, g)
    w0 = weights_from_smoothness(const_s(0, g), 7)
    assert besov_norm_fourier(SampledFunction(g, np.zeros(512)), w0, two, two) == 0
    f = make_family_sample("band_limited_random", g, 9, 0)
    full = luxemburg_norm(f, two) ** 2
    nrm = besov_norm_fourier(f, w0, two, two) ** 2
    assert full / 2 - 1e-9 <= nrm <= full * (1 + 1e-9)
    assert nrm * 3 >= full
    # cos(2^j x) lives entirely in block j
    s = const_s(1.3, g)
    w = weights_from_smoothness(s, 7)
    for j0 in (2, 4):
        f = SampledFunction(g, np.cos(2.0**j0 * x))
        expect = 2 ** (j0 * 1.3) * luxemburg_norm(f, const_exp(3, g))
        assert besov_norm_fourier(f, w, const_exp(3, g), const_exp(1.5, g)) == pytest.approx(expect, rel=1e-8)
        assert tl_norm_fourier(f, w, const_exp(3, g), const_exp(1.5, g)) == pytest.approx(expect, rel=1e-8)


def test_besov_equals_tl_when_p_equals_q(grid512):
    f = make_family_sample("band_limited_random", grid512, 4, 1)
    w = weights_from_smoothness(const_s(0.5, grid512), 7)
    p = const_exp(1.7, grid512)
    assert besov_norm_fourier(f, w, p, p) == pytest.approx(tl_norm_fourier(f, w, p, p), rel=1e-10)


def peetre_brute(vals, k, a, grid, additive=False):
    n = grid.n
    out = np.zeros(n)
    for i in range(n):
        for j in range(n):
            d = min(abs(i - j), n - abs(i - j)) * grid.spacing
            den = 1 + (2**k * d) ** a if additive else (1 + 2**k * d) ** a
            out[i] = max(out[i], abs(vals[j]) / den)
    return out


def test_peetre_matches_brute_force(rng):
    g = Grid(1, 64)
    vals = rng.standard_normal(64)
    for form in ("multiplicative", "additive"):
        got = peetre_maximal(SampledFunction(g, vals), 2, 1.7, form).values.real
        assert np.array_equal(got, peetre_brute(vals, 2, 1.7, g, form == "additive"))


def test_peetre_examples():
    g = Grid(1, 64)
    assert np.all(peetre_maximal(SampledFunction(g, np.full(64, -2.5)), 3, 2.0).values == 2.5)
    spike = np.zeros(64)
    spike[10] = 1.0
    d = np.array([min(abs(i - 10), 64 - abs(i - 10)) for i in range(64)]) * g.spacing
    got = peetre_maximal(SampledFunction(g, spike), 2, 3.0, form="additive").values.real
    assert np.array_equal(got, 1 / (1 + (4 * d) ** 3))
    got = peetre_maximal(SampledFunction(g, spike), 2, 3.0).values.real
    assert np.array_equal(got, 1 / (1 + 4 * d) ** 3)
    with pytest.raises(InvalidConfigError):
        peetre_maximal(SampledFunction(g, spike), 2, 0.0)


@given(st.integers(0, 2**31), st.floats(0.5, 4), st.floats(0.0, 3), st.integers(0, 63))
def test_peetre_properties(seed, a1, extra, shift):
    g = Grid(1, 64)
    vals = np.random.default_rng(seed).standard_normal(64)
    f = SampledFunction(g, vals)
    lo = peetre_maximal(f, 2, a1).values.real
    hi = peetre_maximal(f, 2, a1 + extra).values.real
    assert np.all(lo >= np.abs(vals))
    assert np.all(hi <= lo)
    moved = peetre_maximal(SampledFunction(g, np.roll(vals, shift)), 2, a1).values.real
    assert np.array_equal(moved, np.roll(lo, shift))


def test_peetre_threshold_and_auto(grid512):
    g = grid512
    x = g.coordinates()[0]
    p = VariableExponent(2 + 0.5 * np.sin(x))
    q = const_exp(2, g)
    thr = peetre_threshold(p, q, 0.3, "besov", 1)
    assert thr == pytest.approx((1 + q.clog_estimate) / p.p_minus + 0.3)
    assert resolve_peetre_parameter("auto", p, q, 0.3, "besov", 1) == thr + 1
    assert peetre_threshold(p, q, 0.3, "tl", 1) == pytest.approx(1 / 1.5 + 0.3)
    with pytest.raises(PreconditionError):
        resolve_peetre_parameter(thr, p, q, 0.3, "besov", 1)


def test_peetre_norm_dominates_fourier(grid512):
    f = make_family_sample("band_limited_random", grid512, 1, 2)
    w = weights_from_smoothness(const_s(1, grid512), 7)
    two = const_exp(2, grid512)
    assert peetre_norm(f, w, two, two) >= besov_norm_fourier(f, w, two, two) * (1 - 1e-12)


def test_eta_kernel():
    g = Grid(1, 1024)
    for nu in range(4):
        assert eta_kernel(g, nu, 3.0).values[0] == 2.0**nu
    vals = [quadrature(eta_kernel(g, nu, 3.0)) for nu in range(6)]
    assert max(vals) / min(vals) <= 2
    at_one = [eta_kernel(g, 0, m).values.real[np.argmin(np.abs(g.origin_distance() - 1))] for m in (1, 2, 4)]
    assert at_one[0] > at_one[1] > at_one[2]


def test_kernels_r0_is_bump(grid512):
    ks = build_local_means_kernels(grid512, R=0)
    assert np.allclose(ks.k.values, ks.k0.values, rtol=1e-13)


@pytest.mark.parametrize("R", [1, 2, 3, 4])
def test_kernel_moments_and_support(grid512, R):
    ks = build_local_means_kernels(grid512, R=R)
    diag = kernel_diagnostics(ks)
    assert diag["max_relative_moment"] <= 1e-10
    assert diag["support_ok"]
    assert ks.tauber_epsilon > 0
    assert np.all(ks.k.values[grid512.origin_distance() >= ks.support_radius] == 0)


def test_kernel_symbol_vanishing_order(grid512):
    for R in (2, 4):
        ks = build_local_means_kernels(grid512, R=R)
        # |k^(xi)| <= C |xi|^R with C fitted at the smallest grid frequency
        s1, s2 = np.abs(kernel_symbol(ks.k, np.array([[1.0], [2.0]])))
        assert s2 <= s1 * 2**R
        # near the origin the symbol scales exactly like |xi|^R
        t1, t2 = np.abs(kernel_symbol(ks.k, np.array([[1e-2], [2e-2]])))
        assert t2 / t1 == pytest.approx(2**R, rel=1e-2)


def test_kernels_2d():
    g = Grid(2, 128)
    ks = build_local_means_kernels(g, R=2)
    assert kernel_diagnostics(ks)["max_relative_moment"] <= 1e-10


def test_kernel_errors(grid512):
    with pytest.raises(InvalidConfigError):
        build_local_means_kernels(grid512, R=2, support_radius=1.5)
    with pytest.raises(InvalidConfigError):
        build_local_means_kernels(Grid(1, 16), R=2)
    with pytest.raises(KernelConstructionError):
        build_local_means_kernels(grid512, R=2, max_attempts=0)


def test_local_means_blocks(grid512, rng):
    g = grid512
    ks = build_local_means_kernels(g, R=2)
    c = SampledFunction(g, np.full(512, 1.7))
    assert np.allclose(local_means_block(c, ks.k0, 0.5).values, 1.7, atol=1e-12)
    assert np.abs(local_means_block(c, ks.k, 0.5).values).max() < 1e-10
    f = SampledFunction(g, rng.standard_normal(512))
    # sum_y k(y) f(x + y) dV by the convolution theorem
    ref = np.fft.ifft(np.conj(np.fft.fft(ks.k0.values.real)) * np.fft.fft(f.values)) * g.cell_volume
    assert np.max(np.abs(local_means_block(f, ks.k0, 1.0).values - ref)) < 1e-8
    x = g.coordinates()[0]
    e = SampledFunction(g, np.exp(5j * x))
    for t in (1.0, 0.25):
        got = np.abs(local_means_block(e, ks.k, t).values)
        assert np.allclose(got, abs(kernel_symbol(ks.k, [[-5 * t]])[0]), atol=1e-8)


def test_local_means_norm_examples(grid512):
    g = grid512
    ks = build_local_means_kernels(g, R=2)
    w = weights_from_smoothness(const_s(1, g), 7)
    two = const_exp(2, g)
    assert local_means_norm(SampledFunction(g, np.zeros(512)), ks, w, two, two) == 0
    c = SampledFunction(g, np.full(512, 2.0))
    head = luxemburg_norm(c, two)
    assert local_means_norm(c, ks, w, two, two) == pytest.approx(head, rel=1e-9)
    with pytest.raises(PreconditionError):
        local_means_norm(c, ks, weights_from_smoothness(const_s(2.5, g), 7), two, two)


def test_local_means_ratio_stable(grid512):
    g = grid512
    ks = build_local_means_kernels(g, R=2)
    w = weights_from_smoothness(const_s(1, g), 7)
    two = const_exp(2, g)
    bank = build_resolution_of_unity(g)
    ratios = []
    for i in range(20):
        f = make_family_sample("band_limited_random", g, 20240601, i)
        ratios.append(local_means_norm(f, ks, w, two, two) / besov_norm_fourier(f, w, two, two, bank))
    assert max(ratios) / min(ratios) <= 10
