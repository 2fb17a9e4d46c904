import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varsmooth import (
    Grid,
    InvalidConfigError,
    InvalidInputError,
    SampledFunction,
    dft,
    idft,
    periodic_shift_sample,
    quadrature,
    read_csv,
    write_csv,
)


def test_grid_rejects_bad_sizes():
    with pytest.raises(InvalidConfigError):
        Grid(1, 100)
    with pytest.raises(InvalidConfigError):
        Grid(1, 4)
    with pytest.raises(InvalidConfigError):
        Grid(3, 16)


def test_spacing_and_nyquist():
    g = Grid(1, 64, 2 * math.pi)
    assert g.spacing == 2 * math.pi / 64
    assert g.nyquist == 32


def test_dft_of_constant():
    g = Grid(1, 32)
    spec = dft(SampledFunction(g, np.ones(32)))
    c = spec.coefficients
    assert abs(spec.coefficient(0)) > 0
    assert np.count_nonzero(np.abs(c) > 1e-12) == 1


def test_dft_single_mode():
    g = Grid(1, 32)
    x = g.coordinates()[0]
    spec = dft(SampledFunction(g, np.exp(3j * x)))
    mags = np.abs(spec.coefficients)
    assert mags.argmax() == 3
    assert np.count_nonzero(mags > 1e-10) == 1


def test_roundtrip(rng):
    for dim, n in ((1, 128), (2, 16)):
        g = Grid(dim, n)
        vals = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        back = idft(dft(SampledFunction(g, vals))).values
        assert np.max(np.abs(back - vals)) <= 1e-12 * np.max(np.abs(vals))


def test_linearity(rng):
    g = Grid(1, 64)
    a, b = rng.standard_normal(64), rng.standard_normal(64)
    lhs = dft(SampledFunction(g, 2 * a - 3 * b)).coefficients
    rhs = 2 * dft(SampledFunction(g, a)).coefficients - 3 * dft(SampledFunction(g, b)).coefficients
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_quadrature_examples():
    g = Grid(1, 64)
    x = g.coordinates()[0]
    assert quadrature(SampledFunction(g, np.ones(64))) == pytest.approx(2 * math.pi, rel=1e-14)
    assert quadrature(SampledFunction(g, np.sin(x) ** 2)) == pytest.approx(math.pi, abs=1e-12)


def test_parseval(rng):
    g = Grid(2, 32)
    f = SampledFunction(g, rng.standard_normal(g.shape))
    lhs = quadrature(SampledFunction(g, np.abs(f.values) ** 2))
    assert lhs == pytest.approx(dft(f).energy(), rel=1e-10)


def test_shift_examples(rng):
    g = Grid(1, 64)
    x = g.coordinates()[0]
    f = SampledFunction(g, rng.standard_normal(64))
    assert np.allclose(periodic_shift_sample(f, 0.0).values, f.values, atol=1e-14)
    shifted = periodic_shift_sample(f, g.spacing).values
    assert np.max(np.abs(shifted - np.roll(f.values, -1))) < 1e-12
    e = SampledFunction(g, np.exp(1j * x))
    h = 0.37
    assert np.max(np.abs(periodic_shift_sample(e, h).values - np.exp(1j * h) * e.values)) < 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_shift_composes(h1, h2):
    g = Grid(1, 32)
    x = g.coordinates()[0]
    f = SampledFunction(g, np.cos(2 * x) + np.sin(5 * x))
    a = periodic_shift_sample(periodic_shift_sample(f, h1), h2).values
    b = periodic_shift_sample(f, h1 + h2).values
    assert np.max(np.abs(a - b)) < 1e-10


@given(st.lists(st.floats(-1e6, 1e6), min_size=16, max_size=16))
def test_quadrature_nonnegative(vals):
    g = Grid(1, 16)
    assert quadrature(SampledFunction(g, np.abs(vals))) >= 0


def test_csv_roundtrip(tmp_path, rng):
    for g in (Grid(1, 32), Grid(2, 8, 1.5)):
        vals = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        path = tmp_path / f"f{g.dim}.csv"
        write_csv(path, SampledFunction(g, vals))
        back = read_csv(path)
        assert back.grid == g
        assert np.array_equal(back.values, vals)


def test_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0\nabc\n")
    with pytest.raises(InvalidInputError, match=":2:"):
        read_csv(path)
    path.write_text("1\n2\n3\n4\n")
    with pytest.raises(InvalidConfigError):
        read_csv(path)


def test_sampled_function_rejects_nonfinite():
    g = Grid(1, 8)
    with pytest.raises(InvalidInputError):
        SampledFunction(g, np.array([np.nan] + [0.0] * 7))
    with pytest.raises(InvalidInputError):
        SampledFunction(g, np.zeros(16))
