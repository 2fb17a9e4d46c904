import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from varsmooth import (
    FunctionSpaceNorm,
    Grid,
    GridMismatchError,
    InvalidInputError,
    LittlewoodPaleyTransformer,
    PreconditionError,
    SampledFunction,
    besov_norm_fourier,
    make_family_sample,
    weights_from_smoothness,
)
from varsmooth.validation import as_exponent, as_smoothness, check_samples


@pytest.fixture
def X():
    g = Grid(1, 256)
    return np.stack([make_family_sample("band_limited_random", g, 2, i).values for i in range(4)])


def test_lp_transformer(X):
    lp = LittlewoodPaleyTransformer()
    B = lp.fit(X).transform(X)
    assert B.shape == (4, 7, 256)
    assert np.max(np.abs(lp.inverse_transform(B) - X)) < 1e-10
    assert np.all(LittlewoodPaleyTransformer(magnitude=True).fit_transform(X) >= 0)
    with pytest.raises(NotFittedError):
        LittlewoodPaleyTransformer().transform(X)


def test_norm_matches_function(X):
    g = Grid(1, 256)
    est = FunctionSpaceNorm(s=1.0, p=2.0, q=2.0).fit(X)
    got = est.transform(X)
    assert got.shape == (4, 1)
    w = weights_from_smoothness(as_smoothness(1.0, g), 6)
    two = as_exponent(2.0, g)
    ref = besov_norm_fourier(SampledFunction(g, X[0]), w, two, two)
    assert got[0, 0] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("method", ["fourier", "peetre", "localmeans", "differences"])
def test_methods_and_expressions(X, method):
    est = FunctionSpaceNorm(method=method, flavor="tl", s="1 + 0.2*sin(x)", p="2 + 0.5*cos(x)", q=2.0)
    vals = est.fit_transform(X).ravel()
    assert np.all(np.isfinite(vals)) and np.all(vals > 0)


def test_weights_param(X):
    vals = FunctionSpaceNorm(weights="2ml:1,-0.5,0", method="differences").fit_transform(X)
    assert np.all(vals > 0)


def test_strict_gate(X):
    with pytest.raises(PreconditionError):
        FunctionSpaceNorm(s=2.5, M=2).fit(X)
    est = FunctionSpaceNorm(s=2.5, M=2, strict=False).fit(X)
    assert not est.conditions_.ok


def test_params_and_clone():
    est = FunctionSpaceNorm(M=3, p="2")
    assert clone(est).get_params() == est.get_params()
    assert est.set_params(M=4).M == 4


def test_validation_helpers():
    g = Grid(1, 16)
    assert check_samples(np.ones(16), g).shape == (1, 16)
    assert check_samples(np.ones((3, 16)) * 1j, g).dtype == complex
    with pytest.raises(GridMismatchError):
        check_samples(np.ones((3, 8)), g)
    with pytest.raises(InvalidInputError):
        check_samples(np.array([np.inf] * 16), g)
    with pytest.raises(InvalidInputError):
        check_samples(np.array(["a"] * 16), g)
    assert as_exponent("2 + 0*x", g).p_minus == 2
    assert as_exponent(np.full(16, 3.0), g).p_plus == 3
    with pytest.raises(GridMismatchError):
        as_exponent(np.ones(8), g)
    with pytest.raises(InvalidInputError):
        as_exponent(-1.0, g)
