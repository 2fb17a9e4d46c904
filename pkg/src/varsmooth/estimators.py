"""scikit-learn style wrappers around the decomposition and the norms.

Samples are rows: ``X`` has shape ``(n_samples,) + grid.shape``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .differences import (
    besov_norm_differences,
    besov_norm_differences_2ml,
    check_conditions,
    difference_range,
    tl_norm_differences,
    tl_norm_differences_2ml,
)
from .exceptions import InvalidConfigError, PreconditionError
from .exponents import two_microlocal_weights, weights_from_smoothness
from .frequency import (
    _block_array,
    besov_norm_fourier,
    build_local_means_kernels,
    build_resolution_of_unity,
    default_levels,
    local_means_norm,
    peetre_norm,
    resolve_peetre_parameter,
    tl_norm_fourier,
)
from .grid import Grid, SampledFunction
from .validation import as_exponent, as_smoothness, check_samples

__all__ = ["LittlewoodPaleyTransformer", "FunctionSpaceNorm"]


def _grid_from(X, dim, period):
    """Grid matching the trailing axes of ``X``."""
    arr = np.asarray(X)
    if arr.ndim < dim:
        raise InvalidConfigError(f"expected at least {dim} axes, got shape {arr.shape}")
    return Grid(dim, arr.shape[-1], period)


class LittlewoodPaleyTransformer(TransformerMixin, BaseEstimator):
    """Split samples into dyadic frequency blocks.

    Parameters
    ----------
    dim : int
        Spatial dimension of each sample.
    period : float
        Torus period.
    J : int, optional
        Top level; defaults to the largest level the grid resolves.
    magnitude : bool
        Return ``|block|`` instead of the complex blocks.

    Attributes
    ----------
    grid_ : Grid
    bank_ : FilterBank
    """

    def __init__(self, dim=1, period=2 * math.pi, J=None, magnitude=False):
        self.dim = dim
        self.period = period
        self.J = J
        self.magnitude = magnitude

    def fit(self, X, y=None):
        self.grid_ = _grid_from(X, self.dim, self.period)
        check_samples(X, self.grid_)
        self.bank_ = build_resolution_of_unity(self.grid_, self.J)
        return self

    def transform(self, X):
        """Blocks of shape ``(n_samples, J + 1) + grid.shape``."""
        check_is_fitted(self, "bank_")
        arr = check_samples(X, self.grid_)
        blocks = _block_array(arr[:, None], self.bank_)
        return np.abs(blocks) if self.magnitude else blocks

    def inverse_transform(self, B):
        """Sum the blocks back into samples."""
        check_is_fitted(self, "bank_")
        return np.asarray(B).sum(axis=1)


class FunctionSpaceNorm(TransformerMixin, BaseEstimator):
    """Besov or Triebel-Lizorkin norm of each sample by a chosen method.

    Parameters
    ----------
    flavor : {"besov", "tl"}
    method : {"fourier", "peetre", "localmeans", "differences"}
    s, p, q : float, array or expression text
        Smoothness and integrability exponents on the sample grid.
    weights : str, optional
        ``"2ml:<s>,<s'>,<x0>"`` replaces ``s`` by two-microlocal weights.
    M : int
        Difference order.
    J : int, optional
        Number of dyadic levels.
    a : "auto" or float
        Peetre parameter.
    R : int
        Moment order of the local-means kernel.
    radius : float
        Local-means support radius.
    strict : bool
        Raise :class:`PreconditionError` in ``fit`` when the hypotheses of
        the difference characterization fail.

    Attributes
    ----------
    grid_, weights_, p_, q_, conditions_
    """

    def __init__(self, flavor="besov", method="fourier", s=1.0, p=2.0, q=2.0, weights=None, M=2, J=None,
                 a="auto", R=2, radius=1.0, dim=1, period=2 * math.pi, strict=True):
        self.flavor = flavor
        self.method = method
        self.s = s
        self.p = p
        self.q = q
        self.weights = weights
        self.M = M
        self.J = J
        self.a = a
        self.R = R
        self.radius = radius
        self.dim = dim
        self.period = period
        self.strict = strict

    def fit(self, X, y=None):
        if self.flavor not in ("besov", "tl"):
            raise InvalidConfigError(f"flavor must be besov or tl, got {self.flavor!r}")
        if self.method not in ("fourier", "peetre", "localmeans", "differences"):
            raise InvalidConfigError(f"unknown method {self.method!r}")
        grid = _grid_from(X, self.dim, self.period)
        check_samples(X, grid)
        J = default_levels(grid) if self.J is None else self.J
        self.p_ = as_exponent(self.p, grid, "p", self.flavor)
        self.q_ = as_exponent(self.q, grid, "q", self.flavor)
        if self.weights:
            from .harness import _parse_weights

            ws, wsp, wx0 = _parse_weights(self.weights)
            self.s_ = None
            self.weights_ = two_microlocal_weights(ws, wsp, wx0 if len(wx0) > 1 else wx0[0], J, grid)
            gate = self.weights_
        else:
            self.s_ = as_smoothness(self.s, grid)
            self.weights_ = weights_from_smoothness(self.s_, J)
            gate = self.s_
        self.conditions_ = check_conditions(gate, self.p_, self.q_, self.M, self.flavor)
        if self.strict and not self.conditions_.ok:
            raise PreconditionError("violated: " + "; ".join(self.conditions_.violated))
        self.J_ = J
        if self.method in ("fourier", "peetre"):
            self.bank_ = build_resolution_of_unity(grid, J)
        if self.method == "peetre":
            self.a_ = resolve_peetre_parameter(self.a, self.p_, self.q_, self.weights_.alpha, self.flavor,
                                               grid.dim)
        if self.method == "localmeans":
            self.kernels_ = build_local_means_kernels(grid, self.R, self.radius)
        self.grid_ = grid
        return self

    def _norm(self, f):
        w, p, q = self.weights_, self.p_, self.q_
        if self.method == "fourier":
            fn = besov_norm_fourier if self.flavor == "besov" else tl_norm_fourier
            return fn(f, w, p, q, self.bank_)
        if self.method == "peetre":
            return peetre_norm(f, w, p, q, self.a_, self.flavor, self.bank_)
        if self.method == "localmeans":
            return local_means_norm(f, self.kernels_, w, p, q, self.flavor, self.J_)
        k_range = difference_range(self.grid_, (-self.J_, self.J_))
        if self.s_ is not None:
            fn = besov_norm_differences if self.flavor == "besov" else tl_norm_differences
            return fn(f, self.s_, p, q, self.M, k_range, strict=False)
        fn = besov_norm_differences_2ml if self.flavor == "besov" else tl_norm_differences_2ml
        return fn(f, w, p, q, self.M, k_range, strict=False)

    def transform(self, X):
        """Norms as a column of shape ``(n_samples, 1)``."""
        check_is_fitted(self, "grid_")
        arr = check_samples(X, self.grid_)
        return np.array([[self._norm(SampledFunction(self.grid_, row))] for row in arr])
