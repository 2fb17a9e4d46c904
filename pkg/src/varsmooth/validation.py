"""Input coercion shared by the estimator layer."""

from __future__ import annotations

import numpy as np

from .exceptions import GridMismatchError, InvalidInputError
from .exponents import SmoothnessFunction, VariableExponent
from .expression import ExponentExpression, evaluate_on_grid, parse_expression, validate_role
from .grid import Grid


def check_samples(X, grid: Grid) -> np.ndarray:
    """Return ``X`` as a complex array of shape ``(n_samples,) + grid.shape``.

    A single sample without the leading axis is accepted.
    """
    arr = np.asarray(X)
    if arr.dtype == object or not (np.issubdtype(arr.dtype, np.number) or arr.dtype == bool):
        raise InvalidInputError("samples must be numeric")
    arr = arr.astype(complex)
    if arr.shape == grid.shape:
        arr = arr[None]
    if arr.shape[1:] != grid.shape:
        raise GridMismatchError(f"samples of shape {arr.shape[1:]} do not match grid {grid.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("samples must be finite")
    return arr


def _values(spec, grid: Grid, role: str, flavor: str) -> np.ndarray:
    if isinstance(spec, str):
        spec = parse_expression(spec)
    if isinstance(spec, ExponentExpression):
        return validate_role(evaluate_on_grid(spec, grid), role, flavor)
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 0:
        arr = np.full(grid.shape, float(arr))
    if arr.shape != grid.shape:
        raise GridMismatchError(f"{role} has shape {arr.shape}, grid is {grid.shape}")
    return validate_role(arr, role, flavor)


def as_exponent(spec, grid: Grid, role: str = "p", flavor: str = "besov") -> VariableExponent:
    """Coerce a number, grid array, expression text or exponent object."""
    if isinstance(spec, VariableExponent):
        if spec.shape != grid.shape:
            raise GridMismatchError(f"{role} has shape {spec.shape}, grid is {grid.shape}")
        return spec
    return VariableExponent(_values(spec, grid, role, flavor), grid.period)


def as_smoothness(spec, grid: Grid) -> SmoothnessFunction:
    if isinstance(spec, SmoothnessFunction):
        if spec.shape != grid.shape:
            raise GridMismatchError(f"s has shape {spec.shape}, grid is {grid.shape}")
        return spec
    return SmoothnessFunction(_values(spec, grid, "s", "besov"), grid.period)
