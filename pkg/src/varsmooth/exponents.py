"""Variable exponents, smoothness functions and admissible weight sequences.

Exponents live on the same periodic grid as the functions they act on.
Continuum conditions (log-Hölder continuity, admissibility of weights) are
checked on sampled pairs of grid points, with the periodic distance in
place of the Euclidean one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError

__all__ = [
    "VariableExponent",
    "SmoothnessFunction",
    "WeightSequence",
    "AdmissibilityReport",
    "estimate_log_holder",
    "weights_from_smoothness",
    "two_microlocal_weights",
    "verify_admissible",
]

# Pair scans are exhaustive up to this many grid points; above it a seeded
# subsample of SAMPLED_PAIRS pairs is used.
EXHAUSTIVE_POINTS = 2048
SAMPLED_PAIRS = 1 << 17
_PAIR_SEED = 20100601
_TOL = 1e-12


def _offset_distance(shape, period, offset) -> float:
    n = shape[0]
    h = period / n
    return math.sqrt(sum((min(d, n - d) * h) ** 2 for d in offset))


def _offsets(shape):
    """Every nonzero index offset, modulo the symmetry d ~ -d in 1D."""
    n = shape[0]
    if len(shape) == 1:
        return [(d,) for d in range(1, n // 2 + 1)]
    return [(a, b) for a in range(n) for b in range(n) if (a, b) != (0, 0)]


def _sampled_pairs(shape, count, seed=_PAIR_SEED):
    rng = np.random.default_rng(seed)
    size = int(np.prod(shape))
    first = rng.integers(0, size, count)
    second = rng.integers(0, size, count)
    keep = first != second
    return np.unravel_index(first[keep], shape), np.unravel_index(second[keep], shape)


def _periodic_pair_distance(shape, period, idx_a, idx_b):
    n = shape[0]
    total = 0.0
    for a, b in zip(idx_a, idx_b):
        d = np.abs(a - b)
        total = total + (np.minimum(d, n - d) * (period / n)) ** 2
    return np.sqrt(total)


def estimate_log_holder(values, period: float = 2 * math.pi) -> float:
    """Grid estimate of the log-Hölder constant of a real grid function.

    Returns the maximum over distinct grid pairs of
    ``|g(x) - g(y)| * log(e + 1/dist(x, y))`` with the periodic distance.
    This is a lower estimate of the continuum constant.
    """
    g = np.asarray(values, dtype=float)
    if g.ndim not in (1, 2) or g.size < 2:
        raise InvalidInputError("need a 1D or 2D grid with at least 2 points")
    if not np.all(np.isfinite(g)):
        raise InvalidInputError("log-Hölder estimate needs finite samples")
    shape = g.shape
    if g.size <= EXHAUSTIVE_POINTS:
        best = 0.0
        for off in _offsets(shape):
            dist = _offset_distance(shape, period, off)
            diff = np.max(np.abs(g - np.roll(g, off, axis=tuple(range(g.ndim)))))
            best = max(best, float(diff) * math.log(math.e + 1.0 / dist))
        return best
    ia, ib = _sampled_pairs(shape, SAMPLED_PAIRS)
    dist = _periodic_pair_distance(shape, period, ia, ib)
    return float(np.max(np.abs(g[ia] - g[ib]) * np.log(math.e + 1.0 / dist)))


def _readonly(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


class VariableExponent:
    """Sampled variable exponent ``p(.)`` with values in ``(0, inf]``.

    Parameters
    ----------
    samples : array_like
        Exponent values on the grid; ``inf`` is allowed.
    period : float
        Torus period, used for the log-Hölder estimate of ``1/p``.
    floor : float, optional
        Declared lower bound; every sample must be at least this large.
    estimate_clog : bool
        Skip the pair scan for intermediate exponents when False; the
        estimate is then ``nan``.
    """

    def __init__(self, samples, period: float = 2 * math.pi, floor: float | None = None,
                 estimate_clog: bool = True):
        p = np.array(samples, dtype=float)
        if p.ndim not in (1, 2):
            raise InvalidInputError("exponent samples must be a 1D or 2D grid array")
        if np.any(np.isnan(p)) or np.any(p <= 0):
            raise InvalidInputError("exponent must take values in (0, inf]")
        if np.any(np.isneginf(p)):
            raise InvalidInputError("exponent must take values in (0, inf]")
        if floor is not None and np.any(p < floor):
            raise InvalidInputError(f"exponent falls below the declared floor {floor}")
        mask = np.isinf(p)
        finite = p[~mask]
        self.samples = _readonly(p)
        self.period = float(period)
        self.infinity_mask = mask
        self.infinity_mask.setflags(write=False)
        self.p_minus = float(finite.min()) if finite.size else math.inf
        self.p_plus = math.inf if mask.any() else float(finite.max())
        self.clog_estimate = (
            estimate_log_holder(np.where(mask, 0.0, 1.0 / np.where(mask, 1.0, p)), period)
            if estimate_clog else math.nan
        )

    @classmethod
    def constant(cls, value: float, shape, period: float = 2 * math.pi) -> "VariableExponent":
        return cls(np.full(shape, float(value)), period)

    @property
    def shape(self):
        return self.samples.shape

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus

    def __repr__(self):
        return f"VariableExponent(p_minus={self.p_minus:g}, p_plus={self.p_plus:g})"


class SmoothnessFunction:
    """Sampled smoothness function ``s(.)`` (any finite real values)."""

    def __init__(self, samples, period: float = 2 * math.pi):
        s = np.array(samples, dtype=float)
        if s.ndim not in (1, 2):
            raise InvalidInputError("smoothness samples must be a 1D or 2D grid array")
        if not np.all(np.isfinite(s)):
            raise InvalidInputError("smoothness must be finite")
        self.samples = _readonly(s)
        self.period = float(period)
        self.s_minus = float(s.min())
        self.s_plus = float(s.max())
        self.clog_estimate = estimate_log_holder(s, period)

    @classmethod
    def constant(cls, value: float, shape, period: float = 2 * math.pi) -> "SmoothnessFunction":
        return cls(np.full(shape, float(value)), period)

    @property
    def shape(self):
        return self.samples.shape

    @property
    def is_constant(self) -> bool:
        return self.s_minus == self.s_plus

    def __repr__(self):
        return f"SmoothnessFunction(s_minus={self.s_minus:g}, s_plus={self.s_plus:g})"


def _tight_constant(levels, period, alpha):
    """Smallest C with w_j(x) <= C w_j(y) (1 + 2^j |x-y|)^alpha on the grid."""
    J = levels.shape[0] - 1
    scale = 2.0 ** np.arange(J + 1)
    shape = levels.shape[1:]
    axes = tuple(range(1, levels.ndim))
    best = 1.0
    if int(np.prod(shape)) <= EXHAUSTIVE_POINTS:
        for off in _offsets(shape):
            dist = _offset_distance(shape, period, off)
            other = np.roll(levels, off, axis=axes)
            denom = (1.0 + scale * dist) ** alpha
            ratio = np.maximum(levels / other, other / levels).reshape(J + 1, -1).max(axis=1)
            best = max(best, float(np.max(ratio / denom)))
        return best
    ia, ib = _sampled_pairs(shape, SAMPLED_PAIRS)
    dist = _periodic_pair_distance(shape, period, ia, ib)
    a = levels[(slice(None),) + tuple(ia)]
    b = levels[(slice(None),) + tuple(ib)]
    denom = (1.0 + scale[:, None] * dist[None, :]) ** alpha
    return max(best, float(np.max(np.maximum(a / b, b / a) / denom)))


def _tight_alpha(levels, period):
    """Smallest alpha >= 0 validating condition (i) with C = 1."""
    J = levels.shape[0] - 1
    scale = 2.0 ** np.arange(J + 1)
    shape = levels.shape[1:]
    axes = tuple(range(1, levels.ndim))
    logs = np.log(levels)
    best = 0.0
    if int(np.prod(shape)) <= EXHAUSTIVE_POINTS:
        for off in _offsets(shape):
            dist = _offset_distance(shape, period, off)
            diff = np.abs(logs - np.roll(logs, off, axis=axes)).reshape(J + 1, -1).max(axis=1)
            best = max(best, float(np.max(diff / np.log1p(scale * dist))))
        return best
    ia, ib = _sampled_pairs(shape, SAMPLED_PAIRS)
    dist = _periodic_pair_distance(shape, period, ia, ib)
    diff = np.abs(logs[(slice(None),) + tuple(ia)] - logs[(slice(None),) + tuple(ib)])
    return max(best, float(np.max(diff / np.log1p(scale[:, None] * dist[None, :]))))


def _growth_exponents(levels):
    if levels.shape[0] < 2:
        return math.nan, math.nan
    steps = np.log2(levels[1:] / levels[:-1])
    return float(steps.min()), float(steps.max())


class WeightSequence:
    """Per-level weights ``w_0 .. w_J`` with declared admissibility exponents.

    The constructor only validates positivity; use :func:`verify_admissible`
    to check the declared ``(alpha, alpha1, alpha2, fitted_C)`` against the
    grid.
    """

    def __init__(self, levels, alpha: float, alpha1: float, alpha2: float,
                 fitted_C: float | None = None, period: float = 2 * math.pi):
        w = np.array(levels, dtype=float)
        if w.ndim not in (2, 3) or w.shape[0] < 1:
            raise InvalidInputError("levels must be a nonempty stack of grid arrays")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidInputError("weights must be finite and strictly positive")
        if alpha < 0:
            raise InvalidInputError("alpha must be nonnegative")
        self.levels = _readonly(w)
        self.period = float(period)
        self.alpha = float(alpha)
        self.alpha1 = float(alpha1)
        self.alpha2 = float(alpha2)
        self.fitted_C = float(_tight_constant(w, period, alpha) if fitted_C is None else fitted_C)

    @property
    def J(self) -> int:
        return self.levels.shape[0] - 1

    @property
    def shape(self):
        return self.levels.shape[1:]

    def level(self, k: int) -> np.ndarray:
        """Weight at level ``k``; negative levels extrapolate as ``w_0 2^(-|k| alpha1)``."""
        if k < 0:
            return self.levels[0] * 2.0 ** (k * self.alpha1)
        if k > self.J:
            raise InvalidInputError(f"weight sequence has levels 0..{self.J}, level {k} requested")
        return self.levels[k]

    def __repr__(self):
        return (f"WeightSequence(J={self.J}, alpha={self.alpha:g}, "
                f"alpha1={self.alpha1:g}, alpha2={self.alpha2:g}, C={self.fitted_C:g})")


@dataclass(frozen=True)
class AdmissibilityReport:
    passes: bool
    fitted_C: float
    tight_alpha1: float
    tight_alpha2: float


def verify_admissible(w: WeightSequence) -> AdmissibilityReport:
    """Check both admissibility conditions of ``w`` on the grid.

    Condition (ii) is read off level ratios exactly; condition (i) is
    checked over grid pairs with the declared ``alpha``.
    """
    if np.any(w.levels <= 0):
        raise InvalidInputError("nonpositive weight value")
    a1, a2 = _growth_exponents(w.levels)
    tight_C = _tight_constant(w.levels, w.period, w.alpha)
    ok = tight_C <= w.fitted_C * (1 + _TOL)
    if w.J >= 1:
        ok = ok and w.alpha1 <= a1 + _TOL and w.alpha2 >= a2 - _TOL
    return AdmissibilityReport(bool(ok), tight_C, a1, a2)


def weights_from_smoothness(s: SmoothnessFunction, J: int) -> WeightSequence:
    """Weights ``w_j(x) = 2^(j s(x))`` for ``j = 0..J``.

    ``alpha1 = s_minus``, ``alpha2 = s_plus`` and ``alpha`` is the
    log-Hölder estimate of ``s``.
    """
    if J < 0:
        raise InvalidInputError("J must be nonnegative")
    j = np.arange(J + 1).reshape((-1,) + (1,) * s.samples.ndim)
    levels = 2.0 ** (j * s.samples[None])
    return WeightSequence(levels, s.clog_estimate, s.s_minus, s.s_plus, period=s.period)


def two_microlocal_weights(s: float, sprime: float, x0, J: int, grid) -> WeightSequence:
    """Weights ``w_j(x) = 2^(j s) (1 + 2^j |x - x0|)^s'`` with fitted exponents."""
    if J < 0:
        raise InvalidInputError("J must be nonnegative")
    dist = grid.distance_to(x0)
    j = np.arange(J + 1).reshape((-1,) + (1,) * grid.dim)
    levels = 2.0 ** (j * s) * (1.0 + 2.0**j * dist[None]) ** sprime
    if J >= 1:
        a1, a2 = _growth_exponents(levels)
    else:
        a1 = a2 = float(s)
    alpha = _tight_alpha(levels, grid.period) if sprime != 0 else 0.0
    return WeightSequence(levels, alpha, a1, a2, period=grid.period)
