"""Modulars and Luxemburg norms of L_p(.), l_q(.)(L_p(.)) and L_p(.)(l_q(.)).

All solvers are monotone geometric bisections on the scaling parameter:
every modular here is nonincreasing in ``lambda``, so a bracket that
straddles the level 1 always contains the infimum. Iteration stops once the
bracket's relative width is below ``1e-12``.

The ``*_array`` functions operate on nonnegative arrays whose trailing axes
are the grid and whose leading axes are an arbitrary batch; the public
functions wrap them for :class:`~varsmooth.grid.SampledFunction` inputs.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import GridMismatchError, InvalidInputError, NumericFailureError
from .exponents import VariableExponent
from .grid import Grid, SampledFunction

__all__ = [
    "FunctionSequence",
    "modular_lp",
    "luxemburg_norm",
    "modular_lqlp",
    "norm_lqlp",
    "norm_lplq",
    "luxemburg_array",
    "modular_lqlp_array",
    "lqlp_norm_array",
    "lplq_norm_array",
]

REL_WIDTH = 1e-12
MAX_ITER = 200
_EXP_LIMIT = 1000  # bracket search stops at 2**(+-_EXP_LIMIT)


class FunctionSequence:
    """Finite window ``(f_nu)`` of functions on one grid.

    ``index_origin`` is the index of the first term, so windows of
    ``nu in Z`` are represented as well as ``nu in N_0``.
    """

    def __init__(self, grid: Grid, values, index_origin: int = 0):
        arr = np.array(values, dtype=complex)
        if arr.ndim != grid.dim + 1 or arr.shape[1:] != grid.shape or arr.shape[0] == 0:
            raise InvalidInputError(f"expected a nonempty stack of {grid.shape} arrays, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("sequence contains non-finite values")
        arr.setflags(write=False)
        self.grid = grid
        self.values = arr
        self.index_origin = int(index_origin)

    @classmethod
    def from_functions(cls, terms, index_origin: int = 0) -> "FunctionSequence":
        terms = list(terms)
        if not terms:
            raise InvalidInputError("sequence must be nonempty")
        grid = terms[0].grid
        if any(t.grid != grid for t in terms):
            raise GridMismatchError("all terms must share one grid")
        return cls(grid, np.stack([t.values for t in terms]), index_origin)

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, nu: int) -> SampledFunction:
        return SampledFunction(self.grid, self.values[nu - self.index_origin])

    @property
    def indices(self) -> range:
        return range(self.index_origin, self.index_origin + len(self))

    def __mul__(self, c):
        return FunctionSequence(self.grid, self.values * c, self.index_origin)

    __rmul__ = __mul__


# -- exponent helpers -------------------------------------------------------


def _check_exponent(p: VariableExponent, grid: Grid, name="p"):
    if p.shape != grid.shape:
        raise GridMismatchError(f"exponent {name} has shape {p.shape}, grid expects {grid.shape}")


def _grid_axes(ndim_total, grid_ndim):
    return tuple(range(ndim_total - grid_ndim, ndim_total))


def _modular(a, p: VariableExponent, dV):
    """``sum phi_p(x)(a(x)) dV`` over the trailing grid axes of ``a >= 0``."""
    axes = _grid_axes(a.ndim, p.samples.ndim)
    mask = p.infinity_mask
    if mask.any():
        pf = np.where(mask, 1.0, p.samples)
        with np.errstate(over="ignore"):
            terms = np.where(mask, 0.0, a**pf)
        total = np.sum(terms, axis=axes) * dV
        blown = np.any(np.where(mask, a, 0.0) > 1.0, axis=axes)
        return np.where(blown, np.inf, total)
    with np.errstate(over="ignore"):
        return np.sum(a**p.samples, axis=axes) * dV


def _bisect(fun, lo, hi):
    """Smallest ``lam`` in ``[lo, hi]`` with ``fun(lam) <= 1``, elementwise.

    Requires ``fun(lo) > 1 >= fun(hi)`` and ``fun`` nonincreasing.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(MAX_ITER):
        active = hi > lo * (1.0 + REL_WIDTH)
        if not np.any(active):
            return hi
        mid = np.sqrt(lo) * np.sqrt(hi)
        ok = fun(mid) <= 1.0
        hi = np.where(active & ok, mid, hi)
        lo = np.where(active & ~ok, mid, lo)
    raise NumericFailureError(f"bisection did not reach relative width {REL_WIDTH} in {MAX_ITER} iterations")


def _solve(fun, shape):
    """``inf{lam > 0 : fun(lam) <= 1}`` without an a-priori bracket.

    The bracket is found by probing ``2**(+-2**i)``; the result is ``0``
    when every probed ``lam`` satisfies the constraint and ``inf`` when none
    does.
    """
    ones = np.ones(shape)
    at_one = fun(ones) <= 1.0
    lo = np.where(at_one, 0.0, 1.0)
    hi = np.where(at_one, 1.0, np.inf)
    step = 1
    while step <= _EXP_LIMIT:
        need_hi = np.isinf(hi)
        need_lo = lo == 0.0
        if not (need_hi.any() or need_lo.any()):
            break
        if need_hi.any():
            probe = np.where(need_hi, lo * 2.0**step, 1.0)
            ok = fun(probe) <= 1.0
            hi = np.where(need_hi & ok, probe, hi)
            lo = np.where(need_hi & ~ok, probe, lo)
        if need_lo.any():
            probe = np.where(need_lo, hi * 2.0**-step, 1.0)
            ok = fun(probe) <= 1.0
            lo = np.where(need_lo & ~ok, probe, lo)
            hi = np.where(need_lo & ok, probe, hi)
        step *= 2
    zero = lo == 0.0
    never = np.isinf(hi)
    lo_safe = np.where(zero | never, 1.0, lo)
    hi_safe = np.where(zero | never, 1.0, hi)
    out = _bisect(lambda lam: np.where(zero | never, 0.0, fun(lam)), lo_safe, hi_safe)
    out = np.where(zero, 0.0, out)
    return np.where(never, np.inf, out)


# -- L_p(.) -----------------------------------------------------------------


def luxemburg_array(a, p: VariableExponent, dV: float):
    """Luxemburg norm of each batch element of the nonnegative array ``a``.

    The bracket is analytic: with ``amax = max a`` and ``x*`` its location,
    ``0.5 amax min(1, dV^(1/p(x*)))`` violates the unit-ball constraint and
    ``amax max(1, vol^(1/p_minus))`` satisfies it.
    """
    a = np.asarray(a, dtype=float)
    nd = p.samples.ndim
    batch = a.shape[: a.ndim - nd]
    flat = a.reshape(batch + (-1,))
    amax = flat.max(axis=-1)
    zero = amax == 0
    vol = dV * flat.shape[-1]
    pflat = p.samples.ravel()
    p_star = pflat[flat.argmax(axis=-1)]
    with np.errstate(divide="ignore"):
        lo_fac = np.where(np.isinf(p_star), 1.0, np.minimum(1.0, dV ** (1.0 / np.where(np.isinf(p_star), 1.0, p_star))))
    hi_fac = 1.0 if math.isinf(p.p_minus) else max(1.0, vol ** (1.0 / p.p_minus))
    safe = np.where(zero, 1.0, amax)
    lo = 0.5 * safe * lo_fac
    hi = safe * hi_fac
    expand = (Ellipsis,) + (None,) * nd

    def fun(lam):
        return np.where(zero, 0.0, _modular(a / lam[expand], p, dV))

    return np.where(zero, 0.0, _bisect(fun, lo, hi))


def modular_lp(f: SampledFunction, p: VariableExponent) -> float:
    """Modular of ``f`` in L_p(.): ``+inf`` if ``|f| > 1`` somewhere ``p = inf``."""
    _check_exponent(p, f.grid)
    return float(_modular(f.abs(), p, f.grid.cell_volume))


def luxemburg_norm(f: SampledFunction, p: VariableExponent) -> float:
    """``inf{lambda > 0 : modular_lp(f / lambda) <= 1}``."""
    _check_exponent(p, f.grid)
    return float(luxemburg_array(f.abs(), p, f.grid.cell_volume))


# -- l_q(.)(L_p(.)) -------------------------------------------------------------


def _inner_general(a, p: VariableExponent, q: VariableExponent, dV):
    """Per-term ``inf{lam : rho_p(a / lam^(1/q)) <= 1}``; ``lam^(1/inf) = 1``."""
    nd = p.samples.ndim
    inv_q = np.where(q.infinity_mask, 0.0, 1.0 / np.where(q.infinity_mask, 1.0, q.samples))
    batch = a.shape[: a.ndim - nd]
    expand = (Ellipsis,) + (None,) * nd
    zero = a.reshape(batch + (-1,)).max(axis=-1) == 0

    def fun(lam):
        with np.errstate(divide="ignore", over="ignore"):
            return _modular(a / lam[expand] ** inv_q, p, dV)

    return np.where(zero, 0.0, _solve(fun, batch))


def _inner_fast(a, p: VariableExponent, q: VariableExponent, dV):
    """Per-term ``|| a^q | L_{p/q} ||`` (requires ``q_plus < inf``)."""
    r = VariableExponent(p.samples / q.samples, p.period, estimate_clog=False)
    with np.errstate(over="ignore"):
        return luxemburg_array(a**q.samples, r, dV)


def modular_lqlp_array(a, p, q, dV, path="auto"):
    """l_q(.)(L_p(.)) modular of sequences ``a`` with shape ``batch + (K,) + grid``."""
    if path == "auto":
        path = "fast" if math.isfinite(q.p_plus) else "general"
    if path == "fast":
        if not math.isfinite(q.p_plus):
            raise InvalidInputError("the fast path needs q_plus < inf")
        inner = _inner_fast(a, p, q, dV)
    elif path == "general":
        inner = _inner_general(a, p, q, dV)
    else:
        raise InvalidInputError(f"unknown path {path!r}")
    return inner.sum(axis=-1)


def lqlp_norm_array(a, p: VariableExponent, q: VariableExponent, dV: float, path="auto"):
    """l_q(.)(L_p(.)) norm of each batch element of ``a`` (shape ``batch + (K,) + grid``)."""
    a = np.asarray(a, dtype=float)
    nd = p.samples.ndim
    batch = a.shape[: a.ndim - nd - 1]
    expand = (Ellipsis,) + (None,) * (nd + 1)
    zero = a.reshape(batch + (-1,)).max(axis=-1) == 0
    if path == "auto":
        path = "fast" if math.isfinite(q.p_plus) else "general"

    def fun(mu):
        return np.where(zero, 0.0, modular_lqlp_array(a / mu[expand], p, q, dV, path))

    if path == "fast":
        # modular(a/mu) lies between mu^-q_plus S and mu^-q_minus S, S = modular(a)
        s = np.where(zero, 1.0, modular_lqlp_array(a, p, q, dV, path))
        e1 = s ** (1.0 / q.p_plus)
        e2 = s ** (1.0 / q.p_minus)
        lo = np.minimum(e1, e2) * (1 - 1e-9)
        hi = np.maximum(e1, e2) * (1 + 1e-9)
        lo = np.where(fun(lo) > 1, lo, lo * 0.5)
        hi = np.where(fun(hi) <= 1, hi, hi * 2.0)
        out = _bisect(fun, lo, hi)
    else:
        out = _solve(fun, batch)
    return np.where(zero, 0.0, out)


def _pointwise_lq(a, q: VariableExponent):
    """``|| (a_nu(x))_nu | l_q(x) ||`` over axis -1-grid_ndim."""
    nd = q.samples.ndim
    axis = a.ndim - nd - 1
    peak = a.max(axis=axis)
    safe = np.where(peak > 0, peak, 1.0)
    scaled = a / np.expand_dims(safe, axis)
    qf = np.where(q.infinity_mask, 1.0, q.samples)
    with np.errstate(divide="ignore"):
        summed = np.sum(scaled**qf, axis=axis) ** (1.0 / qf)
    return np.where(q.infinity_mask, peak, summed * peak)


def lplq_norm_array(a, p: VariableExponent, q: VariableExponent, dV: float):
    """L_p(.)(l_q(.)) norm of each batch element of ``a`` (shape ``batch + (K,) + grid``)."""
    return luxemburg_array(_pointwise_lq(np.asarray(a, dtype=float), q), p, dV)


def _check_sequence(fs: FunctionSequence, p, q):
    _check_exponent(p, fs.grid, "p")
    _check_exponent(q, fs.grid, "q")


def modular_lqlp(fs: FunctionSequence, p: VariableExponent, q: VariableExponent, path="auto") -> float:
    """Modular of ``fs`` in l_q(.)(L_p(.)).

    ``path="general"`` sums the per-term infima ``inf{lam : rho_p(f / lam^(1/q)) <= 1}``;
    ``path="fast"`` (``q_plus < inf``) sums ``|| |f|^q | L_{p/q} ||``.
    """
    _check_sequence(fs, p, q)
    return float(modular_lqlp_array(np.abs(fs.values), p, q, fs.grid.cell_volume, path))


def norm_lqlp(fs: FunctionSequence, p: VariableExponent, q: VariableExponent, path="auto") -> float:
    _check_sequence(fs, p, q)
    return float(lqlp_norm_array(np.abs(fs.values), p, q, fs.grid.cell_volume, path))


def norm_lplq(fs: FunctionSequence, p: VariableExponent, q: VariableExponent) -> float:
    """Pointwise l_q(x) aggregation over the sequence, then the L_p(.) norm."""
    _check_sequence(fs, p, q)
    return float(lplq_norm_array(np.abs(fs.values), p, q, fs.grid.cell_volume))
