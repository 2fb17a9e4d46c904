"""Finite differences, ball means of differences and the norms built on them.

Ball means ``d^M_t f(x) = t^-n int_{|h| <= t} |Delta^M_h f(x)| dh`` are computed
by integrating the piecewise-(bi)linear interpolant of ``h -> |Delta^M_h f(x)|``
over the ball. The interpolation lattice is the grid itself when the ball
holds at least four grid spacings; below that a lattice of spacing ``t/16``
is used and the off-grid shifts are spectral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import GridMismatchError, InvalidConfigError, PreconditionError
from .exponents import SmoothnessFunction, VariableExponent, WeightSequence
from .frequency import default_levels, mixed_norm
from .grid import Grid, SampledFunction, shift_multiplier
from .lebesgue import luxemburg_array

__all__ = [
    "ConditionReport",
    "finite_difference",
    "ball_means",
    "ball_means_array",
    "difference_range",
    "t_ladder",
    "difference_multiplier",
    "besov_norm_differences",
    "tl_norm_differences",
    "tl_norm_differences_continuous",
    "besov_norm_differences_2ml",
    "tl_norm_differences_2ml",
    "check_conditions",
    "sigma_p",
    "sigma_pq",
]

SUBLATTICE = 16  # lattice nodes per radius below the grid-lattice switch
SWITCH = 4  # grid offsets are used once t >= SWITCH * spacing
SUPERSAMPLE = 8  # midpoints per lattice cell for 2D ball weights


def _binomials(M):
    return [(-1) ** j * math.comb(M, j) for j in range(M + 1)]


def _check_order(M):
    if not isinstance(M, (int, np.integer)) or M < 1:
        raise InvalidConfigError(f"difference order M must be a positive integer, got {M!r}")


def difference_multiplier(grid: Grid, h, M: int) -> np.ndarray:
    """Spectral symbol of ``Delta^M_h`` as the alternating binomial sum of shifts."""
    total = np.zeros(grid.shape, dtype=complex)
    for j, c in enumerate(_binomials(M)):
        total += c * shift_multiplier(grid, np.multiply(M - j, h))
    return total


def finite_difference(f: SampledFunction, h, M: int) -> SampledFunction:
    """``sum_j (-1)^j binom(M, j) f(x + (M - j) h)`` with spectral shifts."""
    _check_order(M)
    spec = np.fft.fftn(f.values) * difference_multiplier(f.grid, h, M)
    return SampledFunction(f.grid, np.fft.ifftn(spec))


def _grid_difference(values, offset, M):
    """``Delta^M`` for an integer grid offset, by array rotation (exact)."""
    axes = tuple(range(values.ndim))
    out = np.zeros_like(values)
    for j, c in enumerate(_binomials(M)):
        shift = tuple(-(M - j) * o for o in offset)
        out = out + c * np.roll(values, shift, axis=axes)
    return out


def _hat_integral(u):
    """Integral of the unit hat function over ``(-inf, u]``."""
    u = np.clip(u, -1.0, 1.0)
    return np.where(u < 0, 0.5 * (u + 1.0) ** 2, 1.0 - 0.5 * (1.0 - u) ** 2)


@lru_cache(maxsize=256)
def _ball_weights(dim: int, radius_cells: float):
    """Lattice nodes and weights integrating the linear interpolant over a ball.

    Units are lattice cells: the ball has radius ``radius_cells`` and the
    weights sum to its volume.
    """
    reach = int(math.ceil(radius_cells)) + 1
    if dim == 1:
        m = np.arange(-reach, reach + 1)
        w = _hat_integral(radius_cells - m) - _hat_integral(-radius_cells - m)
        keep = w > 0
        return m[keep][:, None], w[keep]
    # 2D: midpoint supersampling of the ball, bilinear hat weights to the 4 corners
    step = 1.0 / SUPERSAMPLE
    c = np.arange(-reach * SUPERSAMPLE, reach * SUPERSAMPLE) * step + step / 2
    u, v = np.meshgrid(c, c, indexing="ij")
    inside = u**2 + v**2 <= radius_cells**2
    u, v = u[inside], v[inside]
    iu, iv = np.floor(u).astype(int), np.floor(v).astype(int)
    fu, fv = u - iu, v - iv
    size = 2 * reach + 2
    acc = np.zeros((size, size))
    for du, wu in ((0, 1 - fu), (1, fu)):
        for dv, wv in ((0, 1 - fv), (1, fv)):
            np.add.at(acc, (iu + du + reach, iv + dv + reach), wu * wv * step**2)
    nodes = np.argwhere(acc > 0)
    return nodes - reach, acc[acc > 0]


def ball_means_array(values, grid: Grid, t: float, M: int) -> np.ndarray:
    """Real array of ``d^M_t f`` for complex samples ``values``."""
    _check_order(M)
    if not t > 0:
        raise InvalidConfigError(f"ball radius t must be positive, got {t}")
    if t > grid.period / 4 * (1 + 1e-12):
        raise InvalidConfigError(f"ball radius t = {t:g} exceeds a quarter period ({grid.period / 4:g})")
    out = np.zeros(grid.shape)
    if t >= SWITCH * grid.spacing:
        nodes, weights = _ball_weights(grid.dim, t / grid.spacing)
        cell = grid.spacing**grid.dim
        for node, wt in zip(nodes, weights):
            if not np.any(node):
                continue
            out += wt * np.abs(_grid_difference(values, tuple(int(o) for o in node), M))
        return out * cell / t**grid.dim
    delta = t / SUBLATTICE
    nodes, weights = _ball_weights(grid.dim, float(SUBLATTICE))
    spec = np.fft.fftn(values)
    freqs = grid.angular_frequencies()
    for node, wt in zip(nodes, weights):
        if not np.any(node):
            continue
        phase = sum(w * (o * delta) for w, o in zip(freqs, node))
        mult = (np.exp(1j * phase) - 1.0) ** M
        out += wt * np.abs(np.fft.ifftn(spec * mult))
    return out * delta**grid.dim / t**grid.dim


def ball_means(f: SampledFunction, t: float, M: int) -> SampledFunction:
    """Ball means of differences ``d^M_t f``; ``t`` is capped at a quarter period."""
    return SampledFunction(f.grid, ball_means_array(f.values, f.grid, t, M))


def difference_range(grid: Grid, k_range=None) -> tuple[int, int]:
    """Level window ``[k_lo, k_hi]`` with ``k_lo`` raised so that ``2^-k <= period/4``.

    The default window is ``[-J, J]`` with ``J`` the default filter-bank level.
    """
    if k_range is None:
        J = default_levels(grid)
        k_range = (-J, J)
    k_lo, k_hi = int(k_range[0]), int(k_range[1])
    floor = math.ceil(-math.log2(grid.period / 4) - 1e-12)
    k_lo = max(k_lo, floor)
    if k_hi < k_lo:
        raise InvalidConfigError(f"empty level window [{k_range[0]}, {k_range[1]}] after the quarter-period cap")
    return k_lo, k_hi


# -- condition gate -----------------------------------------------------------


def sigma_p(p: float, n: int) -> float:
    return n * (1.0 / min(p, 1.0) - 1.0)


def sigma_pq(p: float, q: float, n: int) -> float:
    return n * (1.0 / min(p, q, 1.0) - 1.0)


@dataclass(frozen=True)
class ConditionReport:
    ok: bool
    sigma_p: float
    sigma_pq: float
    threshold_lhs: float
    threshold_rhs: float
    violated: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "sigma_p": self.sigma_p,
            "sigma_pq": self.sigma_pq,
            "threshold_lhs": self.threshold_lhs,
            "threshold_rhs": self.threshold_rhs,
            "violated": list(self.violated),
        }


def _scaled(factor, value):
    """``factor * value`` with ``0 * inf = 0`` (a vanishing threshold stays zero)."""
    return 0.0 if factor == 0 else factor * value


def check_conditions(s, p: VariableExponent, q: VariableExponent, M: int, flavor: str = "besov",
                     n: int | None = None) -> ConditionReport:
    """Hypotheses of the difference characterization.

    ``s`` is a :class:`SmoothnessFunction` or a :class:`WeightSequence`; for
    weights, ``alpha1`` plays the role of ``s_minus``, ``alpha`` that of
    ``c_log(s)`` and ``alpha2`` that of ``s_plus``. Log-Hölder constants
    are the grid estimates carried by the exponents.
    """
    if n is None:
        n = len(p.shape)
    if isinstance(s, WeightSequence):
        lower, upper, clog_s = s.alpha1, s.alpha2, s.alpha
        names = ("alpha1", "alpha2")
    else:
        lower, upper, clog_s = s.s_minus, s.s_plus, s.clog_estimate
        names = ("s_minus", "s_plus")
    sp = sigma_p(p.p_minus, n)
    spq = sigma_pq(p.p_minus, q.p_minus, n)
    violated = []
    if flavor == "tl":
        rhs = _scaled(spq, 1.0 + _scaled(clog_s / n, min(p.p_minus, q.p_minus)))
        if not (math.isfinite(p.p_plus) and math.isfinite(q.p_plus)):
            violated.append("p_plus, q_plus < inf")
    elif flavor == "besov":
        rhs = _scaled(sp, 1.0 + q.clog_estimate / n + _scaled(clog_s / n, p.p_minus))
    else:
        raise InvalidConfigError(f"flavor must be 'besov' or 'tl', got {flavor!r}")
    if not lower > rhs:
        violated.append(f"{names[0]} > {rhs!r}")
    if not M > upper:
        violated.append(f"M > {names[1]} ({M} > {upper:g})")
    return ConditionReport(not violated, sp, spq, float(lower), float(rhs), tuple(violated))


def _gate(report: ConditionReport, strict: bool):
    if strict and not report.ok:
        raise PreconditionError("violated: " + "; ".join(report.violated))


# -- difference norms -----------------------------------------------------------


def _check_grid(f, *exps):
    for e in exps:
        if e.shape != f.grid.shape:
            raise GridMismatchError(f"exponent shape {e.shape} does not match grid {f.grid.shape}")


def _weighted_sequence(f, weight_of, M, k_lo, k_hi):
    return np.stack([
        weight_of(k) * ball_means_array(f.values, f.grid, 2.0**-k, M) for k in range(k_lo, k_hi + 1)
    ])


def _difference_norm(f, weight_of, p, q, M, k_range, flavor):
    k_lo, k_hi = difference_range(f.grid, k_range)
    seq = _weighted_sequence(f, weight_of, M, k_lo, k_hi)
    dV = f.grid.cell_volume
    head = float(luxemburg_array(f.abs(), p, dV))
    return head + float(mixed_norm(seq, p, q, dV, flavor))


def _smoothness_weight(s: SmoothnessFunction):
    return lambda k: 2.0 ** (k * s.samples)


def besov_norm_differences(f: SampledFunction, s: SmoothnessFunction, p: VariableExponent,
                           q: VariableExponent, M: int, k_range=None, strict: bool = True) -> float:
    """``||f | L_p|| + ||(2^(k s(x)) d^M_{2^-k} f(x))_k | l_q(L_p)||`` over ``k_range``.

    ``k_range = (0, k_hi)`` gives the truncated variant. With ``strict`` the
    hypotheses of :func:`check_conditions` are enforced.
    """
    _check_order(M)
    _check_grid(f, s, p, q)
    _gate(check_conditions(s, p, q, M, "besov"), strict)
    return _difference_norm(f, _smoothness_weight(s), p, q, M, k_range, "besov")


def tl_norm_differences(f: SampledFunction, s: SmoothnessFunction, p: VariableExponent,
                        q: VariableExponent, M: int, k_range=None, strict: bool = True) -> float:
    """F-flavor of :func:`besov_norm_differences` (the k-sum inside ``L_p``)."""
    _check_order(M)
    _check_grid(f, s, p, q)
    _gate(check_conditions(s, p, q, M, "tl"), strict)
    return _difference_norm(f, _smoothness_weight(s), p, q, M, k_range, "tl")


def t_ladder(grid: Grid, k_range=None, per_octave: int = 2) -> np.ndarray:
    """Geometric nodes ``2^(-i/per_octave)`` covering ``[2^-k_hi, 2^-k_lo]``."""
    k_lo, k_hi = difference_range(grid, k_range)
    i = np.arange(per_octave * k_lo, per_octave * k_hi + 1)
    return 2.0 ** (-i / per_octave)


def tl_norm_differences_continuous(f: SampledFunction, s: SmoothnessFunction, p: VariableExponent,
                                   q: VariableExponent, M: int, t_nodes=None, strict: bool = True) -> float:
    """``||f | L_p|| + || (int t^(-s q) (d^M_t f)^q dt/t)^(1/q) | L_p ||``.

    The ``dt/t`` integral is the trapezoid rule in ``log t`` over
    ``t_nodes`` (a geometric ladder, default two nodes per octave); where
    ``q(x) = inf`` the integral is replaced by the supremum over the nodes.
    """
    _check_order(M)
    _check_grid(f, s, p, q)
    _gate(check_conditions(s, p, q, M, "tl"), strict)
    if t_nodes is None:
        t_nodes = t_ladder(f.grid)
    t = np.sort(np.asarray(t_nodes, dtype=float))
    if t.size == 0:
        raise InvalidConfigError("t ladder is empty")
    expand = (slice(None),) + (None,) * f.grid.dim
    d = np.stack([ball_means_array(f.values, f.grid, ti, M) for ti in t])
    g = t[expand] ** (-s.samples[None]) * d
    qf = np.where(q.infinity_mask, 1.0, q.samples)
    peak = g.max(axis=0)
    safe = np.where(peak > 0, peak, 1.0)
    if t.size == 1:
        integral = (g[0] / safe) ** qf
    else:
        vals = (g / safe) ** qf[None]
        widths = np.diff(np.log(t))[expand]
        integral = np.sum(0.5 * widths * (vals[1:] + vals[:-1]), axis=0)
    inner = np.where(q.infinity_mask, peak, safe * integral ** (1.0 / qf) * (peak > 0))
    dV = f.grid.cell_volume
    return float(luxemburg_array(f.abs(), p, dV)) + float(luxemburg_array(inner, p, dV))


def _check_weight_range(w: WeightSequence, f, k_range):
    if w.shape != f.grid.shape:
        raise GridMismatchError(f"weights have shape {w.shape}, grid expects {f.grid.shape}")
    k_lo, k_hi = difference_range(f.grid, k_range if k_range is not None else (-w.J, w.J))
    if k_hi > w.J:
        raise InvalidConfigError(f"k_hi = {k_hi} exceeds the top weight level {w.J}")
    return k_lo, k_hi


def besov_norm_differences_2ml(f: SampledFunction, w: WeightSequence, p: VariableExponent,
                               q: VariableExponent, M: int, k_range=None, strict: bool = True) -> float:
    """:func:`besov_norm_differences` with ``w_k(x)`` in place of ``2^(k s(x))``.

    Levels below 0 use ``w_k = w_0 2^(k alpha1)``.
    """
    _check_order(M)
    _check_grid(f, p, q)
    _gate(check_conditions(w, p, q, M, "besov"), strict)
    window = _check_weight_range(w, f, k_range)
    return _difference_norm(f, w.level, p, q, M, window, "besov")


def tl_norm_differences_2ml(f: SampledFunction, w: WeightSequence, p: VariableExponent,
                            q: VariableExponent, M: int, k_range=None, strict: bool = True) -> float:
    _check_order(M)
    _check_grid(f, p, q)
    _gate(check_conditions(w, p, q, M, "tl"), strict)
    window = _check_weight_range(w, f, k_range)
    return _difference_norm(f, w.level, p, q, M, window, "tl")
