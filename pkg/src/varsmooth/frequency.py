"""Littlewood-Paley analysis, Peetre maximal functions and local means.

Frequencies are angular (``xi = 2 pi k / period``). The dyadic resolution
of unity is built from a smooth step, so ``phi_0 = 1`` on ``|xi| <= 1`` and
vanishes for ``|xi| >= 2``; ``phi_j(xi) = phi_0(2^-j xi) - phi_0(2^(1-j) xi)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    GridMismatchError,
    InvalidConfigError,
    InvalidInputError,
    KernelConstructionError,
    PreconditionError,
)
from .exponents import VariableExponent, WeightSequence
from .grid import Grid, SampledFunction
from .lebesgue import FunctionSequence, luxemburg_array, lplq_norm_array, lqlp_norm_array

__all__ = [
    "FilterBank",
    "KernelSet",
    "smooth_step",
    "phi0",
    "default_levels",
    "build_resolution_of_unity",
    "lp_blocks",
    "besov_norm_fourier",
    "tl_norm_fourier",
    "peetre_maximal",
    "peetre_threshold",
    "resolve_peetre_parameter",
    "peetre_norm",
    "eta_kernel",
    "build_local_means_kernels",
    "kernel_symbol",
    "kernel_moments",
    "kernel_diagnostics",
    "peetre_maximal_array",
    "local_means_block",
    "local_means_norm",
    "mixed_norm",
]

FLAVORS = ("besov", "tl")


def smooth_step(t):
    """``h(t) = e(1-t) / (e(1-t) + e(t))`` with ``e(t) = exp(-1/t)`` on (0, 1), clamped outside."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore"):
        a = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
        b = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    return a / (a + b)


def phi0(r):
    """Radial profile: 1 on ``r <= 1``, smooth descent on ``(1, 2)``, 0 beyond."""
    r = np.asarray(r, dtype=float)
    return np.where(r <= 1, 1.0, np.where(r >= 2, 0.0, smooth_step(r - 1.0)))


def mixed_norm(a, p, q, dV, flavor):
    """Dispatch to the l_q(L_p) (``besov``) or L_p(l_q) (``tl``) array norm."""
    if flavor == "besov":
        return lqlp_norm_array(a, p, q, dV)
    if flavor == "tl":
        return lplq_norm_array(a, p, q, dV)
    raise InvalidConfigError(f"flavor must be 'besov' or 'tl', got {flavor!r}")


# -- resolution of unity ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Frequency-side filters ``phi_0 .. phi_J`` on a grid (FFT order).

    ``epsilon`` is a Tauberian radius: ``phi_0 > 0`` on ``|xi| < epsilon`` and
    ``phi_1 > 0`` on ``epsilon/2 < |xi| < 2 epsilon``. The band filters vanish
    identically near the origin, so their moment order is unbounded.
    """

    grid: Grid
    filters: np.ndarray
    J: int
    epsilon: float = 2.0
    moment_order: float = math.inf

    def __len__(self):
        return self.J + 1


def default_levels(grid: Grid) -> int:
    """Largest ``J`` with ``2^(J+1)`` not above the grid's Nyquist frequency."""
    return int(math.floor(math.log2(grid.nyquist) + 1e-12)) - 1


def build_resolution_of_unity(grid: Grid, J: int | None = None) -> FilterBank:
    if J is None:
        J = default_levels(grid)
    if J < 0:
        raise InvalidConfigError(f"J must be nonnegative, got {J}")
    if 2.0 ** (J + 1) > grid.nyquist * (1 + 1e-12):
        raise InvalidConfigError(
            f"top band 2^(J+1) = {2 ** (J + 1)} exceeds the Nyquist frequency {grid.nyquist:g}; lower J"
        )
    r = grid.frequency_modulus()
    filters = np.empty((J + 1,) + grid.shape)
    filters[0] = phi0(r)
    for j in range(1, J + 1):
        filters[j] = phi0(r / 2.0**j) - phi0(r / 2.0 ** (j - 1))
    filters.setflags(write=False)
    return FilterBank(grid, filters, J)


def _block_array(values, bank: FilterBank):
    spec = np.fft.fftn(values, axes=tuple(range(-bank.grid.dim, 0)))
    return np.fft.ifftn(bank.filters * spec, axes=tuple(range(-bank.grid.dim, 0)))


def lp_blocks(f: SampledFunction, bank: FilterBank) -> FunctionSequence:
    """Littlewood-Paley blocks ``(phi_j f^)^v`` for ``j = 0..J``."""
    if f.grid != bank.grid:
        raise GridMismatchError("function and filter bank live on different grids")
    return FunctionSequence(f.grid, _block_array(f.values, bank))


def _check_weights(w: WeightSequence, grid: Grid, J: int):
    if w.shape != grid.shape:
        raise GridMismatchError(f"weights have shape {w.shape}, grid expects {grid.shape}")
    if w.J < J:
        raise InvalidInputError(f"weight sequence has {w.J + 1} levels, need {J + 1}")


def _fourier_norm(f, w, p, q, bank, flavor):
    if bank is None:
        bank = build_resolution_of_unity(f.grid, w.J)
    if f.grid != bank.grid:
        raise GridMismatchError("function and filter bank live on different grids")
    _check_weights(w, f.grid, bank.J)
    blocks = np.abs(_block_array(f.values, bank)) * w.levels[: bank.J + 1]
    return float(mixed_norm(blocks, p, q, f.grid.cell_volume, flavor))


def besov_norm_fourier(f: SampledFunction, w: WeightSequence, p: VariableExponent,
                       q: VariableExponent, bank: FilterBank | None = None) -> float:
    """``|| w_j (phi_j f^)^v | l_q(.)(L_p(.)) ||`` over ``j = 0..J``.

    The bank defaults to ``J = w.J``.
    """
    return _fourier_norm(f, w, p, q, bank, "besov")


def tl_norm_fourier(f: SampledFunction, w: WeightSequence, p: VariableExponent,
                    q: VariableExponent, bank: FilterBank | None = None) -> float:
    """``|| w_j (phi_j f^)^v | L_p(.)(l_q(.)) ||`` over ``j = 0..J``."""
    return _fourier_norm(f, w, p, q, bank, "tl")


# -- Peetre maximal function --------------------------------------------------


def _peetre_denominator(r, a, form):
    if form == "multiplicative":
        return (1.0 + r) ** a
    if form == "additive":
        return 1.0 + r**a
    raise InvalidConfigError(f"form must be 'multiplicative' or 'additive', got {form!r}")


def _signed_index_offsets(grid: Grid):
    """Every index offset with its periodic length, sorted by length."""
    n = grid.n
    d1 = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    if grid.dim == 1:
        offs = [(int(d),) for d in d1]
    else:
        offs = [(int(a), int(b)) for a in d1 for b in d1]
    lengths = np.array([math.sqrt(sum((o * grid.spacing) ** 2 for o in off)) for off in offs])
    order = np.argsort(lengths, kind="stable")
    return [offs[i] for i in order], lengths[order]


def peetre_maximal_array(mags, scales, a: float, grid: Grid, form="multiplicative"):
    """Peetre maximal function of a stack of nonnegative arrays.

    ``mags`` has shape ``(K,) + grid.shape`` and ``scales`` holds ``2^k`` per
    row. Offsets are visited by increasing length and the scan stops once no
    remaining offset can raise any output value, so the result is the exact
    grid supremum.
    """
    mags = np.asarray(mags, dtype=float)
    scales = np.asarray(scales, dtype=float)
    axes = tuple(range(1, grid.dim + 1))
    out = mags.copy()
    peak = mags.reshape(mags.shape[0], -1).max(axis=1)
    offsets, lengths = _signed_index_offsets(grid)
    expand = (slice(None),) + (None,) * grid.dim
    for off, length in zip(offsets[1:], lengths[1:]):
        denom = _peetre_denominator(scales * length, a, form)
        bound = peak / denom
        floor = out.reshape(out.shape[0], -1).min(axis=1)
        if np.all(bound < floor):
            break
        out = np.maximum(out, np.roll(mags, off, axis=axes) / denom[expand])
    return out


def peetre_maximal(block: SampledFunction, k: int, a: float, form: str = "multiplicative") -> SampledFunction:
    """``max_y |block(y)| / D(2^k dist(x, y))`` over grid points ``y``.

    ``form="multiplicative"`` uses ``D(r) = (1 + r)^a``, which is antitone in
    ``a``; ``form="additive"`` uses ``D(r) = 1 + r^a``. The two give
    equivalent norms with the same parameter thresholds.
    """
    if not a > 0:
        raise InvalidConfigError(f"Peetre parameter a must be positive, got {a}")
    out = peetre_maximal_array(block.abs()[None], [2.0**k], a, block.grid, form)[0]
    return SampledFunction(block.grid, out)


def peetre_threshold(p: VariableExponent, q: VariableExponent, alpha: float, flavor: str, n: int) -> float:
    """Lower bound on ``a`` for the Peetre characterization.

    B flavor: ``(n + c_log(1/q)) / p_minus + alpha``;
    F flavor: ``n / min(p_minus, q_minus) + alpha``.
    """
    if flavor == "besov":
        return (n + q.clog_estimate) / p.p_minus + alpha
    if flavor == "tl":
        return n / min(p.p_minus, q.p_minus) + alpha
    raise InvalidConfigError(f"flavor must be 'besov' or 'tl', got {flavor!r}")


def resolve_peetre_parameter(a, p, q, alpha, flavor, n) -> float:
    """``"auto"`` means threshold + 1; explicit values must exceed the threshold."""
    thr = peetre_threshold(p, q, alpha, flavor, n)
    if a == "auto" or a is None:
        return thr + 1.0
    a = float(a)
    if not a > thr:
        raise PreconditionError(f"Peetre parameter a = {a:g} must exceed the threshold {thr:g}")
    return a


def peetre_norm(f: SampledFunction, w: WeightSequence, p: VariableExponent, q: VariableExponent,
                a="auto", flavor="besov", bank: FilterBank | None = None, form="multiplicative") -> float:
    """Mixed norm of ``w_k (phi_k f^)^v*_a`` over ``k = 0..J``."""
    if bank is None:
        bank = build_resolution_of_unity(f.grid, w.J)
    _check_weights(w, f.grid, bank.J)
    a = resolve_peetre_parameter(a, p, q, w.alpha, flavor, f.grid.dim)
    mags = np.abs(_block_array(f.values, bank))
    maxed = peetre_maximal_array(mags, 2.0 ** np.arange(bank.J + 1), a, f.grid, form)
    return float(mixed_norm(maxed * w.levels[: bank.J + 1], p, q, f.grid.cell_volume, flavor))


def eta_kernel(grid: Grid, nu: int, m: float) -> SampledFunction:
    """``2^(n nu) (1 + 2^nu |x|)^-m`` with the periodic ``|x|``."""
    if not m > 0:
        raise InvalidConfigError(f"m must be positive, got {m}")
    r = grid.origin_distance()
    return SampledFunction(grid, 2.0 ** (grid.dim * nu) * (1.0 + 2.0**nu * r) ** (-m))


# -- local means --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelSet:
    """Compactly supported local-means kernels with their witnesses."""

    k0: SampledFunction
    k: SampledFunction
    support_radius: float
    moment_order: int
    tauber_epsilon: float
    _multipliers: dict = field(default_factory=dict, repr=False)

    @property
    def grid(self) -> Grid:
        return self.k0.grid

    def block(self, f: SampledFunction, which: str, t: float) -> SampledFunction:
        """``k(t, f)`` for ``which`` in ``{"k0", "k"}``, reusing multipliers across calls."""
        if f.grid != self.grid:
            raise GridMismatchError("function and kernels live on different grids")
        if not 0 < t <= 1:
            raise InvalidConfigError(f"t must lie in (0, 1], got {t}")
        key = (which, float(t))
        if key not in self._multipliers:
            kernel = self.k0 if which == "k0" else self.k
            self._multipliers[key] = _local_means_multiplier(kernel, t, self.grid)
        spec = np.fft.fftn(f.values) * self._multipliers[key]
        return SampledFunction(f.grid, np.fft.ifftn(spec))


def _bump(grid: Grid, radius: float):
    r = grid.origin_distance() / radius
    inside = r < 1
    out = np.zeros(grid.shape)
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def _discrete_laplacian(values, grid: Grid):
    out = -2.0 * grid.dim * values
    for axis in range(grid.dim):
        out = out + np.roll(values, 1, axis=axis) + np.roll(values, -1, axis=axis)
    return out / grid.spacing**2


def kernel_symbol(kernel: SampledFunction, xi) -> np.ndarray:
    """``sum_y k(y) exp(-i <xi, y>) dV`` at arbitrary frequencies ``xi``.

    ``xi`` has shape ``(..., dim)``; ``y`` runs over the kernel support with
    signed periodic coordinates.
    """
    grid = kernel.grid
    xi = np.asarray(xi, dtype=float).reshape(-1, grid.dim)
    vals = kernel.values.real
    support = vals != 0
    ys = np.stack([o[support] for o in grid.signed_offsets()], axis=-1)
    weights = vals[support] * grid.cell_volume
    out = np.empty(xi.shape[0], dtype=complex)
    step = max(1, 2**22 // max(1, ys.shape[0]))
    for start in range(0, xi.shape[0], step):
        phase = xi[start:start + step] @ ys.T
        out[start:start + step] = np.exp(-1j * phase) @ weights
    return out


def kernel_moments(kernel: SampledFunction, order: int) -> dict:
    """Discrete moments ``sum_y y^beta k(y) dV`` for ``|beta| < order``, keyed by ``beta``."""
    grid = kernel.grid
    vals = kernel.values.real * grid.cell_volume
    offsets = grid.signed_offsets()
    out = {}
    for beta in itertools.product(range(order), repeat=grid.dim):
        if sum(beta) >= order:
            continue
        mono = np.ones(grid.shape)
        for o, b in zip(offsets, beta):
            mono = mono * o**b
        out[beta] = float(np.sum(mono * vals))
    return out


def kernel_diagnostics(kernels: KernelSet) -> dict:
    """Moments relative to ``||k||_1``, support radii and the Tauberian radius."""
    grid = kernels.grid
    dist = grid.origin_distance()
    l1 = float(np.abs(kernels.k.values).sum() * grid.cell_volume)
    moments = kernel_moments(kernels.k, kernels.moment_order)
    rel = {",".join(map(str, b)): abs(v) / l1 for b, v in moments.items()}
    support = {name: float(dist[ker.values != 0].max()) for name, ker in (("k0", kernels.k0), ("k", kernels.k))}
    return {
        "moment_order": kernels.moment_order,
        "support_radius": kernels.support_radius,
        "relative_moments": rel,
        "max_relative_moment": max(rel.values()) if rel else 0.0,
        "measured_support": support,
        "support_ok": all(r < kernels.support_radius for r in support.values()),
        "tauber_epsilon": kernels.tauber_epsilon,
    }


def _ray_directions(dim):
    if dim == 1:
        return np.array([[1.0]])
    theta = np.linspace(0.0, math.pi / 2, 9)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _first_sign_change(kernel: SampledFunction, r_max: float, samples: int = 4096):
    """Smallest radius along the probe rays where the (real) symbol changes sign."""
    radii = np.linspace(0.0, r_max, samples + 1)[1:]
    first = math.inf
    for direction in _ray_directions(kernel.grid.dim):
        sym = kernel_symbol(kernel, radii[:, None] * direction[None, :]).real
        flips = np.nonzero(np.sign(sym[1:]) != np.sign(sym[:-1]))[0]
        zeros = np.nonzero(sym == 0)[0]
        hits = []
        if flips.size:
            hits.append(radii[flips[0]])
        if zeros.size:
            hits.append(radii[zeros[0]])
        if hits:
            first = min(first, min(hits))
    return first


def build_local_means_kernels(grid: Grid, R: int = 2, support_radius: float = 1.0,
                              max_attempts: int = 5) -> KernelSet:
    """Local-means kernels ``k0`` and ``k`` supported in the ball of ``support_radius``.

    ``k0`` is a smooth bump normalized to unit mass. ``k`` applies the
    discrete Laplacian ``ceil(R/2)`` times to a narrower bump, which makes
    every discrete moment of order below ``R`` vanish by summation by parts
    while keeping the support inside the ball. ``k`` is scaled to unit
    ``l1`` mass. The Tauberian radius is measured from the symbols.
    """
    if R < 0:
        raise InvalidConfigError(f"moment order must be nonnegative, got {R}")
    if not 0 < support_radius <= 1:
        raise InvalidConfigError(f"support radius must lie in (0, 1], got {support_radius}")
    if support_radius > grid.period / 4:
        raise InvalidConfigError("support radius must not exceed a quarter period")
    if 2 * support_radius / grid.spacing < 16:
        raise InvalidConfigError("support ball must span at least 16 grid points per axis")
    m = (R + 1) // 2
    radius = support_radius
    for _ in range(max_attempts):
        inner = radius - m * grid.spacing
        if inner <= 2 * grid.spacing:
            break
        b0 = _bump(grid, radius)
        k0 = SampledFunction(grid, b0 / (b0.sum() * grid.cell_volume))
        kv = _bump(grid, inner)
        for _ in range(m):
            kv = _discrete_laplacian(kv, grid)
        kv = kv / (np.abs(kv).sum() * grid.cell_volume)
        k = SampledFunction(grid, kv)
        r_max = grid.nyquist
        z0 = _first_sign_change(k0, r_max)
        zk = _first_sign_change(k, r_max)
        eps = 0.9 * min(z0, zk / 2.0)
        if math.isfinite(eps) and eps > 0 and _tauberian_holds(k0, k, eps):
            return KernelSet(k0, k, support_radius, R, float(eps))
        radius *= 0.9
    raise KernelConstructionError(f"no Tauberian witness found after {max_attempts} attempts")


def _tauberian_holds(k0, k, eps, samples=512):
    r_in = np.linspace(0.0, eps, samples, endpoint=False)
    r_ann = np.linspace(eps / 2, 2 * eps, samples + 2)[1:-1]
    for direction in _ray_directions(k0.grid.dim):
        if np.any(np.abs(kernel_symbol(k0, r_in[:, None] * direction)) == 0):
            return False
        if np.any(np.abs(kernel_symbol(k, r_ann[:, None] * direction)) == 0):
            return False
    return True


def _local_means_multiplier(kernel: SampledFunction, t: float, grid: Grid):
    """Multiplier of ``f -> sum_y k(y) f(. + t y) dV`` at every grid frequency."""
    w = np.stack([a.ravel() for a in grid.angular_frequencies()], axis=-1)
    return kernel_symbol(kernel, -t * w).reshape(grid.shape)


def local_means_block(f: SampledFunction, kernel: SampledFunction, t: float) -> SampledFunction:
    """``k(t, f)(x) = int k(y) f(x + t y) dy`` on the trigonometric model.

    Each shift ``f(x + t y)`` is a spectral phase, so the block is the
    Fourier multiplier ``sum_y k(y) exp(i t <xi, y>) dV``.
    """
    if f.grid != kernel.grid:
        raise GridMismatchError("function and kernel live on different grids")
    if not 0 < t <= 1:
        raise InvalidConfigError(f"t must lie in (0, 1], got {t}")
    mult = _local_means_multiplier(kernel, t, f.grid)
    return SampledFunction(f.grid, np.fft.ifftn(np.fft.fftn(f.values) * mult))


def local_means_norm(f: SampledFunction, kernels: KernelSet, w: WeightSequence, p: VariableExponent,
                     q: VariableExponent, flavor: str = "besov", J: int | None = None) -> float:
    """``||k0(1,f) w_0 | L_p|| + ||(k(2^-j, f) w_j)_{j=1..J} | mixed||``."""
    if kernels.moment_order <= w.alpha2:
        raise PreconditionError(
            f"kernel moment order R = {kernels.moment_order} must exceed alpha2 = {w.alpha2:g}"
        )
    if f.grid != kernels.grid:
        raise GridMismatchError("function and kernels live on different grids")
    J = w.J if J is None else J
    _check_weights(w, f.grid, J)
    dV = f.grid.cell_volume
    head = float(luxemburg_array(kernels.block(f, "k0", 1.0).abs() * w.levels[0], p, dV))
    if J == 0:
        return head
    blocks = np.stack([kernels.block(f, "k", 2.0**-j).abs() * w.levels[j] for j in range(1, J + 1)])
    return head + float(mixed_norm(blocks, p, q, dV, flavor))
