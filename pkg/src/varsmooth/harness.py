"""Randomized inequality suites and norm-equivalence stability experiments.

Every random draw comes from a stream keyed by ``(seed, index)``, so runs are
reproducible sample by sample regardless of evaluation order. Reports are
plain dictionaries with stable field names and serialize to JSON.
"""

from __future__ import annotations

import configparser
import dataclasses
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .differences import (
    besov_norm_differences,
    besov_norm_differences_2ml,
    check_conditions,
    difference_range,
    tl_norm_differences,
    tl_norm_differences_2ml,
)
from .exceptions import InvalidConfigError, NumericFailureError, PreconditionError
from .exponents import SmoothnessFunction, VariableExponent, two_microlocal_weights, weights_from_smoothness
from .expression import evaluate_on_grid, parse_expression, validate_role
from .frequency import (
    besov_norm_fourier,
    build_local_means_kernels,
    build_resolution_of_unity,
    default_levels,
    eta_kernel,
    local_means_norm,
    peetre_maximal_array,
    peetre_norm,
    resolve_peetre_parameter,
    tl_norm_fourier,
)
from .grid import Grid, SampledFunction
from .lebesgue import lplq_norm_array, lqlp_norm_array

__all__ = [
    "FAMILIES",
    "METHODS",
    "ExperimentConfig",
    "EquivalenceReport",
    "CheckReport",
    "make_family_sample",
    "run_equivalence_experiment",
    "load_baselines",
    "baseline_entry",
    "hardy_littlewood_maximal",
    "check_discrete_convolution",
    "check_eta_convolution",
    "check_mixed_holder",
    "check_power_sum",
    "check_eta_ball_convolution",
    "check_eta1",
    "check_r_trick",
    "check_dif_peetre",
    "check_maximal",
    "SUITES",
    "run_suite",
]

DATA_DIR = Path(__file__).parent / "data"
FAMILIES = ("band_limited_random", "gaussian_bump", "cusp", "chirp")
METHODS = ("fourier", "peetre", "localmeans", "differences")
HOLDER_SLACK = 1e-9
TIGHT_DRIFT = 0.10  # relative drift allowed for eta-convolution and trial-max constants
LOOSE_FACTOR = 2.0  # max/min allowed for pointwise-supremum constants


def _rng(seed, index=0):
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), int(index)]))


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


# -- function families -------------------------------------------------------------


def _band_limited(grid, rng, radius, decay):
    r = grid.frequency_modulus()
    keep = r <= radius
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) / math.sqrt(2)
    coeffs = np.where(keep, coeffs * np.maximum(r, 1.0) ** (-decay), 0.0)
    return np.fft.ifftn(coeffs) * grid.size


def _chordal_distance(grid, x0):
    """Smooth-away-from-x0 periodic distance ``(L/pi) |sin(pi (x - x0) / L)|``."""
    L = grid.period
    x0 = np.broadcast_to(np.asarray(x0, dtype=float), (grid.dim,))
    total = np.zeros(grid.shape)
    for c, c0 in zip(grid.coordinates(), x0):
        total += (L / math.pi * np.sin(math.pi * (c - c0) / L)) ** 2
    return np.sqrt(total)


def make_family_sample(family: str, grid: Grid, seed: int, index: int, gamma=None, beta=None,
                       x0=None, level=None, smoothness: float = 1.0, width=None) -> SampledFunction:
    """Deterministic sample ``index`` of a function family.

    ``band_limited_random``: complex Gaussian coefficients on ``|xi| <= 2^(level-1)``
    with decay ``|xi|^-(smoothness + 1/2)``.
    ``gaussian_bump``: periodized Gaussian with random centre and width.
    ``cusp``: ``dist(x, x0)^gamma`` with the chordal periodic distance, plus a
    small low-frequency random part.
    ``chirp``: ``r^gamma sin(r^-beta)`` with ``r`` mollified at a quarter grid
    spacing, plus the same random part.
    """
    rng = _rng(seed, index)
    if level is None:
        level = max(default_levels(grid) - 3, 1)
    if family == "band_limited_random":
        return SampledFunction(grid, _band_limited(grid, rng, 2.0 ** (level - 1), smoothness + 0.5))
    if family == "gaussian_bump":
        centre = rng.uniform(0, grid.period, grid.dim) if x0 is None else x0
        centre = np.broadcast_to(np.asarray(centre, dtype=float), (grid.dim,))
        sigma = (0.2 + 0.3 * rng.uniform()) if width is None else width
        total = np.zeros(grid.shape)
        for shift in itertools.product((-1, 0, 1), repeat=grid.dim):
            sq = sum((c - c0 - k * grid.period) ** 2 for c, c0, k in zip(grid.coordinates(), centre, shift))
            total += np.exp(-sq / (2 * sigma**2))
        return SampledFunction(grid, total * rng.uniform(0.5, 1.5))
    if family in ("cusp", "chirp"):
        if gamma is None or not gamma > 0:
            raise InvalidConfigError(f"{family} needs gamma > 0")
        centre = grid.period / 2 if x0 is None else x0
        r = _chordal_distance(grid, centre)
        if family == "cusp":
            core = r**gamma
        else:
            if beta is None or not beta > 0:
                raise InvalidConfigError("chirp needs beta > 0")
            rm = np.sqrt(r**2 + (grid.spacing / 4) ** 2)
            core = rm**gamma * np.sin(rm ** (-beta))
        noise = _band_limited(grid, rng, 4.0, 1.0).real
        noise *= 0.1 / max(np.abs(noise).max(), 1e-300)
        return SampledFunction(grid, core + noise)
    raise InvalidConfigError(f"unknown family {family!r}; choose one of {', '.join(FAMILIES)}")


# -- experiment configuration ---------------------------------------------------------


def _parse_weights(text):
    """``2ml:s,s',x0[,x0b]`` -> (s, s', x0 tuple)."""
    if not text:
        return None
    if not text.startswith("2ml:"):
        raise InvalidConfigError(f"weights must look like '2ml:<s>,<s'>,<x0>', got {text!r}")
    try:
        parts = [float(v) for v in text[4:].split(",")]
    except ValueError:
        raise InvalidConfigError(f"cannot parse weights {text!r}") from None
    if len(parts) < 3:
        raise InvalidConfigError("weights need s, s' and x0")
    return parts[0], parts[1], tuple(parts[2:])


@dataclass
class ExperimentConfig:
    """Parameters of one equivalence-stability experiment.

    Exponents are expressions in ``x`` (and ``y`` in 2D). ``weights`` of the
    form ``2ml:<s>,<s'>,<x0>`` replace ``s`` by two-microlocal weights.
    """

    name: str = "experiment"
    flavor: str = "besov"
    s: str = "1"
    p: str = "2"
    q: str = "2"
    weights: str = ""
    dim: int = 1
    n: int = 512
    period: float = 2 * math.pi
    M: int = 2
    J: int | None = None
    a: str = "auto"
    R: int = 2
    radius: float = 1.0
    k_lo: int | None = None
    k_hi: int | None = None
    family: str = "band_limited_random"
    gamma: float | None = None
    beta: float | None = None
    x0: float | None = None
    level: int | None = None
    sample_count: int = 20
    seed: int = 20240601
    methods: tuple = METHODS
    band: float = 10.0

    def __post_init__(self):
        self.methods = tuple(self.methods)
        if self.flavor not in ("besov", "tl"):
            raise InvalidConfigError(f"flavor must be besov or tl, got {self.flavor!r}")
        if self.sample_count < 1:
            raise InvalidConfigError("sample_count must be at least 1")
        if self.family not in FAMILIES:
            raise InvalidConfigError(f"unknown family {self.family!r}")
        if self.family in ("cusp", "chirp") and not (self.gamma is not None and 0 < self.gamma < self.M):
            raise InvalidConfigError(f"{self.family} needs 0 < gamma < M")
        if self.family == "chirp" and not (self.beta is not None and self.beta > 0):
            raise InvalidConfigError("chirp needs beta > 0")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise InvalidConfigError(f"methods must be a nonempty subset of {METHODS}")
        _parse_weights(self.weights)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["methods"] = list(self.methods)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "ExperimentConfig":
        """Read flat ``key = value`` text; ``overrides`` win over file values."""
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string("[experiment]\n" + Path(path).read_text())
        except configparser.Error as err:
            raise InvalidConfigError(f"{path}: {err}") from None
        raw = dict(parser["experiment"])
        raw.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(_coerce(raw))


_INT_KEYS = {"dim", "n", "M", "J", "R", "k_lo", "k_hi", "level", "sample_count", "seed"}
_FLOAT_KEYS = {"period", "radius", "gamma", "beta", "x0", "band"}


def _coerce(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        value = value.strip()
        try:
            if key in _INT_KEYS:
                out[key] = None if value.lower() in ("", "none", "auto") else int(value)
            elif key in _FLOAT_KEYS:
                out[key] = None if value.lower() in ("", "none") else float(value)
            elif key == "methods":
                out[key] = tuple(m.strip() for m in value.split(",") if m.strip())
            else:
                out[key] = value
        except ValueError:
            raise InvalidConfigError(f"config key {key!r}: cannot parse {value!r}") from None
    return out


# -- equivalence experiment -------------------------------------------------------------


class EquivalenceReport:
    """Norms per method and sample with pairwise ratio statistics.

    Field names in :meth:`as_dict` are stable; ``runtime`` is the only field
    that varies between identical runs.
    """

    FIELDS = ("config", "conditions", "contractual", "per_sample", "ratios", "constants",
              "baseline", "pass", "notes", "seed", "runtime")

    def __init__(self, data: dict):
        missing = set(self.FIELDS) - set(data)
        if missing:
            raise InvalidConfigError(f"report lacks fields: {', '.join(sorted(missing))}")
        self.data = data

    @property
    def passed(self) -> bool:
        return bool(self.data["pass"])

    @property
    def ratios(self) -> dict:
        return self.data["ratios"]

    def norms(self, method: str) -> list:
        return [s["norms"].get(method) for s in self.data["per_sample"]]

    def as_dict(self) -> dict:
        return self.data

    def comparable(self) -> dict:
        """Report contents without ``runtime``, for diffing."""
        return {k: v for k, v in self.data.items() if k != "runtime"}

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EquivalenceReport":
        return cls(json.loads(text))

    def write(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def read(cls, path) -> "EquivalenceReport":
        return cls.from_json(Path(path).read_text())


def _exponents(cfg: ExperimentConfig, grid: Grid):
    def field_of(text, role):
        values = evaluate_on_grid(parse_expression(str(text)), grid)
        return validate_role(values, role, cfg.flavor)

    p = VariableExponent(field_of(cfg.p, "p"), grid.period)
    q = VariableExponent(field_of(cfg.q, "q"), grid.period)
    s = SmoothnessFunction(field_of(cfg.s, "s"), grid.period)
    return s, p, q


def _ratio_stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return {"min": None, "max": None, "geomean": None, "spread": None, "defined": 0}
    arr = np.array(vals)
    return {
        "min": float(arr.min()),
        "max": float(arr.max()),
        "geomean": float(np.exp(np.mean(np.log(arr)))),
        "spread": float(arr.max() / arr.min()),
        "defined": len(vals),
    }


def load_baselines(path=None) -> dict:
    path = DATA_DIR / "baselines.json" if path is None else Path(path)
    if not path.exists():
        return {}
    return json.loads(path.read_text())


def baseline_entry(report: EquivalenceReport) -> dict:
    """Baseline record (geometric mean and spread per pair) from a report."""
    return {pair: {"geomean": st["geomean"], "spread": st["spread"]} for pair, st in report.ratios.items()}


def _check_baseline(ratios, entry, slack=2.0):
    problems = []
    for pair, ref in entry.items():
        got = ratios.get(pair, {}).get("geomean")
        if got is None or ref.get("geomean") is None:
            continue
        if not ref["geomean"] / slack <= got <= ref["geomean"] * slack:
            problems.append(f"{pair}: geomean {got:.6g} outside [{ref['geomean'] / slack:.6g}, "
                            f"{ref['geomean'] * slack:.6g}]")
    return problems


def run_equivalence_experiment(cfg: ExperimentConfig, baselines: dict | None = None,
                               inject=None) -> EquivalenceReport:
    """Compute every requested norm for each seeded sample and compare them.

    ``inject`` optionally maps sample indices to explicit sample values
    (used to plant edge cases such as the zero function). ``baselines``
    defaults to the shipped baseline file; an entry under ``cfg.name`` is
    compared with a factor-2 slack.
    """
    start = time.perf_counter()
    grid = Grid(cfg.dim, cfg.n, cfg.period)
    J = default_levels(grid) if cfg.J is None else cfg.J
    s, p, q = _exponents(cfg, grid)
    weights_spec = _parse_weights(cfg.weights)
    if weights_spec is None:
        w = weights_from_smoothness(s, J)
        smooth = s
        gate = s
    else:
        ws, wsp, wx0 = weights_spec
        w = two_microlocal_weights(ws, wsp, wx0 if len(wx0) > 1 else wx0[0], J, grid)
        smooth = None
        gate = w
    conditions = check_conditions(gate, p, q, cfg.M, cfg.flavor)
    notes = []
    bank = build_resolution_of_unity(grid, J)
    constants = {"J": J, "weight_alpha": w.alpha, "weight_alpha1": w.alpha1, "weight_alpha2": w.alpha2,
                 "clog_s": s.clog_estimate, "clog_inv_q": q.clog_estimate}
    a = None
    if "peetre" in cfg.methods:
        a = resolve_peetre_parameter(cfg.a, p, q, w.alpha, cfg.flavor, grid.dim)
        constants["peetre_a"] = a
    kernels = None
    if "localmeans" in cfg.methods:
        kernels = build_local_means_kernels(grid, cfg.R, cfg.radius)
        constants["tauber_epsilon"] = kernels.tauber_epsilon
    k_lo = -J if cfg.k_lo is None else cfg.k_lo
    k_hi = J if cfg.k_hi is None else cfg.k_hi
    k_range = difference_range(grid, (k_lo, k_hi))
    constants["k_range"] = list(k_range)

    def norm_of(method, f):
        if method == "fourier":
            fn = besov_norm_fourier if cfg.flavor == "besov" else tl_norm_fourier
            return fn(f, w, p, q, bank)
        if method == "peetre":
            return peetre_norm(f, w, p, q, a, cfg.flavor, bank)
        if method == "localmeans":
            return local_means_norm(f, kernels, w, p, q, cfg.flavor, J)
        if smooth is not None:
            fn = besov_norm_differences if cfg.flavor == "besov" else tl_norm_differences
            return fn(f, smooth, p, q, cfg.M, k_range, strict=False)
        fn = besov_norm_differences_2ml if cfg.flavor == "besov" else tl_norm_differences_2ml
        return fn(f, w, p, q, cfg.M, k_range, strict=False)

    per_sample = []
    inject = inject or {}
    for i in range(cfg.sample_count):
        if i in inject:
            f = SampledFunction(grid, inject[i])
        else:
            f = make_family_sample(cfg.family, grid, cfg.seed, i, gamma=cfg.gamma, beta=cfg.beta,
                                   x0=cfg.x0, level=cfg.level)
        norms = {}
        for method in cfg.methods:
            try:
                norms[method] = _finite_or_none(norm_of(method, f))
            except NumericFailureError as err:
                raise NumericFailureError(f"sample {i}, method {method}: {err}") from err
        per_sample.append({"index": i, "norms": norms})

    ratios = {}
    for m1, m2 in itertools.combinations(cfg.methods, 2):
        vals = []
        for sample in per_sample:
            a1, a2 = sample["norms"][m1], sample["norms"][m2]
            vals.append(a1 / a2 if a1 and a2 else None)
        ratios[f"{m1}/{m2}"] = _ratio_stats(vals)
    if any(st["defined"] < cfg.sample_count for st in ratios.values()):
        notes.append("ratios involving a zero or infinite norm are undefined and excluded")

    passed = True
    for pair, st in ratios.items():
        if st["spread"] is not None and st["spread"] > cfg.band:
            passed = False
            notes.append(f"{pair}: spread {st['spread']:.4g} exceeds the band {cfg.band:g}")
    baseline = None
    table = load_baselines() if baselines is None else baselines
    if cfg.name in table:
        problems = _check_baseline(ratios, table[cfg.name])
        baseline = {"name": cfg.name, "ok": not problems, "problems": problems}
        passed = passed and not problems
    if not conditions.ok:
        passed = False
        notes.append("conditions violated (" + "; ".join(conditions.violated)
                     + "): ratios are non-contractual")
    data = {
        "config": cfg.to_dict(),
        "conditions": conditions.as_dict(),
        "contractual": conditions.ok,
        "per_sample": per_sample,
        "ratios": ratios,
        "constants": {k: (_finite_or_none(v) if isinstance(v, float) else v) for k, v in constants.items()},
        "baseline": baseline,
        "pass": passed,
        "notes": notes,
        "seed": cfg.seed,
        "runtime": time.perf_counter() - start,
    }
    return EquivalenceReport(data)


# -- inequality suites --------------------------------------------------------------


@dataclass
class CheckReport:
    """Outcome of one randomized inequality check.

    ``constants`` holds fitted constants (for example one per seed or per
    level); ``drift`` is the stability statistic compared against ``band``.
    """

    name: str
    passed: bool
    trials: int
    violations: int = 0
    constants: dict = field(default_factory=dict)
    drift: float | None = None
    band: str = ""
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _nonneg(rng, shape):
    """Heavy-tailed nonnegative values with random exact zeros (stress inputs for explicit bounds)."""
    return np.exp(1.5 * rng.standard_normal(shape)) * (rng.uniform(size=shape) > 0.2)


def _bounded_nonneg(rng, shape):
    """Uniform nonnegative values with random exact zeros.

    Fitted constants are sample maxima of a ratio; bounded inputs keep that
    maximum from being decided by a single extreme draw.
    """
    return rng.uniform(size=shape) * (rng.uniform(size=shape) > 0.2)


def _default_pq(grid, p=None, q=None, p_expr="2 + 0.5*sin(x)", q_expr="2 + 0.5*cos(x)"):
    if p is None:
        p = VariableExponent(evaluate_on_grid(parse_expression(p_expr), grid), grid.period)
    if q is None:
        q = VariableExponent(evaluate_on_grid(parse_expression(q_expr), grid), grid.period)
    return p, q


def _relative_drift(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def _factor_drift(values):
    values = [v for v in values if v > 0]
    return max(values) / min(values)


def check_mixed_holder(seed: int = 0, trials: int = 1000, lam: float = 0.5, p=None, q=None,
                       grid: Grid | None = None, terms: int = 4) -> CheckReport:
    """``||f g|| <= 2^(1/q_minus) ||f^(1/(1-lam))||^(1-lam) ||g^(1/lam)||^lam`` in l_q(L_p).

    Default exponents reach below 1 so the quasi-norm case is exercised.
    """
    if not 0 < lam < 1:
        raise InvalidConfigError(f"lambda must lie in (0, 1), got {lam}")
    grid = Grid(1, 16) if grid is None else grid
    p, q = _default_pq(grid, p, q, "1.2 + 0.8*sin(x)", "1 + 0.5*cos(x)")
    rng = _rng(seed)
    shape = (trials, terms) + grid.shape
    f, g = _nonneg(rng, shape), _nonneg(rng, shape)
    dV = grid.cell_volume
    lhs = lqlp_norm_array(f * g, p, q, dV)
    rhs = (2.0 ** (1.0 / q.p_minus) * lqlp_norm_array(f ** (1 / (1 - lam)), p, q, dV) ** (1 - lam)
           * lqlp_norm_array(g ** (1 / lam), p, q, dV) ** lam)
    bad = lhs > rhs * (1 + HOLDER_SLACK)
    ratio = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), 0.0)
    return CheckReport("holder", not bad.any(), trials, int(bad.sum()),
                       {"max_ratio": float(ratio.max())}, None, f"slack {HOLDER_SLACK:g}",
                       {"lambda": lam, "constant": 2.0 ** (1.0 / q.p_minus)})


def _window_convolution(g, delta):
    """``G_nu = sum_k 2^(-|nu-k| delta) g_k`` over a finite window (axis 1)."""
    K = g.shape[1]
    idx = np.arange(K)
    kern = 2.0 ** (-np.abs(idx[:, None] - idx[None, :]) * delta)
    return np.tensordot(kern, g, axes=([1], [1])).swapaxes(0, 1)


def _convolution_ratios(seed, trials, delta, p, q, grid, terms, flavor, draw=_nonneg):
    rng = _rng(seed)
    g = draw(rng, (trials, terms) + grid.shape)
    G = _window_convolution(g, delta)
    norm = lqlp_norm_array if flavor == "besov" else lplq_norm_array
    return norm(G, p, q, grid.cell_volume) / norm(g, p, q, grid.cell_volume)


def check_discrete_convolution(seed: int = 0, trials: int = 1000, delta: float = 1.0, p=None, q=None,
                               grid: Grid | None = None, terms: int = 6) -> CheckReport:
    """``||G|| <= C ||g||`` in both mixed norms for ``G_nu = sum 2^(-|nu-k| delta) g_k``.

    For constant exponents ``>= 1`` the bound ``C = sum_{|l| < terms} 2^(-|l| delta)``
    follows from the triangle inequality and is asserted; otherwise the
    fitted constant is compared across two seeds.
    """
    if not delta > 0:
        raise InvalidConfigError(f"delta must be positive, got {delta}")
    grid = Grid(1, 16) if grid is None else grid
    if p is None and q is None:
        p = VariableExponent.constant(2.0, grid.shape, grid.period)
        q = VariableExponent.constant(2.0, grid.shape, grid.period)
    p, q = _default_pq(grid, p, q)
    closed = p.is_constant and q.is_constant and p.p_minus >= 1 and q.p_minus >= 1
    C = float(sum(2.0 ** (-abs(l) * delta) for l in range(-(terms - 1), terms)))
    constants, violations = {}, 0
    for flavor in ("besov", "tl"):
        draw = _nonneg if closed else _bounded_nonneg
        r1 = _convolution_ratios(seed, trials, delta, p, q, grid, terms, flavor, draw)
        constants[f"{flavor}_seed_a"] = float(r1.max())
        if closed:
            violations += int(np.sum(r1 > C * (1 + HOLDER_SLACK)))
        else:
            r2 = _convolution_ratios(seed + 1, trials, delta, p, q, grid, terms, flavor, draw)
            constants[f"{flavor}_seed_b"] = float(r2.max())
    if closed:
        return CheckReport("convolution", violations == 0, trials, violations, constants, None,
                           f"closed-form C = {C:.6g}", {"C": C, "delta": delta})
    drift = max(_relative_drift(constants[f"{f}_seed_a"], constants[f"{f}_seed_b"]) for f in ("besov", "tl"))
    return CheckReport("convolution", drift <= TIGHT_DRIFT, trials, 0, constants, drift,
                       f"relative drift <= {TIGHT_DRIFT:g}", {"C_constant_case": C, "delta": delta})


def check_power_sum(seed: int = 0, trials: int = 1000, q: float = 1.0, delta: float = 1.0,
                    length: int = 30) -> CheckReport:
    """``(sum_{l>=1} 2^(-l delta q) a_l)^(1/q) <= C sum_{l>=1} 2^(-l delta/2) a_l^(1/q)``.

    For ``q >= 1`` the constant is 1 and violations are counted; for
    ``q < 1`` the fitted constant is compared across two seeds.
    """
    if not (0 < q < math.inf and delta > 0):
        raise InvalidConfigError("need 0 < q < inf and delta > 0")
    l = np.arange(1, length + 1)

    def ratios(sd):
        a = _rng(sd).uniform(size=(trials, length))
        lhs = np.sum(2.0 ** (-l * delta * q) * a, axis=1) ** (1 / q)
        rhs = np.sum(2.0 ** (-l * delta / 2) * a ** (1 / q), axis=1)
        return lhs / rhs

    r1 = ratios(seed)
    if q >= 1:
        bad = int(np.sum(r1 > 1 + 1e-12))
        return CheckReport("powersum", bad == 0, trials, bad, {"max_ratio": float(r1.max())}, None,
                           "C = 1", {"q": q, "delta": delta})
    r2 = ratios(seed + 1)
    c1, c2 = float(r1.max()), float(r2.max())
    drift = _relative_drift(c1, c2)
    return CheckReport("powersum", drift <= TIGHT_DRIFT, trials, 0, {"seed_a": c1, "seed_b": c2}, drift,
                       f"relative drift <= {TIGHT_DRIFT:g}", {"q": q, "delta": delta})


def _periodic_convolve(kernel, values, grid):
    """``(kernel * values)(x) = sum_y kernel(x - y) values(y) dV`` over the grid axes."""
    axes = tuple(range(-grid.dim, 0))
    spec = np.fft.fftn(kernel, axes=axes) * np.fft.fftn(values, axes=axes)
    return np.fft.ifftn(spec, axes=axes).real * grid.cell_volume


def _eta_stack(grid, levels, m):
    return np.stack([eta_kernel(grid, nu, m).values.real for nu in levels])


def check_eta_convolution(seed: int = 0, trials: int = 1000, m=None, p=None, q=None, flavor: str = "besov",
                          grid: Grid | None = None, terms: int = 4) -> CheckReport:
    """``||(eta_{nu,m} * f_nu)_nu|| <= c ||(f_nu)_nu||`` with ``c`` fitted over two seeds.

    B flavor needs ``p >= 1`` and ``m > n + c_log(1/q)``; F flavor needs
    ``1 < p_minus, q_minus`` with finite suprema and ``m > n``. ``m``
    defaults to the threshold plus one.
    """
    grid = Grid(1, 32) if grid is None else grid
    p, q = _default_pq(grid, p, q)
    n = grid.dim
    if flavor == "besov":
        threshold = n + q.clog_estimate
        if p.p_minus < 1:
            raise PreconditionError("eta convolution in l_q(L_p) needs p >= 1")
    elif flavor == "tl":
        threshold = n
        if not (p.p_minus > 1 and q.p_minus > 1 and math.isfinite(p.p_plus) and math.isfinite(q.p_plus)):
            raise PreconditionError("eta convolution in L_p(l_q) needs 1 < p_minus, q_minus and finite suprema")
    else:
        raise InvalidConfigError(f"flavor must be besov or tl, got {flavor!r}")
    m = threshold + 1 if m is None else float(m)
    if not m > threshold:
        raise PreconditionError(f"m = {m:g} must exceed {threshold:g}")
    eta = _eta_stack(grid, range(terms), m)
    norm = lqlp_norm_array if flavor == "besov" else lplq_norm_array

    def fitted(sd):
        f = _bounded_nonneg(_rng(sd), (trials, terms) + grid.shape)
        conv = _periodic_convolve(eta[None], f, grid)
        return float(np.max(norm(conv, p, q, grid.cell_volume) / norm(f, p, q, grid.cell_volume)))

    c1, c2 = fitted(seed), fitted(seed + 1)
    drift = _relative_drift(c1, c2)
    return CheckReport(f"eta_{flavor}", drift <= TIGHT_DRIFT, trials, 0, {"seed_a": c1, "seed_b": c2}, drift,
                       f"relative drift <= {TIGHT_DRIFT:g}", {"m": m, "threshold": threshold})


def check_eta_ball_convolution(k: int = 0, l=range(6), m=None, grid: Grid | None = None) -> CheckReport:
    """``eta_{k+l,m} * [2^(kn) chi_{2^-k B}] <= C eta_{k,m}``; ``C`` fitted per ``l``.

    Stability means the largest and smallest fitted constants over ``l``
    differ by at most a factor 2.
    """
    grid = Grid(1, 1024) if grid is None else grid
    n = grid.dim
    m = n + 2.0 if m is None else float(m)
    if not m > n:
        raise PreconditionError(f"m = {m:g} must exceed n = {n}")
    ls = [l] if isinstance(l, int) else list(l)
    radius = 2.0**-k
    if radius > grid.period / 4:
        raise InvalidConfigError("ball radius exceeds a quarter period")
    ball = 2.0 ** (k * n) * (grid.origin_distance() <= radius)
    rhs = eta_kernel(grid, k, m).values.real
    constants = {}
    for li in ls:
        lhs = _periodic_convolve(eta_kernel(grid, k + li, m).values.real, ball, grid)
        constants[f"l={li}"] = float(np.max(lhs / rhs))
    drift = _factor_drift(list(constants.values()))
    return CheckReport("etaball", drift <= LOOSE_FACTOR, len(ls), 0, constants, drift,
                       f"max/min over l <= {LOOSE_FACTOR:g}", {"k": k, "m": m})


def _eta1_constant(s_values, grid, R, levels):
    """``max_{x,y} 2^(nu (s(x) - s(y))) (1 + 2^nu |x - y|)^-R`` per level (1D)."""
    if grid.dim != 1:
        raise InvalidConfigError("the eta1 check runs on 1D grids")
    d = grid.origin_distance()
    per_level = {}
    for nu in levels:
        best = 0.0
        for shift in range(grid.n):
            ds = s_values - np.roll(s_values, shift)
            best = max(best, float(np.max(2.0 ** (nu * ds))) * (1.0 + 2.0**nu * d[shift]) ** (-R))
        per_level[nu] = float(best)
    return per_level


def check_eta1(seed: int = 0, levels=range(8), grid: Grid | None = None) -> CheckReport:
    """``2^(nu s(x)) eta_{nu,m+R}(x-y) <= C 2^(nu s(y)) eta_{nu,m}(x-y)`` with ``R = c_log(s)``.

    ``s`` is ``1.5 + 0.3 sin(x + phase)`` plus a small random harmonic. The
    constant is fitted over all grid pairs and levels for two seeds.
    """
    grid = Grid(1, 256) if grid is None else grid
    x = grid.coordinates()[0]
    fitted, clogs = {}, {}
    for tag, sd in (("seed_a", seed), ("seed_b", seed + 1)):
        rng = _rng(sd)
        s = 1.5 + 0.3 * np.sin(x + rng.uniform(0, 2 * math.pi)) + 0.05 * np.cos(2 * x + rng.uniform(0, 2 * math.pi))
        R = SmoothnessFunction(s, grid.period).clog_estimate
        per_level = _eta1_constant(s, grid, R, levels)
        fitted[tag] = max(per_level.values())
        clogs[tag] = R
    drift = _factor_drift(list(fitted.values()))
    return CheckReport("eta1", drift <= LOOSE_FACTOR, len(list(levels)), 0, fitted, drift,
                       f"max/min across seeds <= {LOOSE_FACTOR:g}", {"R": clogs})


def check_r_trick(seed: int = 0, trials: int = 100, r_values=(0.5, 1.0, 2.0), levels=range(5), m=None,
                  grid: Grid | None = None) -> CheckReport:
    """``|g(x)| <= c (eta_{nu,m} * |g|^r (x))^(1/r)`` for ``supp g^ in |xi| <= 2^(nu+1)``."""
    grid = Grid(1, 256) if grid is None else grid
    m = grid.dim + 1.0 if m is None else float(m)
    if not m > grid.dim:
        raise PreconditionError(f"m = {m:g} must exceed n = {grid.dim}")
    levels = list(levels)
    if 2.0 ** (max(levels) + 1) > grid.nyquist:
        raise InvalidConfigError("top level exceeds the grid's Nyquist frequency")

    def fitted(sd):
        out = {}
        for r in r_values:
            best = 0.0
            for nu in levels:
                rng = _rng(sd, nu)
                g = np.stack([_band_limited(grid, rng, 2.0 ** (nu + 1), 0.0) for _ in range(trials)])
                mag = np.abs(g)
                conv = _periodic_convolve(eta_kernel(grid, nu, m).values.real[None], mag**r, grid)
                best = max(best, float(np.max(mag / np.maximum(conv, 1e-300) ** (1 / r))))
            out[r] = best
        return out

    a, b = fitted(seed), fitted(seed + 1)
    constants = {f"r={r}_seed_a": a[r] for r in r_values}
    constants.update({f"r={r}_seed_b": b[r] for r in r_values})
    drift = max(_factor_drift([a[r], b[r]]) for r in r_values)
    return CheckReport("rtrick", drift <= LOOSE_FACTOR, trials, 0, constants, drift,
                       f"max/min across seeds <= {LOOSE_FACTOR:g}", {"m": m})


def check_dif_peetre(seed: int = 0, trials: int = 20, M: int = 2, a: float = 2.0, radii=(4.0, 8.0, 16.0),
                     grid: Grid | None = None) -> CheckReport:
    """``|Delta^M_h f| <= C max(1, |bh|^a) min(1, |bh|^M) P_{b,a} f`` for ``supp f^ in |xi| <= b``.

    ``P_{b,a} f(x) = sup_z |f(x - z)| / (1 + |b z|^a)`` over grid points and
    ``h`` runs over grid offsets up to a quarter period.
    """
    grid = Grid(1, 256) if grid is None else grid
    if grid.dim != 1:
        raise InvalidConfigError("the dif-Peetre check runs on 1D grids")
    steps = np.unique(np.round(np.geomspace(1, grid.n // 4, 24)).astype(int))

    def fitted(sd):
        out = {}
        for b in radii:
            rng = _rng(sd, int(b))
            f = np.stack([_band_limited(grid, rng, b, 0.0) for _ in range(trials)])
            P = peetre_maximal_array(np.abs(f), np.full(trials, b), a, grid, form="additive")
            best = 0.0
            for j in steps:
                bh = b * j * grid.spacing
                diff = sum(c * np.roll(f, -(M - i) * j, axis=1)
                           for i, c in enumerate((-1) ** i * math.comb(M, i) for i in range(M + 1)))
                factor = max(1.0, bh**a) * min(1.0, bh**M)
                best = max(best, float(np.max(np.abs(diff) / (factor * P))))
            out[b] = best
        return out

    A, B = fitted(seed), fitted(seed + 1)
    constants = {f"b={b:g}_seed_a": A[b] for b in radii}
    constants.update({f"b={b:g}_seed_b": B[b] for b in radii})
    drift = _factor_drift(list(A.values()) + list(B.values()))
    return CheckReport("difpeetre", drift <= LOOSE_FACTOR, trials, 0, constants, drift,
                       f"max/min over b and seeds <= {LOOSE_FACTOR:g}", {"M": M, "a": a})


def hardy_littlewood_maximal(values, grid: Grid) -> np.ndarray:
    """Centred Hardy-Littlewood maximal function over grid balls (1D) or cubes (2D).

    ``values`` may carry leading batch axes; radii run over whole grid
    spacings up to half the period.
    """
    v = np.abs(np.asarray(values, dtype=float))
    n = grid.n
    if grid.dim == 1:
        ext = np.concatenate([v, v, v], axis=-1)
        csum = np.concatenate([np.zeros(v.shape[:-1] + (1,)), np.cumsum(ext, axis=-1)], axis=-1)
        centre = np.arange(n) + n
        out = v.copy()
        for r in range(1, n // 2):
            avg = (csum[..., centre + r + 1] - csum[..., centre - r]) / (2 * r + 1)
            out = np.maximum(out, avg)
        return out
    ext = np.tile(v, (1,) * (v.ndim - 2) + (3, 3))
    csum = np.cumsum(np.cumsum(ext, axis=-1), axis=-2)
    csum = np.pad(csum, [(0, 0)] * (v.ndim - 2) + [(1, 0), (1, 0)])
    c = np.arange(n) + n
    out = v.copy()
    for r in range(1, n // 2):
        hi, lo = c + r + 1, c - r
        box = (csum[..., hi[:, None], hi[None, :]] - csum[..., lo[:, None], hi[None, :]]
               - csum[..., hi[:, None], lo[None, :]] + csum[..., lo[:, None], lo[None, :]])
        out = np.maximum(out, box / (2 * r + 1) ** 2)
    return out


def check_maximal(seed: int = 0, trials: int = 200, p=None, q=None, grid: Grid | None = None,
                  terms: int = 4) -> CheckReport:
    """Boundedness of the maximal operator on l_q(L_p) and L_p(l_q) for constant ``q``.

    Needs ``p_minus > 1`` and ``1 < q < inf`` for the L_p(l_q) case.
    """
    grid = Grid(1, 64) if grid is None else grid
    if q is None:
        q = VariableExponent.constant(2.0, grid.shape, grid.period)
    p, q = _default_pq(grid, p, q)
    if not (p.p_minus > 1 and q.is_constant and 1 < q.p_minus < math.inf):
        raise PreconditionError("maximal check needs p_minus > 1 and a constant 1 < q < inf")

    def fitted(sd):
        f = _bounded_nonneg(_rng(sd), (trials, terms) + grid.shape)
        Mf = hardy_littlewood_maximal(f, grid)
        dV = grid.cell_volume
        return {
            "besov": float(np.max(lqlp_norm_array(Mf, p, q, dV) / lqlp_norm_array(f, p, q, dV))),
            "tl": float(np.max(lplq_norm_array(Mf, p, q, dV) / lplq_norm_array(f, p, q, dV))),
        }

    A, B = fitted(seed), fitted(seed + 1)
    constants = {f"{k}_seed_a": v for k, v in A.items()}
    constants.update({f"{k}_seed_b": v for k, v in B.items()})
    drift = max(_factor_drift([A[k], B[k]]) for k in A)
    return CheckReport("maximal", drift <= LOOSE_FACTOR, trials, 0, constants, drift,
                       f"max/min across seeds <= {LOOSE_FACTOR:g}", {})


SUITES = {
    "holder": lambda seed, trials: [check_mixed_holder(seed, trials)],
    "convolution": lambda seed, trials: [check_discrete_convolution(seed, trials)],
    "powersum": lambda seed, trials: [check_power_sum(seed, trials, q=1.0), check_power_sum(seed, trials, q=0.5)],
    "eta": lambda seed, trials: [check_eta_convolution(seed, trials, flavor="besov"),
                                 check_eta_convolution(seed, trials, flavor="tl")],
    "etaball": lambda seed, trials: [check_eta_ball_convolution()],
    "difpeetre": lambda seed, trials: [check_dif_peetre(seed, max(1, trials // 50))],
    "eta1": lambda seed, trials: [check_eta1(seed)],
    "rtrick": lambda seed, trials: [check_r_trick(seed, max(1, trials // 10))],
    "maximal": lambda seed, trials: [check_maximal(seed, max(1, trials // 5))],
}


def run_suite(name: str, seed: int = 0, trials: int = 1000) -> list[CheckReport]:
    """Run one named suite, or every suite for ``"all"``."""
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](seed, trials)]
    if name not in SUITES:
        raise InvalidConfigError(f"unknown suite {name!r}; choose all or one of {', '.join(SUITES)}")
    return SUITES[name](seed, trials)
