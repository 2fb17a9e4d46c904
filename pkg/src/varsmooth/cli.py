"""Command-line interface.

Exit codes: 0 success, 1 violated condition or failed check, 2 usage or
input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .differences import (
    besov_norm_differences,
    besov_norm_differences_2ml,
    check_conditions,
    difference_range,
    tl_norm_differences,
    tl_norm_differences_2ml,
)
from .exceptions import (
    InvalidInputError,
    KernelConstructionError,
    NumericFailureError,
    PreconditionError,
    VarSmoothError,
)
from .exponents import SmoothnessFunction, VariableExponent, two_microlocal_weights, weights_from_smoothness
from .expression import evaluate_on_grid, parse_expression, validate_role
from .frequency import (
    besov_norm_fourier,
    build_local_means_kernels,
    build_resolution_of_unity,
    default_levels,
    kernel_diagnostics,
    local_means_norm,
    peetre_norm,
    resolve_peetre_parameter,
    tl_norm_fourier,
)
from .grid import Grid, read_csv
from .harness import SUITES, ExperimentConfig, _parse_weights, run_equivalence_experiment, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_CONFIG = Path(__file__).parent / "data" / "default_equivalence.cfg"


class UsageError(Exception):
    """Bad flag value; the message starts with the flag name."""


def _field(grid, text, flag, role, flavor):
    try:
        values = evaluate_on_grid(parse_expression(text), grid)
        return validate_role(values, role, flavor)
    except InvalidInputError as err:
        raise UsageError(f"{flag}: {err}") from None


def _exponents(grid, args):
    p = VariableExponent(_field(grid, args.p, "--p", "p", args.flavor), grid.period)
    q = VariableExponent(_field(grid, args.q, "--q", "q", args.flavor), grid.period)
    return p, q


def _grid(args):
    try:
        return Grid(args.dim, args.n, args.period)
    except VarSmoothError as err:
        raise UsageError(f"--n/--dim/--period: {err}") from None


def _weights_arg(text):
    try:
        return _parse_weights(text)
    except VarSmoothError as err:
        raise UsageError(f"--weights: {err}") from None


def _emit(payload: dict, out):
    text = json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def cmd_norm(args) -> int:
    if (args.s is None) == (args.weights is None):
        raise UsageError("--s/--weights: give exactly one of them")
    try:
        f = read_csv(args.input)
    except (OSError, InvalidInputError) as err:
        raise UsageError(f"--input: {err}") from None
    grid = f.grid
    J = default_levels(grid) if args.J is None else args.J
    p, q = _exponents(grid, args)
    if args.s is not None:
        s = SmoothnessFunction(_field(grid, args.s, "--s", "s", args.flavor), grid.period)
        w = weights_from_smoothness(s, J)
        gate = s
    else:
        ws, wsp, wx0 = _weights_arg(args.weights)
        w = two_microlocal_weights(ws, wsp, wx0 if len(wx0) > 1 else wx0[0], J, grid)
        s = None
        gate = w
    conditions = check_conditions(gate, p, q, args.M, args.flavor)
    report = {"method": args.method, "flavor": args.flavor, "input": str(args.input), "J": J, "M": args.M,
              "conditions": conditions.as_dict(), "contractual": conditions.ok, "norm": None}
    if not conditions.ok and not args.allow_violations:
        print("conditions violated: " + "; ".join(conditions.violated), file=sys.stderr)
        _emit(report, args.out)
        return EXIT_FAIL
    if args.method == "fourier":
        fn = besov_norm_fourier if args.flavor == "besov" else tl_norm_fourier
        value = fn(f, w, p, q, build_resolution_of_unity(grid, J))
    elif args.method == "peetre":
        try:
            a = args.a if args.a == "auto" else float(args.a)
        except ValueError:
            raise UsageError(f"--a: expected 'auto' or a real number, got {args.a!r}") from None
        a = resolve_peetre_parameter(a, p, q, w.alpha, args.flavor, grid.dim)
        report["a"] = a
        value = peetre_norm(f, w, p, q, a, args.flavor, build_resolution_of_unity(grid, J))
    elif args.method == "localmeans":
        kernels = build_local_means_kernels(grid, args.R, args.radius)
        report["tauber_epsilon"] = kernels.tauber_epsilon
        value = local_means_norm(f, kernels, w, p, q, args.flavor, J)
    else:
        k_range = difference_range(grid, (-J if args.k_lo is None else args.k_lo,
                                          J if args.k_hi is None else args.k_hi))
        report["k_range"] = list(k_range)
        if s is not None:
            fn = besov_norm_differences if args.flavor == "besov" else tl_norm_differences
            value = fn(f, s, p, q, args.M, k_range, strict=False)
        else:
            fn = besov_norm_differences_2ml if args.flavor == "besov" else tl_norm_differences_2ml
            value = fn(f, w, p, q, args.M, k_range, strict=False)
    report["norm"] = float(value)
    _emit(report, args.out)
    return EXIT_OK


def cmd_equivalence(args) -> int:
    overrides = {k: getattr(args, k) for k in ("flavor", "n", "dim", "period", "R", "radius", "seed",
                                               "sample_count", "family")}
    try:
        cfg = ExperimentConfig.from_file(args.config, overrides)
    except OSError as err:
        raise UsageError(f"--config: {err}") from None
    report = run_equivalence_experiment(cfg)
    if args.out:
        report.write(args.out)
    else:
        print(report.to_json())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_inequalities(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials: must be at least 1")
    reports = run_suite(args.suite, args.seed, args.trials)
    payload = {"suite": args.suite, "seed": args.seed, "trials": args.trials,
               "checks": [r.as_dict() for r in reports], "pass": all(r.passed for r in reports)}
    _emit(payload, args.out)
    return EXIT_OK if payload["pass"] else EXIT_FAIL


def cmd_kernels(args) -> int:
    grid = _grid(args)
    diag = kernel_diagnostics(build_local_means_kernels(grid, args.R, args.radius))
    ok = True
    if args.check:
        ok = diag["max_relative_moment"] <= 1e-10 and diag["support_ok"] and diag["tauber_epsilon"] > 0
        diag["check"] = ok
    _emit(diag, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_conditions(args) -> int:
    grid = _grid(args)
    p, q = _exponents(grid, args)
    s = SmoothnessFunction(_field(grid, args.s, "--s", "s", args.flavor), grid.period)
    report = check_conditions(s, p, q, args.M, args.flavor)
    _emit(report.as_dict(), None)
    return EXIT_OK if report.ok else EXIT_FAIL


def _grid_flags(sub, n=512):
    sub.add_argument("--n", type=int, default=n, help="grid points per axis (power of two)")
    sub.add_argument("--dim", type=int, default=1, choices=(1, 2))
    sub.add_argument("--period", type=float, default=2 * math.pi)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varsmooth", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    flavors = ("besov", "tl")

    norm = subs.add_parser("norm", help="norm of a sampled function")
    norm.add_argument("--input", required=True, help="CSV file with samples")
    norm.add_argument("--flavor", choices=flavors, default="besov")
    norm.add_argument("--method", choices=("fourier", "localmeans", "differences", "peetre"), default="fourier")
    norm.add_argument("--s", help="smoothness expression")
    norm.add_argument("--weights", help="2ml:<s>,<s'>,<x0>")
    norm.add_argument("--p", default="2")
    norm.add_argument("--q", default="2")
    norm.add_argument("--M", type=int, default=2)
    norm.add_argument("--J", type=int)
    norm.add_argument("--a", default="auto")
    norm.add_argument("--k-lo", dest="k_lo", type=int)
    norm.add_argument("--k-hi", dest="k_hi", type=int)
    norm.add_argument("--R", type=int, default=2)
    norm.add_argument("--radius", type=float, default=1.0)
    norm.add_argument("--allow-violations", action="store_true",
                      help="compute even when the conditions fail (result is non-contractual)")
    norm.add_argument("--out")
    norm.set_defaults(func=cmd_norm)

    eq = subs.add_parser("equivalence", help="norm-equivalence stability experiment")
    eq.add_argument("--config", default=str(DEFAULT_CONFIG))
    eq.add_argument("--out")
    eq.add_argument("--flavor", choices=flavors)
    eq.add_argument("--n", type=int)
    eq.add_argument("--dim", type=int, choices=(1, 2))
    eq.add_argument("--period", type=float)
    eq.add_argument("--R", type=int)
    eq.add_argument("--radius", type=float)
    eq.add_argument("--seed", type=int)
    eq.add_argument("--sample-count", dest="sample_count", type=int)
    eq.add_argument("--family")
    eq.set_defaults(func=cmd_equivalence)

    ineq = subs.add_parser("inequalities", help="randomized inequality suites")
    ineq.add_argument("--suite", choices=("all",) + tuple(SUITES), default="all")
    ineq.add_argument("--trials", type=int, default=1000)
    ineq.add_argument("--seed", type=int, default=0)
    ineq.add_argument("--out")
    ineq.set_defaults(func=cmd_inequalities)

    ker = subs.add_parser("kernels", help="local-means kernel diagnostics")
    ker.add_argument("--R", type=int, default=2)
    ker.add_argument("--radius", type=float, default=1.0)
    ker.add_argument("--check", action="store_true", help="exit 1 unless moments, support and epsilon pass")
    ker.add_argument("--out")
    _grid_flags(ker)
    ker.set_defaults(func=cmd_kernels)

    cond = subs.add_parser("conditions", help="check the hypotheses of the difference characterization")
    cond.add_argument("--s", required=True)
    cond.add_argument("--p", required=True)
    cond.add_argument("--q", required=True)
    cond.add_argument("--M", type=int, required=True)
    cond.add_argument("--flavor", choices=flavors, default="besov")
    _grid_flags(cond)
    cond.set_defaults(func=cmd_conditions)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"varsmooth {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, KernelConstructionError) as err:
        print(f"varsmooth {args.command}: {err}", file=sys.stderr)
        return EXIT_FAIL
    except NumericFailureError as err:
        print(f"varsmooth {args.command}: numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except VarSmoothError as err:
        print(f"varsmooth {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
