"""Command-line surface: estimation, simulation, transport queries, scans.

Every subcommand is a thin adapter over the library; outputs are line-oriented
``key=value`` records (CSV is reserved for bulk results).  Exit codes:
0 success, 1 usage error, 2 data/config error, 3 failed certification scan.
"""

import argparse
import os
import sys

import numpy as np

from . import certify as certify_mod
from .estimator import build_grid, estimate
from .kernels import FAMILIES, Kernel, cross_inner
from .metrics import MixingDistribution, w1, w2_squared
from .simharness import ConfigError, emit_csv, load_config, run_experiment

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CERTIFY = 3

_CERTIFY_CHECKS = ("kappa", "cs", "l2w2", "crucial", "decorrelation")

# default scan settings for `contamix certify`
_CERTIFY_DEFAULTS = {
    "kappa": dict(M=3.0, steps=300),
    "cs": dict(range_=5.0, steps=100, diagonal_margin=0.2),
    "l2w2": dict(lambda_steps=9, mu_range=3.0, mu_steps=12),
    "crucial": dict(lambda_steps=9, mu_range=3.0, mu_steps=12),
    "decorrelation": dict(a_values=(1.0, 2.0, 5.0, 10.0, 20.0, 50.0)),
}


class _UsageError(Exception):
    pass


class _DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _build_kernel(args) -> Kernel:
    alpha = getattr(args, "alpha", None)
    dim = getattr(args, "dim", 1)
    try:
        return Kernel(args.kernel, alpha=alpha, dim=dim)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _parse_vector(text: str, flag: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise _UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from exc


def _read_data(path: str, dim: int) -> np.ndarray:
    """Headerless CSV of coordinates, one sample per line."""
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise _DataError(f"cannot read data file {path}: {exc}") from exc
    rows = []
    for ln, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != dim:
            raise _DataError(f"{path}:{ln}: expected {dim} coordinate(s), got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise _DataError(f"{path}:{ln}: malformed number in {line!r}") from None
    if not rows:
        raise _DataError(f"data file {path} contains no samples")
    data = np.array(rows)
    return data[:, 0] if dim == 1 else data


def _cmd_estimate(args) -> int:
    if args.bound_m <= 0:
        raise _UsageError("--bound-m must be positive")
    kernel = _build_kernel(args)
    data = _read_data(args.data, kernel.dim)
    try:
        grid = build_grid(len(data), args.bound_m, kernel.dim)
        result = estimate(kernel, data, args.bound_m)
    except ValueError as exc:  # grid overflow, n too small
        raise _DataError(str(exc)) from exc
    print(f"lambda_hat={_fmt(result.lambda_hat)}")
    print("mu_hat=" + ",".join(_fmt(float(v)) for v in result.mu_hat))
    print(f"contrast_value={_fmt(result.contrast_value)}")
    print(f"n={len(data)}")
    print(f"lambda_levels={grid.lambda_levels.shape[0]}")
    print(f"mu_levels={grid.mu_levels.shape[0]}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
        if args.paper:
            from dataclasses import replace

            config = replace(config, replicates=1000)
        result = run_experiment(config, workers=args.workers)
        emit_csv(result, args.out, args.raw)
    except (ConfigError, OSError) as exc:
        raise _DataError(str(exc)) from exc
    print(f"summary={args.out}")
    if args.raw:
        print(f"raw={args.raw}")
    return EXIT_OK


def _cmd_wasserstein(args) -> int:
    for flag, lam in (("--lambda1", args.lambda1), ("--lambda2", args.lambda2)):
        if not 0.0 <= lam <= 1.0:
            raise _UsageError(f"{flag} must lie in [0, 1], got {lam}")
    mu1 = _parse_vector(args.mu1, "--mu1")
    mu2 = _parse_vector(args.mu2, "--mu2")
    if mu1.shape != mu2.shape:
        raise _UsageError(f"--mu1 and --mu2 have different dimensions ({mu1.size} vs {mu2.size})")
    g1 = MixingDistribution(args.lambda1, mu1)
    g2 = MixingDistribution(args.lambda2, mu2)
    if args.p == 1:
        print(f"w1={_fmt(w1(g1, g2))}")
    else:
        print(f"w2_squared={_fmt(w2_squared(g1, g2))}")
    return EXIT_OK


def _cmd_inner_product(args) -> int:
    kernel = _build_kernel(args)
    mu = _parse_vector(args.mu, "--mu")
    value = cross_inner(kernel, float(mu[0]) if kernel.dim == 1 else mu)
    print(f"inner_product={_fmt(value)}")
    return EXIT_OK


def _run_scan(kernel: Kernel, check: str):
    kw = _CERTIFY_DEFAULTS[check]
    if check == "kappa":
        return certify_mod.scan_kappa(kernel, **kw)
    if check == "cs":
        return certify_mod.scan_cs_ratio(kernel, **kw)
    if check == "l2w2":
        return certify_mod.scan_l2w2(kernel, **kw)
    if check == "crucial":
        return certify_mod.scan_crucial_inequality(kernel, **kw)
    return certify_mod.decorrelation_profile(kernel, kw["a_values"])


def _cmd_certify(args) -> int:
    kernel = _build_kernel(args)
    report = _run_scan(kernel, args.check)
    desc = kernel.family if kernel.alpha is None else f"{kernel.family}(alpha={_fmt(kernel.alpha)})"
    print(f"check={report.check_name}")
    print(f"kernel={desc}")
    for key, val in report.grid_spec.items():
        print(f"grid_{key}={_fmt(val)}")
    print(f"extremal_value={_fmt(report.extremal_value)}")
    print("extremal_point=" + ",".join(_fmt(float(v)) for v in report.extremal_point))
    print(f"passed={_fmt(report.passed)}")
    print(f"tolerance={_fmt(report.tolerance)}")
    for key, val in report.details.items():
        print(f"{key}={_fmt(val)}")
    if args.out:
        try:
            with open(args.out, "w", newline="\n") as fh:
                fh.write(",".join(report.surface_columns) + "\n")
                for row in report.surface:
                    fh.write(",".join(_fmt(float(v)) for v in row) + "\n")
        except OSError as exc:
            raise _DataError(f"cannot write surface CSV {args.out}: {exc}") from exc
        print(f"surface={args.out}")
    return EXIT_OK if report.passed else EXIT_CERTIFY


def _default_workers() -> int:
    env = os.environ.get("CONTAMIX_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _make_parser() -> _Parser:
    parser = _Parser(prog="contamix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_kernel_flags(p, with_dim=False):
        p.add_argument("--kernel", required=True, choices=FAMILIES)
        p.add_argument("--alpha", type=float, default=None, help="skew_gaussian asymmetry")
        if with_dim:
            p.add_argument("--dim", type=int, default=1)

    p = sub.add_parser("estimate", help="fit (lambda, mu) to a data file")
    add_kernel_flags(p, with_dim=True)
    p.add_argument("--data", required=True, help="headerless CSV, one sample per line")
    p.add_argument("--bound-m", type=float, required=True, dest="bound_m")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("simulate", help="run a Monte-Carlo study from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="summary CSV path")
    p.add_argument("--raw", default=None, help="optional raw per-replicate CSV path")
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--paper", action="store_true", help="full-scale preset (1000 replicates)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("wasserstein", help="transport distance between mixing measures")
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--mu1", required=True, help="comma-separated coordinates")
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--mu2", required=True)
    p.add_argument("--p", type=int, choices=(1, 2), default=2)
    p.set_defaults(func=_cmd_wasserstein)

    p = sub.add_parser("inner-product", help="translation inner product <phi, phi_mu>")
    add_kernel_flags(p, with_dim=True)
    p.add_argument("--mu", required=True, help="comma-separated coordinates")
    p.set_defaults(func=_cmd_inner_product)

    p = sub.add_parser("certify", help="run a numerical certification scan")
    add_kernel_flags(p)
    p.add_argument("--check", required=True, choices=_CERTIFY_CHECKS)
    p.add_argument("--out", default=None, help="optional CSV of the scanned surface")
    p.set_defaults(func=_cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"contamix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DataError as exc:
        print(f"contamix: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
