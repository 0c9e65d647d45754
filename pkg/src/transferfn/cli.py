"""Command-line surface: data ingestion and drivers for every capability.

Exit codes: 0 ok, 2 usage, 3 data, 4 numeric/convergence.  All delimited
output starts with a ``# schema:`` comment so downstream readers can pin
the column layout.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .density_band import KernelSpec, confidence_band
from .distributions import FAMILIES, Gamma, KnownDistribution, Normal, Uniform
from .empirical import Sample
from .errors import ConfigError, ConvergenceError, DomainError
from .estimator import estimate_with_ci
from .gof_test import monte_carlo_p_value, test
from .simulate import (
    DGPConfig,
    TRANSFERS,
    generate,
    get_transfer,
    run_coverage_study,
    run_test_table,
)
from .subsampling import subsample_ci

__all__ = ["main"]

MISSING_TOKENS = ("?", "", "NA", "nan")


class UsageError(Exception):
    """Bad flag value detected after parsing; exits 2."""


class DataError(Exception):
    """Dataset could not be read or parsed; exits 3."""


# ---------------------------------------------------------------- ingestion


def _parse_float(token: str):
    try:
        value = float(token)
    except ValueError:
        return None
    return value


def read_column(path: str, selector: str, delimiter: str = ",") -> np.ndarray:
    """One numeric column from a delimited file.

    ``selector`` is a 0-based index or a header name.  Rows whose selected
    field is a missing token ('?', empty, NA) are dropped; any other
    non-numeric field is a data error.
    """
    try:
        with open(path, newline="") as fh:
            rows = [
                row
                for row in csv.reader(fh, delimiter=delimiter)
                if row and any(f.strip() for f in row) and not row[0].lstrip().startswith("#")
            ]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")

    first = [f.strip() for f in rows[0]]
    try:
        idx = int(selector)
        has_header = idx < len(first) and first[idx] not in MISSING_TOKENS and _parse_float(first[idx]) is None
    except ValueError:
        if selector not in first:
            raise DataError(f"column {selector!r} not found in header of {path}") from None
        idx = first.index(selector)
        has_header = True

    out = []
    for lineno, row in enumerate(rows[1:] if has_header else rows, start=2 if has_header else 1):
        if idx >= len(row):
            raise DataError(f"{path}:{lineno}: row has no column {idx}")
        token = row[idx].strip()
        if token in MISSING_TOKENS:
            continue
        value = _parse_float(token)
        if value is None or not np.isfinite(value):
            raise DataError(f"{path}:{lineno}: cannot parse {token!r} as a finite real")
        out.append(value)
    if len(out) < 2:
        raise DataError(f"{path}: fewer than 2 usable rows in column {selector!r}")
    return np.asarray(out, dtype=float)


# ---------------------------------------------------------------- dist spec


def parse_dist(spec: str) -> KnownDistribution:
    """'family:params' -> distribution.

    normal:MEAN,SD  uniform:LO,HI  gamma:SHAPE,RATE with the second gamma
    entry also accepted as rate=R or scale=S (the data source quotes both
    conventions; internally everything is shape/rate).
    """
    family, _, rest = spec.partition(":")
    family = family.strip().lower()
    parts = [p.strip() for p in rest.split(",") if p.strip()] if rest else []
    try:
        if family == "normal":
            if len(parts) != 2:
                raise UsageError("--dist normal takes normal:MEAN,SD")
            return Normal(mean=float(parts[0]), sd=float(parts[1]))
        if family == "uniform":
            if len(parts) != 2:
                raise UsageError("--dist uniform takes uniform:LO,HI")
            return Uniform(lo=float(parts[0]), hi=float(parts[1]))
        if family == "gamma":
            if len(parts) != 2:
                raise UsageError("--dist gamma takes gamma:SHAPE,RATE (or rate=R / scale=S)")
            shape = float(parts[0])
            second = parts[1]
            if second.startswith("scale="):
                return Gamma.from_scale(shape, float(second[len("scale="):]))
            if second.startswith("rate="):
                return Gamma(shape=shape, rate=float(second[len("rate="):]))
            return Gamma(shape=shape, rate=float(second))
    except (ValueError, DomainError) as exc:
        raise UsageError(f"bad --dist value {spec!r}: {exc}") from exc
    raise UsageError(f"unknown distribution family {family!r}; known: normal, gamma, uniform")


def parse_grid(spec: str) -> tuple[float, float, int]:
    """'P1..P2xN' (or :N) on the quantile scale."""
    body = spec.replace("×", "x")
    lohi, sep, count = body.rpartition("x")
    if not sep:
        lohi, sep, count = body.rpartition(":")
    if not sep:
        raise UsageError(f"bad --grid value {spec!r}; expected P1..P2xN")
    lo, sep2, hi = lohi.partition("..")
    try:
        p_lo, p_hi, npts = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"bad --grid value {spec!r}; expected P1..P2xN") from None
    if not (sep2 and 0.0 < p_lo <= p_hi < 1.0 and npts >= 1):
        raise UsageError(f"bad --grid value {spec!r}; need 0 < P1 <= P2 < 1 and N >= 1")
    return p_lo, p_hi, npts


def _check_alpha(alpha: float, upper: float = 1.0) -> float:
    if not (0.0 < alpha < upper):
        raise UsageError(f"--alpha must lie in (0, {upper}) (got {alpha})")
    return alpha


def _check_point_in_support(x: float, dist: KnownDistribution) -> None:
    a, b = dist.support
    if not (a < x < b):
        raise UsageError(f"--x {x} is outside the input-law support ({a}, {b})")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_rows(path, schema: str, header, rows, delimiter: str = ","):
    fh, close = _open_out(path)
    try:
        fh.write(f"# schema: {schema}\n")
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if close:
            fh.close()


# ---------------------------------------------------------------- commands


def _cmd_estimate(args) -> int:
    alpha = _check_alpha(args.alpha, upper=0.5)
    dist = parse_dist(args.dist)
    y = read_column(args.data, args.y_col, delimiter=args.delim)
    sample = Sample(y)

    if args.x is not None:
        _check_point_in_support(args.x, dist)
        xs = np.asarray([args.x], dtype=float)
    else:
        p_lo, p_hi, npts = parse_grid(args.grid)
        xs = np.asarray(dist.quantile(np.linspace(p_lo, p_hi, npts)), dtype=float)

    res = estimate_with_ci(sample, dist, xs, alpha)
    header = ["x", "ghat", "ci_lo", "ci_hi"]
    columns = [res.xs, res.ghat, res.ci_lo, res.ci_hi]
    if args.band:
        if xs.size < 2:
            raise UsageError("--band needs a grid (use --grid, not --x)")
        band = confidence_band(
            sample,
            dist,
            (float(xs[0]), float(xs[-1])),
            alpha,
            spec=KernelSpec(bandwidth=args.bandwidth),
            xs=xs,
        )
        header += ["band_lo", "band_hi", "flagged"]
        columns += [band.band_lo, band.band_hi, band.flagged.astype(int)]
    rows = list(zip(*[np.asarray(c) for c in columns]))
    _write_rows(args.out, "transferfn.estimate.v1", header, rows, delimiter=args.delim)
    return 0


def _cmd_test(args) -> int:
    alpha = _check_alpha(args.alpha)
    try:
        hyp = get_transfer(args.h)
    except ConfigError:
        raise UsageError(f"unknown --h {args.h!r}; known: {', '.join(sorted(TRANSFERS))}") from None
    y = read_column(args.data, args.y_col, delimiter=args.delim)
    sample = Sample(y)

    if args.mc_reps is not None:
        if args.mc_reps < 99:
            raise UsageError("--mc-reps must be at least 99")
        family = args.dist.partition(":")[0].strip().lower()
        if family not in FAMILIES:
            raise UsageError(f"unknown family {family!r} in --dist; known: {', '.join(FAMILIES)}")
        fitted = FAMILIES[family](sample.values)
        result = test(sample, fitted, hyp, alpha)
        p_value = monte_carlo_p_value(sample, family, hyp, replications=args.mc_reps, seed=args.seed)
        payload = {
            "statistic": result.statistic,
            "critical": result.critical,
            "p_value": p_value,
            "decision": "reject" if p_value < alpha else "accept",
            "method": "monte_carlo",
            "replications": args.mc_reps,
            "level": 1.0 - alpha,
            "fitted": repr(fitted),
        }
    else:
        dist = parse_dist(args.dist)
        result = test(sample, dist, hyp, alpha)
        payload = {
            "statistic": result.statistic,
            "critical": result.critical,
            "p_value": result.p_value,
            "decision": result.decision,
            "method": result.method,
            "level": result.level,
        }
    if args.json:
        json.dump(payload, sys.stdout)
        sys.stdout.write("\n")
    else:
        for key in ("statistic", "critical", "p_value", "decision", "method"):
            print(f"{key}: {payload[key]}")
    return 0


def _cmd_subsample_ci(args) -> int:
    alpha = _check_alpha(args.alpha)
    dist = parse_dist(args.dist)
    y = read_column(args.data, args.y_col, delimiter=args.delim)
    sample = Sample(y)
    _check_point_in_support(args.x, dist)
    block = args.block
    if block is not None and not (2 <= block < sample.n):
        raise UsageError(f"--block must satisfy 2 <= b < n = {sample.n}")
    res = subsample_ci(sample, dist, args.x, alpha, b=block)
    payload = {
        "x": res.x,
        "ghat": res.ghat,
        "d_quantile": res.d_quantile,
        "ci_lo": res.ci[0],
        "ci_hi": res.ci[1],
        "block": res.b,
        "n": res.n,
        "level": res.level,
    }
    if args.json:
        json.dump(payload, sys.stdout)
        sys.stdout.write("\n")
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")
    return 0


def _cmd_fit(args) -> int:
    if args.family not in FAMILIES:
        raise UsageError(f"unknown --family {args.family!r}; known: {', '.join(FAMILIES)}")
    y = read_column(args.data, args.y_col, delimiter=args.delim)
    fitted = FAMILIES[args.family](y)
    payload = {"family": args.family, "n": int(y.size)}
    if isinstance(fitted, Gamma):
        payload.update(shape=fitted.shape, rate=fitted.rate, scale=fitted.scale)
    elif isinstance(fitted, Normal):
        payload.update(mean=fitted.mean, sd=fitted.sd)
    else:
        payload.update(lo=fitted.lo, hi=fitted.hi)
    if args.json:
        json.dump(payload, sys.stdout)
        sys.stdout.write("\n")
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")
    if args.qq_out is not None:
        sorted_y = np.sort(y)
        ps = (np.arange(1, y.size + 1) - 0.5) / y.size
        fitted_q = np.asarray(fitted.quantile(ps), dtype=float)
        rows = list(zip(ps, fitted_q, sorted_y))
        _write_rows(args.qq_out, "transferfn.qq.v1", ["p", "fitted_quantile", "observed"], rows, delimiter=args.delim)
    return 0


def _cmd_simulate_table2(args) -> int:
    alpha = _check_alpha(args.alpha)
    report = run_test_table(n=args.n, alpha=alpha, repetitions=args.reps, seed=args.seed)
    rows = report.to_rows()
    _write_rows(args.out, "transferfn.table.v1", rows[0], rows[1:], delimiter=args.delim)
    return 0


def _cmd_simulate_coverage(args) -> int:
    alpha = _check_alpha(args.alpha, upper=0.5 if args.method == "ci" else 1.0)
    config = DGPConfig(
        transfer=args.transfer,
        n=args.n,
        seed=args.seed,
        ma_order=args.ma_order,
        ma_decay=args.ma_decay,
    )
    xs = np.asarray([float(tok) for tok in args.x], dtype=float)
    report = run_coverage_study(
        config, xs, alpha, args.reps, method=args.method, block=args.block
    )
    rows = report.to_rows()
    _write_rows(args.out, "transferfn.coverage.v1", rows[0], rows[1:], delimiter=args.delim)
    if args.method == "band":
        print(f"simultaneous: {report.extras['simultaneous']}", file=sys.stderr)
    return 0


def _cmd_simulate_data(args) -> int:
    config = DGPConfig(
        transfer=args.transfer,
        n=args.n,
        seed=args.seed,
        ma_order=args.ma_order,
        ma_decay=args.ma_decay,
    )
    z, y = generate(config)
    _write_rows(args.out, "transferfn.dgp.v1", ["z", "y"], list(zip(z, y)), delimiter=args.delim)
    return 0


# ---------------------------------------------------------------- parser


def _add_common_data_flags(p):
    p.add_argument("--data", required=True, help="delimited text file")
    p.add_argument("--y-col", default="0", help="column index or header name of the observations")
    p.add_argument("--delim", default=",", help="field delimiter (default comma)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transferfn",
        description="Estimation and testing of a strictly increasing transfer function from outputs with a known input law.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="transfer-function estimate with pointwise CIs (and optionally a band)")
    _add_common_data_flags(p)
    p.add_argument("--dist", required=True, help="input law, e.g. gamma:10.97,rate=0.0270")
    p.add_argument("--grid", default="0.01..0.99x201", help="quantile-scale grid P1..P2xN (default 0.01..0.99x201)")
    p.add_argument("--x", type=float, default=None, help="single evaluation point instead of a grid")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--band", action="store_true", help="append uniform confidence-band columns")
    p.add_argument("--bandwidth", type=float, default=None, help="explicit KDE bandwidth (default n^(-1/6))")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("test", help="goodness-of-fit test of g = h")
    _add_common_data_flags(p)
    p.add_argument("--dist", required=True, help="input law; with --mc-reps only the family name is used")
    p.add_argument("--h", required=True, help=f"hypothesis name, one of: {', '.join(sorted(TRANSFERS))}")
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--mc-reps", type=int, default=None, help="parametric-bootstrap p-value with this many refits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("subsample-ci", help="block-subsampling CI for dependent data")
    _add_common_data_flags(p)
    p.add_argument("--dist", required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--block", type=int, default=None, help="block length (default ceil(n^(4/5)))")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_subsample_ci)

    p = sub.add_parser("fit", help="fit a distribution family by maximum likelihood; optionally emit Q-Q pairs")
    _add_common_data_flags(p)
    p.add_argument("--family", default="gamma", help=f"one of: {', '.join(FAMILIES)}")
    p.add_argument("--qq-out", default=None, help="write Q-Q pairs (p, fitted quantile, observed) here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="seeded simulation studies")
    ssub = p.add_subparsers(dest="study", required=True)

    q = ssub.add_parser("table2", help="correct-test-ratio grid over (h, perturbation) cells")
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--reps", type=int, default=200)
    q.add_argument("--alpha", type=float, default=0.15)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="-")
    q.add_argument("--delim", default=",")
    q.set_defaults(func=_cmd_simulate_table2)

    q = ssub.add_parser("coverage", help="coverage study for ci/band/subsample intervals")
    q.add_argument("--transfer", required=True, help=f"one of: {', '.join(sorted(TRANSFERS))}")
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--reps", type=int, default=200)
    q.add_argument("--alpha", type=float, default=0.01)
    q.add_argument("--method", choices=("ci", "band", "subsample"), default="ci")
    q.add_argument("--x", nargs="+", required=True, help="evaluation points")
    q.add_argument("--ma-order", type=int, default=0)
    q.add_argument("--ma-decay", type=float, default=0.9)
    q.add_argument("--block", type=int, default=None)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="-")
    q.add_argument("--delim", default=",")
    q.set_defaults(func=_cmd_simulate_coverage)

    q = ssub.add_parser("data", help="write one generated (z, y) series")
    q.add_argument("--transfer", required=True)
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--ma-order", type=int, default=0)
    q.add_argument("--ma-decay", type=float, default=0.9)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="-")
    q.add_argument("--delim", default=",")
    q.set_defaults(func=_cmd_simulate_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ConvergenceError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
