"""``ordered-spacings`` command-line tool.

Exit codes: 0 success, 1 failed check or precision error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from .coefficients import coefficient_table
from .distribution import get_distribution
from .errors import DegenerateDistributionError, DomainError, PrecisionError
from .inference import evaluate_data, quantile
from .model import BoundaryMode, Family, SpacingModel, StatKind, check_stat
from .montecarlo import draw_statistic
from .selfcheck import run_selfcheck
from .series import EvalPolicy, PointMass

__all__ = ["main", "build_parser"]

COMMANDS = ("pdf", "cdf", "sf", "quantile", "pvalue", "sample", "table", "selfcheck")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--family", choices=[f.value for f in Family])
    common.add_argument("--edges", choices=[b.value for b in BoundaryMode], default="with")
    common.add_argument("-n", type=int)
    common.add_argument("-k", type=int)
    common.add_argument("--grid", type=int, default=1000, dest="grid_points")
    common.add_argument("--input", dest="input_path")
    common.add_argument("--output", dest="output_path")
    common.add_argument("--p", type=float, nargs="+")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=int, default=10**6)
    common.add_argument("--mode", choices=["float", "rational", "auto"], default="auto")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = _Parser(prog="ordered-spacings",
                     description="Distributions of ordered uniform spacings and their partial sums.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "pdf": "density on a grid over the support",
        "cdf": "P[T <= x] on a grid",
        "sf": "P[T >= x] on a grid",
        "quantile": "inverse CDF for --p values or probabilities read from --input",
        "pvalue": "both tail probabilities for uniformised data read from --input",
        "sample": "Monte Carlo draws of the statistic",
        "table": "coefficient table for -n up to -k",
        "selfcheck": "run the invariant suite",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _read_numbers(path: str) -> list[float]:
    fh = sys.stdin if path == "-" else open(path, encoding="utf-8")
    try:
        out = []
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                out.append(float(text))
            except ValueError:
                raise UsageError(f"{path}:{lineno}: not a number: {text!r}") from None
        return out
    finally:
        if fh is not sys.stdin:
            fh.close()


def _policy(mode: str, n: int) -> EvalPolicy:
    if mode == "rational":
        pol = EvalPolicy(mode="rational")
        if n > pol.rational_n_max:
            raise UsageError(f"--mode rational is limited to n <= {pol.rational_n_max}")
        return pol
    return EvalPolicy(fallback=(mode == "auto"))


def _stat_request(a, need_n: bool = True) -> tuple[SpacingModel | None, StatKind]:
    if a.family is None:
        raise UsageError(f"{a.command} needs --family")
    if a.k is None:
        raise UsageError(f"{a.command} needs -k")
    if need_n and a.n is None:
        raise UsageError(f"{a.command} needs -n")
    stat = StatKind(a.family, a.k)
    model = None
    if need_n:
        model = SpacingModel(a.n, a.edges)
        check_stat(model, stat)
    return model, stat


def _grid(d, points: int) -> np.ndarray:
    if points < 2:
        raise UsageError("--grid needs at least 2 points")
    lo, hi = (0.0, 1.0) if isinstance(d, PointMass) else d.support
    xs = np.concatenate([np.linspace(lo, hi, points), d.breakpoints()])
    return np.unique(xs[(xs >= lo) & (xs <= hi)])


def _emit_xy(out, a, model, stat, xs, values) -> None:
    if a.format == "json":
        obj = {"command": a.command, "family": stat.family.value, "k": stat.k, "n": model.n,
               "edges": model.boundary_mode.value, "x": [float(x) for x in xs],
               "value": [float(v) for v in values]}
        out.write(json.dumps(obj) + "\n")
        return
    out.write("x,value\n")
    for x, v in zip(xs, values):
        out.write(f"{_fmt(x)},{_fmt(v)}\n")


def _run(a, out) -> int:
    cmd = a.command
    if cmd in ("pdf", "cdf", "sf"):
        model, stat = _stat_request(a)
        pol = _policy(a.mode, model.n)
        d = get_distribution(model, stat)
        if cmd == "pdf" and isinstance(d, PointMass):
            raise UsageError(f"{stat.family.value} with k={stat.k} is identically {d.at}; it has no density")
        xs = _grid(d, a.grid_points)
        values = getattr(d, cmd)(xs if pol.mode == "float" else list(xs), pol)
        _emit_xy(out, a, model, stat, xs, values)
        return 0

    if cmd == "quantile":
        model, stat = _stat_request(a)
        pol = _policy(a.mode, model.n)
        if a.p is not None:
            ps = list(a.p)
        elif a.input_path is not None:
            ps = _read_numbers(a.input_path)
        else:
            raise UsageError("quantile needs --p or --input")
        bad = [p for p in ps if not 0 <= p <= 1]
        if bad:
            raise UsageError(f"probabilities must lie in [0, 1], got {bad[0]!r}")
        qs = [quantile(model, stat, p, pol) for p in ps]
        if a.format == "json":
            out.write(json.dumps({"p": ps, "quantile": qs}) + "\n")
        else:
            out.write("p,quantile\n")
            for p, q in zip(ps, qs):
                out.write(f"{_fmt(p)},{_fmt(q)}\n")
        return 0

    if cmd == "pvalue":
        _, stat = _stat_request(a, need_n=False)
        if a.input_path is None:
            raise UsageError("pvalue needs --input (one uniformised value per line)")
        values = _read_numbers(a.input_path)
        if a.n is not None and a.n != len(values):
            raise UsageError(f"-n {a.n} does not match the {len(values)} values read")
        pol = _policy(a.mode, len(values)) if a.mode != "rational" else EvalPolicy()
        res = evaluate_data(values, stat, a.edges, pol)
        out.write(json.dumps(res.to_dict()) + "\n")
        return 0

    if cmd == "sample":
        model, stat = _stat_request(a)
        if a.count < 1:
            raise UsageError("--count must be positive")
        batch = draw_statistic(model, stat, a.seed, a.count)
        if a.format == "json":
            out.write(batch.summary_json() + "\n")
        else:
            batch.to_csv(out, header=("replication", "value"))
        return 0

    if cmd == "table":
        if a.n is None:
            raise UsageError("table needs -n")
        k_max = a.n if a.k is None else a.k
        if a.n < 1 or not 1 <= k_max <= a.n:
            raise UsageError("table needs n >= 1 and 1 <= k <= n")
        table = coefficient_table(a.n, k_max)
        if a.format == "json":
            obj = {
                "n": table.n, "k_max": table.k_max,
                "A": [{"k": k, "sign": v.log.sign, "log_magnitude": v.log.log_magnitude,
                       "numerator": str(v.exact.numerator), "denominator": str(v.exact.denominator)}
                      for k, v in sorted(table.A.items())],
                "a": [{"i": i, "k": k, "sign": v.log.sign, "log_magnitude": v.log.log_magnitude,
                       "numerator": str(v.exact.numerator), "denominator": str(v.exact.denominator)}
                      for (i, k), v in sorted(table.a.items(), key=lambda t: (t[0][1], t[0][0]))],
            }
            out.write(json.dumps(obj) + "\n")
        else:
            out.write(table.to_csv())
        return 0

    # selfcheck
    report = run_selfcheck()
    if a.format == "json":
        out.write(json.dumps({"ok": report.ok,
                              "counts": {k: {"passed": p, "total": t} for k, (p, t) in report.counts.items()},
                              "failures": report.failures}) + "\n")
    else:
        for line in report.lines():
            out.write(line + "\n")
    return 0 if report.ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        buf = io.StringIO()
        code = _run(a, buf)
    except (UsageError, DomainError, DegenerateDistributionError) as exc:
        print(f"ordered-spacings: error: {exc}", file=sys.stderr)
        return 2
    except PrecisionError as exc:
        print(f"ordered-spacings: precision error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ordered-spacings: error: {exc}", file=sys.stderr)
        return 2
    text = buf.getvalue()
    if a.output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(a.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return code
