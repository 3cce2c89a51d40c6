"""Command-line interface: every capability as a deterministic subcommand.

Same argv and same seed always produce byte-identical output. Exit codes:
0 success, 1 validation/usage error (diagnostic names the offending
field), 2 refused budget (exact convolution or quantizer cell cap).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .dist import (
    cdf_scaled,
    convolve,
    convolve_power,
    dist_from_text,
    dist_to_json_dict,
    dist_to_text,
    standardize,
)
from .errors import BudgetError, CltLabError, ValidationError
from .mixture import decompose, mixture_to_json_dict
from .normal import BinomialSpec, dml_kolmogorov, stirling_ratio
from .pipeline import CltExperiment, default_grid, run_clt_table, verify_theta_lln
from .quantize import ChebyshevCheckConfig, chebyshev_check, get_source, quantize
from .rationals import parse_rational, rational_str
from .verify import run_battery


class _UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; this package reserves 2
    # for budget refusals, so route usage problems through exit code 1.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        ns = tuple(int(chunk) for chunk in text.split(","))
    except ValueError:
        raise ValidationError(f"--n-list must be comma-separated integers, got {text!r}")
    if not ns or any(n < 1 for n in ns):
        raise ValidationError("--n-list entries must be positive")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValidationError("--n-list must be strictly increasing")
    return ns


def _parse_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"--grid must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"--grid parts must be numbers, got {text!r}")
    if step <= 0:
        raise ValidationError("--grid step must be positive")
    if hi < lo:
        raise ValidationError("--grid needs hi >= lo")
    return tuple(default_grid(lo, hi, step))


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Fraction):
        return rational_str(value)
    return str(value)


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(args, csv_text: str, json_obj) -> str:
    if getattr(args, "json", False) or args.format == "json":
        return json.dumps(json_obj, indent=2) + "\n"
    return csv_text


def _cmd_decompose(args) -> str:
    m = decompose(dist_from_text(args.dist))
    rows = []
    for w, c in m.components:
        if c.degenerate:
            rows.append([w, "", "", "", "true"])
        else:
            rows.append([w, c.pos, c.neg, c.prob_pos, "false"])
    return _emit(args, _csv(["w", "a", "b", "p_pos", "zero"], rows), mixture_to_json_dict(m))


def _cmd_convolve(args) -> str:
    d = dist_from_text(args.dist)
    if (args.other is None) == (args.power is None):
        raise ValidationError("convolve needs exactly one of --with or --power")
    if args.other is not None:
        result = convolve(d, dist_from_text(args.other))
    else:
        if args.power < 1:
            raise ValidationError("--power must be a positive integer")
        result = convolve_power(d, args.power, "exact")
    return _emit(
        args, dist_to_text(result) + "\n", dist_to_json_dict(result)
    )


def _cmd_clt_table(args) -> str:
    dist = standardize(dist_from_text(args.dist))
    grid = _parse_grid(args.grid) if args.grid else tuple(default_grid())
    e = CltExperiment(
        dist=dist, n_list=_parse_n_list(args.n_list), x_grid=grid, mode=args.mode
    )
    rows = run_clt_table(e)
    csv_text = _csv(["n", "sup_abs_err"], [[r.n, r.statistic] for r in rows])
    return _emit(
        args,
        csv_text,
        {"rows": [{"n": r.n, "sup_abs_err": r.statistic} for r in rows]},
    )


def _cmd_dml_table(args) -> str:
    p = parse_rational(args.p)
    rows = []
    for n in _parse_n_list(args.n_list):
        rows.append([n, p, dml_kolmogorov(BinomialSpec(n, p)), stirling_ratio(n)])
    csv_text = _csv(["n", "p", "d_k", "stirling_ratio"], rows)
    return _emit(
        args,
        csv_text,
        {
            "rows": [
                {
                    "n": n,
                    "p": rational_str(pv),
                    "d_k": dk,
                    "stirling_ratio": sr,
                }
                for n, pv, dk, sr in rows
            ]
        },
    )


def _cmd_stirling(args) -> str:
    rows = [[n, stirling_ratio(n)] for n in _parse_n_list(args.n_list)]
    return _emit(
        args,
        _csv(["n", "stirling_ratio"], rows),
        {"rows": [{"n": n, "stirling_ratio": r} for n, r in rows]},
    )


def _cmd_lln_check(args) -> str:
    m = decompose(dist_from_text(args.dist))
    rep = verify_theta_lln(m, args.n, args.seed)
    rows = []
    for i, ((w, _), count) in enumerate(zip(m.components, rep.counts)):
        freq = count / args.n
        rows.append([i, w, freq, abs(freq - float(w))])
    csv_text = _csv(["component", "weight", "emp_freq", "abs_err"], rows)
    return _emit(
        args,
        csv_text,
        {
            "n": args.n,
            "seed": args.seed,
            "max_abs_freq_err": rep.max_abs_freq_err,
            "components": [
                {
                    "component": i,
                    "weight": rational_str(w),
                    "emp_freq": freq,
                    "abs_err": err,
                }
                for i, w, freq, err in rows
            ],
        },
    )


def _cmd_approx(args) -> str:
    if args.eta <= 0:
        raise ValidationError("--eta must be positive")
    q = quantize(get_source(args.family), args.eta)
    report = {
        "family": args.family,
        "eta_requested": q.eta_requested,
        "eta_achieved": q.eta_achieved,
        "cells": q.cell_count,
        "boundaries": [float(b) for b in q.boundaries],
        "dist": dist_to_json_dict(q.simple),
    }
    return dist_to_text(q.simple) + "\n" + json.dumps(report, indent=2) + "\n"


def _cmd_cheby_check(args) -> str:
    cfg = ChebyshevCheckConfig(
        delta=args.delta,
        epsilon=args.epsilon,
        n=args.n,
        samples=args.samples,
        seed=args.seed,
        x_ref=args.x_ref,
    )
    rep = chebyshev_check(get_source(args.family), cfg)
    csv_text = _csv(
        ["bound", "empirical", "mc_band", "pass"],
        [[rep.bound, rep.empirical, rep.mc_band, "true" if rep.passed else "false"]],
    )
    return _emit(
        args,
        csv_text,
        {
            "family": args.family,
            "delta": rep.delta,
            "epsilon": rep.epsilon,
            "eta": rep.eta,
            "n": rep.n,
            "samples": rep.samples,
            "seed": rep.seed,
            "bound": rep.bound,
            "empirical": rep.empirical,
            "mc_band": rep.mc_band,
            "pass": rep.passed,
            "x_ref": rep.x_ref,
            "cdf_gap": rep.cdf_gap,
            "cdf_gap_bound": rep.cdf_gap_bound,
        },
    )


def _add_common(sub, seed=False):
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    sub.add_argument("--json", action="store_true", help="shorthand for --format json")
    sub.add_argument("--out", default=None, help="write output to PATH instead of stdout")
    if seed:
        sub.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cltlab", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("decompose", help="mean-zero law as two-valued mixture")
    p.add_argument("--dist", required=True, help='text format, e.g. "-1:1/3,0:1/3,1:1/3"')
    _add_common(p)
    p.set_defaults(func=_cmd_decompose)

    p = subs.add_parser("convolve", help="exact convolution or n-fold power")
    p.add_argument("--dist", required=True)
    p.add_argument("--with", dest="other", default=None, help="second distribution")
    p.add_argument("--power", type=int, default=None, help="n-fold power (exact mode)")
    _add_common(p)
    p.set_defaults(func=_cmd_convolve)

    p = subs.add_parser("clt-table", help="sup |CDF(S_n) - phi| over a grid, per n")
    p.add_argument("--dist", required=True, help="base law; standardized automatically")
    p.add_argument("--n-list", required=True)
    p.add_argument("--grid", default=None, help="lo:hi:step (default -4:4:0.05)")
    p.add_argument("--mode", choices=["exact", "lattice-float"], default="lattice-float")
    _add_common(p)
    p.set_defaults(func=_cmd_clt_table)

    p = subs.add_parser("dml-table", help="binomial-vs-normal Kolmogorov distances")
    p.add_argument("--p", required=True, help="success probability, e.g. 1/2")
    p.add_argument("--n-list", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_dml_table)

    p = subs.add_parser("stirling", help="n! over sqrt(2 pi n)(n/e)^n")
    p.add_argument("--n-list", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_stirling)

    p = subs.add_parser("lln-check", help="selector frequencies vs mixture weights")
    p.add_argument("--dist", required=True, help="mean-zero law; decomposed first")
    p.add_argument("--n", type=int, required=True)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_lln_check)

    p = subs.add_parser("approx", help="quantize a source to a simple law")
    p.add_argument("--family", required=True)
    p.add_argument("--eta", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_approx)

    p = subs.add_parser("cheby-check", help="coupling bound by seeded simulation")
    p.add_argument("--family", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--x-ref", type=float, default=0.0)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_cheby_check)

    p = subs.add_parser("verify", help="run the invariant battery")
    p.add_argument("--out", default=None)
    p.set_defaults(func=None)

    return parser


def _cmd_verify(args) -> tuple[str, bool]:
    lines: list[str] = []
    ok = run_battery(out=lines.append)
    return "\n".join(lines) + "\n", ok


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            text, ok = _cmd_verify(args)
            code = 0 if ok else 1
        else:
            text = args.func(args)
            code = 0
    except BudgetError as exc:
        print(f"cltlab: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except CltLabError as exc:
        print(f"cltlab: error: {exc}", file=sys.stderr)
        return 1

    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
