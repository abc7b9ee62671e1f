"""Batch command-line driver for discovery, analysis, and validation.

Four subcommands:

* ``discover`` — run the randomized search at a given (k, s) and emit one
  result row per distinct convergent formula found;
* ``analyze`` — root-condition report for an explicit polynomial or for
  the formula generated by an explicit seed;
* ``validate-known`` — integrity, root, order, and simulation checks over
  the built-in catalog of known formulas;
* ``order-check`` — empirical truncation-order measurement for the
  catalog or for a user-supplied formula.

Result rows follow the classic TPOLY layout: the normalized polynomial
coefficients (highest power first), a separating literal 0, the deviation
of the maximal root magnitude from 1, the second-largest root magnitude,
and the coefficient c of tau * dx.  Float mode prints 4 decimal places;
``--rational`` switches the formula pipeline to exact arithmetic and
prints lowest-term fractions (the second magnitude, an algebraic number,
is shown as its closest small-denominator rational).  ``--format json``
emits one JSON object per row with full-precision floats; identical
invocations with the same --rng-seed produce byte-identical output
regardless of FD_FORGE_THREADS.

Exit codes: 0 success, 1 internal error or failed validation, 2 bad
arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .charpoly import analyze
from .search import SearchConfig, discover
from .taylor_system import (
    DifferenceFormula,
    Dimensions,
    NonNormalizableSeedError,
    seed_to_formula,
)
from .validation import catalog, empirical_order, validate_catalog

__all__ = ["main", "build_parser", "TpolyRecord", "rationalize"]

# Flags whose values are comma-separated vectors (or signed scalars) and may
# start with "-"; they get joined into --flag=value form so the parser never
# mistakes the value for an option name.
_VALUE_FLAGS = ("--init-seed", "--poly", "--seed", "--c")


def _join_value_flags(argv: list) -> list:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _parse_vector(text: str) -> list:
    """Comma-separated numbers -> exact Fractions ("1.5" and "3/2" both work)."""
    toks = [t for t in (s.strip() for s in text.split(",")) if t]
    if not toks:
        raise ValueError("empty vector")
    return [Fraction(t) for t in toks]


def rationalize(x: float, tol: float = 1e-6) -> Fraction:
    """Shortest continued-fraction convergent of ``x`` within ``tol``.

    This mirrors the usual terminal display of near-rational floats: walk
    the continued-fraction expansion and stop at the first convergent
    whose error is within tol * max(1, |x|).
    """
    target = Fraction(x).limit_denominator(10**12)
    bound = tol * max(1.0, abs(x))
    # Convergents h_n/k_n of the continued fraction of target, via the
    # standard recurrence h_n = a_n h_{n-1} + h_{n-2} (h_{-1}=1, h_{-2}=0).
    h_pp, h_p = 0, 1
    k_pp, k_p = 1, 0
    rest = target
    conv = Fraction(0)
    for _ in range(64):
        a = rest.numerator // rest.denominator
        h = a * h_p + h_pp
        k = a * k_p + k_pp
        conv = Fraction(h, k)
        if abs(float(conv) - x) <= bound or rest == a:
            return conv
        h_pp, h_p = h_p, h
        k_pp, k_p = k_p, k
        rest = 1 / (rest - a)
    return conv


@dataclass(frozen=True)
class TpolyRecord:
    """One result row in the TPOLY field order."""

    k: int
    s: int
    p: tuple
    c: float
    max_deviation: float
    second_magnitude: float
    seed: tuple
    convergent: bool
    exact: Optional[DifferenceFormula] = None

    def table_line(self, rational: bool = False) -> str:
        if rational and self.exact is not None:
            toks = [str(v) for v in self.exact.p]
            toks.append("0")
            toks.append(f"{self.max_deviation:.4f}")
            toks.append(str(rationalize(self.second_magnitude)))
            toks.append(str(self.exact.c))
        else:
            toks = [f"{v:.4f}" for v in self.p]
            toks.append("0")
            toks.append(f"{self.max_deviation:.4f}")
            toks.append(f"{self.second_magnitude:.4f}")
            toks.append(f"{self.c:.4f}")
        return " ".join(toks)

    def json_line(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "s": self.s,
                "p": list(self.p),
                "c": self.c,
                "max_dev": self.max_deviation,
                "second_mag": self.second_magnitude,
                "seed": list(self.seed),
                "convergent": self.convergent,
            },
            separators=(",", ":"),
        )

    def csv_line(self) -> str:
        return ",".join(
            [
                str(self.k),
                str(self.s),
                ";".join(repr(v) for v in self.p),
                repr(self.c),
                repr(self.max_deviation),
                repr(self.second_magnitude),
                ";".join(repr(v) for v in self.seed),
                str(self.convergent).lower(),
            ]
        )


_CSV_HEADER = "k,s,p,c,max_dev,second_mag,seed,convergent"


def _dims(parser: argparse.ArgumentParser, args) -> Dimensions:
    try:
        return Dimensions(args.k, args.s, allow_large_k=args.allow_large_k)
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))


def _exact_twin(
    cand_seed: tuple, dims: Dimensions, init: Optional[list]
) -> Optional[DifferenceFormula]:
    """Exact-arithmetic version of a candidate's formula.

    When the final seed is (to the bit) the user's --init-seed, the
    user's Fractions are used so e.g. 110 stays 110; otherwise each float
    component is converted exactly.
    """
    if init is not None and tuple(float(v) for v in init) == cand_seed:
        y = init
    else:
        y = [Fraction(v) for v in cand_seed]
    try:
        return seed_to_formula(dims, y, exact=True)
    except (ValueError, ArithmeticError):
        return None


def cmd_discover(args, parser: argparse.ArgumentParser) -> int:
    dims = _dims(parser, args)
    init_fracs = None
    if args.init_seed is not None:
        try:
            init_fracs = _parse_vector(args.init_seed)
        except (ValueError, ZeroDivisionError) as exc:
            parser.error(f"--init-seed: {exc}")
        if len(init_fracs) != dims.s:
            parser.error(
                f"--init-seed has {len(init_fracs)} entries, expected s = {dims.s}"
            )
    try:
        config = SearchConfig(
            dims=dims,
            runs=args.runs,
            restarts=args.restarts,
            rng_seed=args.rng_seed,
            perturb_scale=args.perturb_scale,
        )
    except ValueError as exc:
        parser.error(str(exc))

    result = discover(
        config,
        initial_seed=None if init_fracs is None else [float(v) for v in init_fracs],
    )

    records = []
    for cand in result.candidates:
        exact = (
            _exact_twin(cand.seed_final, dims, init_fracs) if args.rational else None
        )
        records.append(
            TpolyRecord(
                k=dims.k,
                s=dims.s,
                p=cand.formula.p,
                c=cand.formula.c,
                max_deviation=cand.report.max_deviation,
                second_magnitude=cand.report.second_magnitude,
                seed=cand.seed_final,
                convergent=cand.report.convergent,
                exact=exact,
            )
        )

    if args.format == "json":
        lines = [r.json_line() for r in records]
    elif args.format == "csv":
        lines = [_CSV_HEADER] + [r.csv_line() for r in records]
    else:
        lines = [r.table_line(rational=args.rational) for r in records]
    text = "".join(line + "\n" for line in lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    hist = Counter(round(v, 3) for v in result.failure_plateaus)
    print(
        f"attempts={result.attempts} candidates={len(result.candidates)} "
        f"failed_runs={len(result.failure_plateaus)}",
        file=sys.stderr,
    )
    for level in sorted(hist):
        print(f"  plateau ~{level:.3f}  x{hist[level]}", file=sys.stderr)
    return 0


def _print_report(p_floats, out):
    report = analyze(p_floats)
    print("roots:", file=out)
    for z in report.roots:
        print(f"  {z.real:+.12f} {z.imag:+.12f}i   |z| = {abs(z):.12f}", file=out)
    print(f"max magnitude:    {report.max_magnitude:.12f}", file=out)
    print(f"max deviation:    {report.max_deviation:+.3e}", file=out)
    print(f"second magnitude: {report.second_magnitude:.12f}", file=out)
    print(f"convergent:       {'yes' if report.convergent else 'no'}", file=out)
    return report


def cmd_analyze(args, parser: argparse.ArgumentParser) -> int:
    out = sys.stdout
    if args.poly is not None:
        try:
            coeffs = _parse_vector(args.poly)
        except (ValueError, ZeroDivisionError) as exc:
            parser.error(f"--poly: {exc}")
        if coeffs[0] == 0:
            parser.error("--poly: leading coefficient must be nonzero")
        print("polynomial:", " ".join(str(v) for v in coeffs), file=out)
        _print_report([float(v) for v in coeffs], out)
        return 0

    if args.k is None or args.s is None:
        parser.error("--seed requires --k and --s")
    dims = _dims(parser, args)
    try:
        y = _parse_vector(args.seed)
    except (ValueError, ZeroDivisionError) as exc:
        parser.error(f"--seed: {exc}")
    if len(y) != dims.s:
        parser.error(f"--seed has {len(y)} entries, expected s = {dims.s}")
    try:
        exact = seed_to_formula(dims, y, exact=True)
    except NonNormalizableSeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    flt = exact.as_float()
    print("seed:", " ".join(str(v) for v in y), file=out)
    print("p (float):   ", " ".join(f"{v:.4f}" for v in flt.p), file=out)
    print("p (exact):   ", " ".join(str(v) for v in exact.p), file=out)
    print(f"c (float):    {float(exact.c):.4f}", file=out)
    print(f"c (exact):    {exact.c}", file=out)
    _print_report(list(flt.p), out)
    return 0


def cmd_validate_known(args, parser: argparse.ArgumentParser) -> int:
    results = validate_catalog(corrupt=args.corrupt)
    if args.json:
        print(json.dumps(results, indent=2))
    else:
        head = (
            f"{'label':5} {'p(1)=0':7} {'c ok':5} {'conv':5} "
            f"{'slope':>7} {'order ok':8} {'sim err':>10} {'ok':3}"
        )
        print(head)
        for r in results:
            slope = "--" if r["fitted_slope"] is None else f"{r['fitted_slope']:.2f}"
            print(
                f"{r['label']:5} {str(r['root_at_1']):7} {str(r['c_consistent']):5} "
                f"{str(r['convergent']):5} {slope:>7} {str(r['order_ok']):8} "
                f"{r['sim_max_error']:10.2e} {str(r['ok']):3}"
            )
    return 0 if all(r["ok"] for r in results) else 1


def cmd_order_check(args, parser: argparse.ArgumentParser) -> int:
    checks = []
    if args.poly is not None:
        if args.c is None or args.claimed is None:
            parser.error("--poly needs --c and --claimed")
        try:
            coeffs = _parse_vector(args.poly)
            c = Fraction(args.c)
        except (ValueError, ZeroDivisionError) as exc:
            parser.error(str(exc))
        if coeffs[0] == 0:
            parser.error("--poly: leading coefficient must be nonzero")
        # --c is the tau*dx weight on the same scale as --poly, so both are
        # normalized by the leading coefficient together.
        p = tuple(v / coeffs[0] for v in coeffs)
        formula = DifferenceFormula(None, p, c / coeffs[0])
        checks.append(("custom", formula, args.claimed))
    elif args.seed is not None:
        if args.k is None or args.s is None:
            parser.error("--seed requires --k and --s")
        dims = _dims(parser, args)
        try:
            y = _parse_vector(args.seed)
        except (ValueError, ZeroDivisionError) as exc:
            parser.error(f"--seed: {exc}")
        if len(y) != dims.s:
            parser.error(f"--seed has {len(y)} entries, expected s = {dims.s}")
        formula = seed_to_formula(dims, y, exact=True)
        claimed = args.claimed if args.claimed is not None else dims.order
        checks.append((f"seed(k={dims.k},s={dims.s})", formula, claimed))
    else:
        for kf in catalog():
            checks.append((kf.label, kf.to_formula(), kf.claimed_order))

    rows = [
        empirical_order(f, claimed, formula_id=label) for label, f, claimed in checks
    ]
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "id": r.formula_id,
                        "claimed": r.claimed_order,
                        "slope": r.fitted_slope,
                        "underflow": r.underflow,
                        "pass": r.passed,
                    }
                    for r in rows
                ],
                indent=2,
            )
        )
    else:
        print(f"{'id':18} {'claimed':>7} {'slope':>8} {'underflow':9} {'pass':4}")
        for r in rows:
            slope = "--" if r.fitted_slope is None else f"{r.fitted_slope:.3f}"
            print(
                f"{r.formula_id:18} {r.claimed_order:>7} {slope:>8} "
                f"{str(r.underflow):9} {str(r.passed):4}"
            )
    return 0 if all(r.passed for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdforge",
        description="Construct, analyze, and discover convergent one-step-ahead "
        "finite difference formulas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_dims(p, required=True):
        p.add_argument("--k", type=int, required=required, help="derivative orders to cancel")
        p.add_argument("--s", type=int, required=required, help="seed length")
        p.add_argument(
            "--allow-large-k",
            action="store_true",
            help="override the k <= 8 factorial-growth guard",
        )

    d = sub.add_parser("discover", help="randomized search for convergent formulas")
    add_dims(d)
    d.add_argument("--runs", type=int, default=20, help="outer-loop runs")
    d.add_argument("--restarts", type=int, default=10, help="inner restarts per run")
    d.add_argument("--rng-seed", type=int, default=0, help="reproducibility seed")
    d.add_argument("--init-seed", help="comma-separated start seed for the first run")
    d.add_argument("--perturb-scale", type=float, default=0.1)
    d.add_argument("--rational", action="store_true", help="exact-arithmetic output")
    d.add_argument("--format", choices=("table", "json", "csv"), default="table")
    d.add_argument("--output", help="write result rows to this file instead of stdout")
    d.set_defaults(func=cmd_discover)

    a = sub.add_parser("analyze", help="root report for a polynomial or a seed")
    g = a.add_mutually_exclusive_group(required=True)
    g.add_argument("--poly", help="comma-separated polynomial, highest power first")
    g.add_argument("--seed", help="comma-separated seed (requires --k/--s)")
    a.add_argument("--k", type=int)
    a.add_argument("--s", type=int)
    a.add_argument("--allow-large-k", action="store_true")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("validate-known", help="check the built-in formula catalog")
    v.add_argument("--json", action="store_true", help="machine-readable report")
    v.add_argument(
        "--corrupt",
        choices=tuple("ABCDEF"),
        help="deliberately break one entry (negative control)",
    )
    v.set_defaults(func=cmd_validate_known)

    o = sub.add_parser("order-check", help="empirical truncation-order measurement")
    o.add_argument("--poly", help="comma-separated polynomial, highest power first")
    o.add_argument("--c", help="derivative weight for --poly")
    o.add_argument("--claimed", type=int, help="claimed truncation order")
    o.add_argument("--seed", help="comma-separated seed (requires --k/--s)")
    o.add_argument("--k", type=int)
    o.add_argument("--s", type=int)
    o.add_argument("--allow-large-k", action="store_true")
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_order_check)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    raw = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_join_value_flags(raw))
    try:
        return args.func(args, parser)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
