"""Command line front end.

Every subcommand prints one report (JSON by default, CSV where tabular) and
exits 0 on success, 1 when a check it performs fails, 2 on usage errors.
Rationals are written ``a/b`` and dyadic points ``k/2^n``.  The environment
variables ``SINGBV_DEPTH`` and ``SINGBV_SEED`` override the default depth and
seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from singbv import algebra, bernoulli, dyadic, smoothing, transport, variation
from singbv.dyadic import DyadicInterval, DyadicRational
from singbv.errors import DomainError, NoWitnessError, RootClusterError

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- parsing

def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational a/b: {text!r}") from None


def parse_dyadic(text: str) -> DyadicRational:
    try:
        return DyadicRational.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_point(text: str):
    """``k/2^n`` -> DyadicRational, ``a/b`` or integer -> Fraction, else float."""
    if "^" in text:
        return parse_dyadic(text)
    try:
        return Fraction(text) if not any(c in text for c in ".eE") else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a point: {text!r}") from None


def parse_terms(text: str) -> variation.LinearCombination:
    """``"a1:p1,a2:p2"`` -> the combination ``a1 F_p1 + a2 F_p2``."""
    pairs = []
    for chunk in text.split(","):
        try:
            a, p = chunk.split(":")
            pairs.append((Fraction(a), Fraction(p)))
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad term {chunk!r}; expected coef:p") from None
    try:
        return variation.LinearCombination.of(pairs)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_levels(text: str) -> list[int]:
    """``"10-20"`` or ``"10,12,14"``."""
    try:
        if "-" in text:
            lo, hi = text.split("-")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from None


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"environment variable {name}={raw!r} is not an integer") from None


# ----------------------------------------------------------------- output

def exact(value: Fraction) -> dict:
    value = Fraction(value)
    return {"num": str(value.numerator), "den": str(value.denominator), "float": float(value)}


def emit(payload, fmt: str, out, rows=None, header=None) -> None:
    if fmt == "csv":
        if rows is None:
            raise UsageError("this subcommand has no CSV form; use --format json")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


# ----------------------------------------------------------------- handlers

def cmd_measure(args, out) -> int:
    point = args.interval if args.level is None else args.interval.at_level(args.level)
    I = DyadicInterval(point)
    counts = dyadic.digit_counts(I.left)
    left, right = dyadic.halves(I)
    if args.backend == "float":
        mass = bernoulli.interval_measure(args.p, I, "float")
        ml, mr = (bernoulli.interval_measure(args.p, J, "float") for J in (left, right))
        split_ok = math.isclose(ml + mr, mass, rel_tol=1e-12)
        value = {"num": None, "den": None, "float": mass}
    else:
        mass = bernoulli.interval_measure(args.p, I)
        ml, mr = (bernoulli.interval_measure(args.p, J) for J in (left, right))
        split_ok = ml == args.p * mass and ml + mr == mass
        value = exact(mass)
    payload = {
        "interval": str(I),
        "p": str(args.p),
        "zeros": counts.zeros,
        "ones": counts.ones,
        **value,
        "halves": [str(left), str(right)],
        "split_identity": split_ok,
        "paper_ref": "interval mass p^l (1-p)^r",
    }
    emit(payload, args.format, out, rows=[[str(I), payload["num"], payload["den"], payload["float"]]],
         header=["interval", "num", "den", "float"])
    return EXIT_OK if split_ok else EXIT_CHECK_FAILED


def cmd_cdf(args, out) -> int:
    x = float(args.x) if args.backend == "float" else args.x
    value = bernoulli.cdf(args.p, x, max(args.depth, 1))
    payload = {"p": str(args.p), "x": str(x), "paper_ref": "self-similar distribution function"}
    if isinstance(value, float):
        payload["float"] = value
    else:
        payload.update(exact(value))
    if args.integral:
        if isinstance(x, float):
            raise UsageError("--integral needs a dyadic --x")
        payload["integral"] = exact(bernoulli.antiderivative(args.p, x))
    emit(payload, args.format, out,
         rows=[[str(x), payload.get("num", ""), payload.get("den", ""), payload["float"]]],
         header=["x", "num", "den", "float"])
    return EXIT_OK


def _variation_rows(f, max_depth):
    rows = list(variation.variation_table(f, max_depth))
    monotone = all(b.value >= a.value for a, b in zip(rows, rows[1:]))
    bounded = all(r.value <= r.upper_bound for r in rows)
    return rows, monotone and bounded


def cmd_variation(args, out) -> int:
    rows, ok = _variation_rows(args.terms, args.max_depth if args.max_depth is not None else args.depth)
    payload = {
        "combination": str(args.terms),
        "rows": [{"n": r.level, "value": float(r.value), "upper_bound": float(r.upper_bound)} for r in rows],
        "monotone_and_bounded": ok,
        "paper_ref": "norm |f(0)| + Var(f) from dyadic partitions",
    }
    emit(payload, args.format, out,
         rows=[[r.level, repr(float(r.value)), repr(float(r.upper_bound))] for r in rows],
         header=["n", "value", "upper_bound"])
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_distance(args, out) -> int:
    if args.p == args.q:
        raise DomainError("distance needs distinct --p and --q")
    max_depth = args.max_depth if args.max_depth is not None else args.depth
    rows = [variation.distance(args.p, args.q, n) for n in range(1, max_depth + 1)]
    ok = all(r.value <= 2 for r in rows) and all(b.value >= a.value for a, b in zip(rows, rows[1:]))
    payload = {
        "p": str(args.p),
        "q": str(args.q),
        "rows": [{"n": r.level, "value": float(r.value), "upper_bound": float(r.upper_bound)} for r in rows],
        "checks_pass": ok,
        "paper_ref": "distance between distinct F_p equals 2",
    }
    emit(payload, args.format, out,
         rows=[[r.level, repr(float(r.value)), repr(float(r.upper_bound))] for r in rows],
         header=["n", "value", "upper_bound"])
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_nonvanishing(args, out) -> int:
    if args.backend != "exact":
        raise DomainError("nonvanishing runs on the exact backend only")
    rep = variation.nonvanishing_check(args.terms, args.depth)
    payload = {
        "combination": str(args.terms),
        "depth": rep.depth,
        "passed": rep.passed,
        "intervals_checked": rep.intervals_checked,
        "first_vanishing": None if rep.first_vanishing is None else str(rep.first_vanishing),
        "vanishing_classes": [list(c) for c in rep.vanishing_classes],
        "nonconstancy_certified": rep.nonconstancy_certified,
        "paper_ref": "combinations do not vanish on dyadic intervals",
    }
    emit(payload, args.format, out)
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


def cmd_transport(args, out) -> int:
    prob = transport.TransportProblem(DyadicInterval(args.i0), DyadicInterval(args.i1))
    J = transport.match_interval(prob)
    table = []
    ok = dyadic.digit_counts(J.left) == dyadic.digit_counts(prob.I1.left)
    for p in args.ps:
        mj, m1 = bernoulli.interval_measure(p, J), bernoulli.interval_measure(p, prob.I1)
        table.append([str(p), str(mj), str(m1), mj == m1])
        ok &= mj == m1
    payload = {"I0": str(prob.I0), "I1": str(prob.I1), "J": str(J),
               "left_steps": prob.left_steps, "right_steps": prob.right_steps,
               "table": [dict(zip(("p", "mu_J", "mu_I1", "equal"), row)) for row in table],
               "paper_ref": "equal-measure interval transport"}
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise UsageError("--alpha and --beta go together")
        a1, b1 = transport.translate_subinterval(prob, args.alpha, args.beta)
        agree = all(transport.measures_agree(prob, args.alpha, args.beta, p) for p in args.ps)
        payload["translated"] = [str(a1), str(b1)]
        payload["translated_measures_agree"] = agree
        ok &= agree
    emit(payload, args.format, out, rows=table, header=["p", "mu_J", "mu_I1", "equal"])
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _read_matrix(text: str) -> algebra.MonomialMatrix:
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        return algebra.MonomialMatrix.from_json(text)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"--matrix: {exc}") from None


def cmd_algebra(args, out) -> int:
    M = _read_matrix(args.matrix)
    H = algebra.make_generators(M.n_vars)
    f = algebra.reduce_polynomial(M, H)
    ok = True
    payload = {
        "generators": {"values": list(H.values), "primes": list(H.tags)},
        "reduced": f.to_json(),
        "paper_ref": "free generators exp(rF)",
    }
    payload["composed"] = {str(x): algebra.compose_with_F(f, args.p, x) for x in ("0", "1/2", "1")}
    try:
        n_roots = algebra.count_preimage(f, args.value, 0.0, 1.0, args.tolerance)
        payload["preimage"] = {"c": args.value, "count": n_roots, "bound": f.range}
        ok &= n_roots <= f.range
    except RootClusterError as exc:
        payload["preimage"] = {"c": args.value, "error": str(exc)}
        ok = False
    try:
        x, y, gap = algebra.nonconstancy_witness(f, args.p, DyadicInterval(args.interval),
                                                 threshold=args.tolerance)
        payload["witness"] = {"x": str(x), "y": str(y), "gap": gap}
    except NoWitnessError as exc:
        payload["witness"] = {"error": str(exc)}
        ok = False
    table = algebra.singularity_probe(f, args.p, args.samples, args.levels, args.seed)
    payload["probe"] = [{"level": lv, "median": m} for lv, m in table.rows()]
    r0 = H.values[0]
    payload["constant_approx"] = [
        {"k": k, "r": r0 / 2**k, "error": algebra.constant_approx_error(1.0, r0 / 2**k)} for k in range(12)
    ]
    emit(payload, args.format, out, rows=table.rows(), header=["level", "median"])
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_smooth(args, out) -> int:
    g = smoothing.iterated_integral(args.p, args.order, args.depth)
    rep = smoothing.finite_diff_check(g, args.p)
    ok = rep.max_deviation <= rep.trapezoid_bound if g.order == 1 else True
    rows = [
        [f"{j}/2^{g.depth}", f"{v.numerator}/{v.denominator}" if g.exact else repr(float(v))]
        for j, v in enumerate(g.values)
    ]
    payload = {
        "order": g.order, "depth": g.depth, "exact": g.exact,
        "error_bound": float(g.error_bound),
        "G_at_1": float(g.values[-1]),
        "max_deviation": rep.max_deviation, "trapezoid_bound": rep.trapezoid_bound,
        "next_order_median": rep.next_order_median, "next_order_max": rep.next_order_max,
        "paper_ref": "iterated antiderivatives of class C_n",
    }
    emit(payload, args.format, out, rows=rows, header=["x", "G"])
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def dkw_bound(n: int, alpha: float = 0.01) -> float:
    """Radius with ``Pr(sup |ECDF - F| > radius) <= alpha`` (Dvoretzky-Kiefer-Wolfowitz)."""
    return math.sqrt(math.log(2 / alpha) / (2 * n))


def cmd_sample(args, out) -> int:
    draws = bernoulli.sample(args.p, args.truncation, args.count, args.seed)
    if args.format == "csv":
        emit(None, "csv", out, rows=[[repr(float(v))] for v in draws], header=["x"])
        return EXIT_OK
    grid = np.arange((1 << args.grid_level) + 1) / (1 << args.grid_level)
    exact_cdf = [float(v) for v in bernoulli.cdf_grid(args.p, args.grid_level)]
    ecdf = np.searchsorted(np.sort(draws), grid, side="right") / args.count
    dev = float(np.max(np.abs(ecdf - np.array(exact_cdf))))
    bound = dkw_bound(args.count)
    payload = {"p": str(args.p), "count": args.count, "truncation": args.truncation, "seed": args.seed,
               "grid_level": args.grid_level, "max_deviation": dev, "dkw_99_bound": bound,
               "passed": dev < bound, "paper_ref": "random binary expansion construction"}
    emit(payload, "json", out)
    return EXIT_OK if dev < bound else EXIT_CHECK_FAILED


def cmd_separate(args, out) -> int:
    mp, mq = bernoulli.support_separation(args.p, args.q, args.n)
    payload = {"p": str(args.p), "q": str(args.q), "n": args.n,
               "mu_p_A": exact(mp), "mu_q_A": exact(mq),
               "classes": bernoulli.separating_classes(args.p, args.q, args.n),
               "paper_ref": "mutually singular measures"}
    emit(payload, args.format, out, rows=[[args.n, float(mp), float(mq)]], header=["n", "mu_p_A", "mu_q_A"])
    return EXIT_OK


#: subcommand -> (handler, library operations it exposes)
DISPATCH = {
    "measure": (cmd_measure, ("make_dyadic", "digit_counts", "halves", "interval_measure")),
    "cdf": (cmd_cdf, ("cdf", "antiderivative")),
    "variation": (cmd_variation, ("partition_variation", "norm_lower_bound")),
    "distance": (cmd_distance, ("distance",)),
    "nonvanishing": (cmd_nonvanishing, ("nonvanishing_check",)),
    "transport": (cmd_transport, ("match_interval", "translate_subinterval")),
    "algebra": (cmd_algebra, ("eval_explike", "count_preimage", "make_generators", "reduce_polynomial",
                              "compose_with_F", "nonconstancy_witness", "singularity_probe",
                              "constant_approx_error")),
    "smooth": (cmd_smooth, ("iterated_integral", "finite_diff_check")),
    "sample": (cmd_sample, ("sample",)),
    "separate": (cmd_separate, ("support_separation",)),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=_env_int("SINGBV_DEPTH", 12))
    common.add_argument("--seed", type=int, default=_env_int("SINGBV_SEED", 0))
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--backend", choices=("exact", "float"), default="exact")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="singbv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("measure", help="exact mass of a dyadic interval")
    p.add_argument("--p", type=parse_rational, required=True)
    p.add_argument("--interval", type=parse_dyadic, required=True, help="left endpoint k/2^n")
    p.add_argument("--level", type=int)

    p = add("cdf", help="F_p(x), optionally its integral")
    p.add_argument("--p", type=parse_rational, required=True)
    p.add_argument("--x", type=parse_point, required=True)
    p.add_argument("--integral", action="store_true")

    p = add("variation", help="dyadic partition variations of a combination")
    p.add_argument("--terms", type=parse_terms, required=True, help="coef:p,coef:p,...")
    p.add_argument("--max-depth", type=int)

    p = add("distance", help="lower bounds for ||F_p - F_q||")
    p.add_argument("--p", type=parse_rational, required=True)
    p.add_argument("--q", type=parse_rational, required=True)
    p.add_argument("--max-depth", type=int)

    p = add("nonvanishing", help="exact scan for vanishing interval masses")
    p.add_argument("--terms", type=parse_terms, required=True)

    p = add("transport", help="equal-measure interval inside I0")
    p.add_argument("--i0", type=parse_dyadic, required=True)
    p.add_argument("--i1", type=parse_dyadic, required=True)
    p.add_argument("--alpha", type=parse_point)
    p.add_argument("--beta", type=parse_point)
    p.add_argument("--ps", type=lambda s: [parse_rational(t) for t in s.split(",")],
                   default=[Fraction(1, 4), Fraction(1, 3), Fraction(2, 5)])

    p = add("algebra", help="reduce a polynomial in exp(r_j F) and probe it")
    p.add_argument("--matrix", required=True, help='JSON {"rows": [[...]], "coeffs": [...]} or @file')
    p.add_argument("--p", type=parse_rational, default=algebra.DEFAULT_P)
    p.add_argument("--value", type=float, default=0.0, help="level c for the preimage count")
    p.add_argument("--interval", type=parse_dyadic, default=DyadicRational(0, 0))
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--levels", type=parse_levels, default=list(range(10, 21)))

    p = add("smooth", help="iterated antiderivative grid of F_p")
    p.add_argument("--p", type=parse_rational, default=algebra.DEFAULT_P)
    p.add_argument("--order", type=int, default=1)

    p = add("sample", help="Monte-Carlo draws and their distance to F_p")
    p.add_argument("--p", type=parse_rational, default=algebra.DEFAULT_P)
    p.add_argument("--truncation", type=int, default=bernoulli.DEFAULT_TRUNCATION)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--grid-level", type=int, default=6)

    p = add("separate", help="masses of the p-typical digit-frequency set")
    p.add_argument("--p", type=parse_rational, required=True)
    p.add_argument("--q", type=parse_rational, required=True)
    p.add_argument("--n", type=int, required=True)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"singbv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.depth < 0:
        print("singbv: --depth must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    if args.tolerance <= 0:
        print("singbv: --tolerance must be > 0", file=sys.stderr)
        return EXIT_USAGE
    handler, _ = DISPATCH[args.command]
    buf = io.StringIO()
    try:
        code = handler(args, buf)
    except (DomainError, UsageError) as exc:
        print(f"singbv {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        # numerical breakdown (overflow, unseparated exponents): the check failed
        print(f"singbv {args.command}: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    try:
        out.write(buf.getvalue())
        out.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error of ours
        sys.stderr.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
