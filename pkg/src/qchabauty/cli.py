"""Command-line interface: ``qchabauty <subcommand> ...``.

Subcommands: frobenius, integrate, hodge, qc-solve, selftest.  Every
subcommand prints JSON by default (``--format text`` for a table) and exits
with a nonzero status and a JSON error object on failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from fractions import Fraction

from .curve import BadReductionError, CurvePoint, HyperellipticCurve
from .padic import PadicElement, PrecisionError
from .qc import DegenerateInputError

EXIT_VALIDATION = 2
EXIT_PRECISION = 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing


def curve_from_args(args) -> HyperellipticCurve:
    if getattr(args, "curve", None):
        with open(args.curve) as fh:
            return HyperellipticCurve.from_json(json.load(fh))
    if getattr(args, "f", None):
        coeffs = [Fraction(c) for c in args.f.split(",")]
        return HyperellipticCurve(coeffs)
    if getattr(args, "a", None) is not None:
        return HyperellipticCurve.kms(Fraction(args.a))
    raise ConfigError("give the curve with --a, --f or --curve")


_PADIC_PAIR = re.compile(r"^\((.+),(.+)\)$")


def parse_point(text: str, field: str = "rational", p: int | None = None) -> CurvePoint:
    """``(x,y)``, ``inf+`` or ``inf-``; with field=padic the coordinates are
    p-adic strings such as ``2*3^1 + O(3^10)``."""
    if field == "rational":
        return CurvePoint.parse(text)
    t = text.strip()
    if t in ("inf+", "inf-"):
        return CurvePoint.parse(t)
    m = _PADIC_PAIR.match(t.replace(" ", ""))
    if not m:
        raise ConfigError(f"cannot parse p-adic point {text!r}")
    x, y = (parse_padic(s) for s in m.groups())
    if p is not None and (x.p != p or y.p != p):
        raise ConfigError("point is over the wrong prime")
    return CurvePoint("affine", x, y)


_BIGOH = re.compile(r"O\((\d+)\^(-?\d+)\)$")


def parse_padic(text: str) -> PadicElement:
    """``c0 + c1*p + c2*p^2 + ... + O(p^N)`` with rational c_k."""
    t = text.replace(" ", "")
    m = _BIGOH.search(t)
    if not m:
        raise ConfigError(f"p-adic value {text!r} needs an O(p^N) term")
    p, N = int(m.group(1)), int(m.group(2))
    body = t[: m.start()].rstrip("+")
    total = Fraction(0)
    for term in re.findall(r"[-+]?(?:[^-+^]|\^[-+]?)+", body):
        if "*" in term:
            coef, _, pw = term.partition("*")
        elif term.lstrip("+-") == str(p) or term.lstrip("+-").startswith(f"{p}^"):
            coef, pw = ("-1" if term.startswith("-") else "1"), term.lstrip("+-")
        else:
            coef, pw = term, ""
        e = 0
        if pw:
            base, _, ex = pw.partition("^")
            if int(base) != p:
                raise ConfigError(f"mixed primes in {text!r}")
            e = int(ex) if ex else 1
        total += Fraction(coef) * Fraction(p) ** e
    return PadicElement.from_rational(total, p, N)


def _check_precision(prec: int) -> int:
    if prec < 3:
        raise ConfigError("precision must be at least 3")
    return prec


def _jobs(args) -> int:
    n = args.jobs if getattr(args, "jobs", None) else int(os.environ.get("QCHABAUTY_JOBS", "1"))
    if n < 1:
        raise ConfigError("parallelism must be at least 1")
    return n


# ---------------------------------------------------------------------------
# subcommands


def cmd_frobenius(args) -> dict:
    from .frobenius import frobenius_matrix

    curve = curve_from_args(args)
    prec = _check_precision(args.prec)
    curve.check_good_reduction(args.p)
    fr = frobenius_matrix(curve, args.p, prec)
    block = fr.h1_block()
    n_points = curve.count_points_mod_p(args.p)
    return {
        "curve": curve.to_json(),
        "p": args.p,
        "certified_precision": fr.certified_precision,
        "matrix_omega": [[str(e) for e in r] for r in fr.matrix.rows],
        "matrix_h1": [[str(e) for e in r] for r in block.rows],
        "trace": str(block.trace()),
        "determinant": str(block.determinant()),
        "points_mod_p": n_points,
        "expected_trace": args.p + 1 - n_points,
    }


def _text_frobenius(out: dict) -> str:
    lines = [f"curve {out['curve']}  p = {out['p']}  certified precision {out['certified_precision']}", "Frobenius on H^1_dR(X):"]
    lines += ["  [" + ", ".join(r) + "]" for r in out["matrix_h1"]]
    lines.append(f"trace = {out['trace']}  (p + 1 - #X(F_p) = {out['expected_trace']})")
    lines.append(f"det   = {out['determinant']}")
    return "\n".join(lines)


def cmd_integrate(args) -> dict:
    from .coleman import ColemanIntegrator

    curve = curve_from_args(args)
    prec = _check_precision(args.prec)
    P = parse_point(args.from_, args.field, args.p)
    Q = parse_point(args.to, args.field, args.p)
    for R in (P, Q):
        if not curve.contains(R):
            raise ConfigError(f"{R} is not on the curve")
    ci = ColemanIntegrator(curve, args.p, prec)
    I, D = ci.integrals(P, Q)
    word = [int(w) for w in args.word.split(",")] if args.word else None
    out = {"curve": curve.to_json(), "p": args.p, "from": str(P), "to": str(Q), "working_precision": prec}
    if word is None:
        out["single"] = [str(v) for v in I]
        out["double"] = [[str(v) for v in r] for r in D]
    elif len(word) == 1:
        out["word"] = word
        out["value"] = str(I[word[0]])
        out["precision"] = I[word[0]].abs_precision
    elif len(word) == 2:
        v = D[word[0]][word[1]]
        out["word"] = word
        out["value"] = str(v)
        out["precision"] = v.abs_precision
    else:
        raise ConfigError("words have length 1 or 2")
    return out


def cmd_hodge(args) -> dict:
    from .hodge import HodgeComputation

    curve = curve_from_args(args)
    b = parse_point(args.b) if args.b else curve.point(0, 1)
    hc = HodgeComputation(curve).hodge_constants(b)
    out = hc.to_json()
    out["curve"] = curve.to_json()
    out["c_H_zero"] = hc.c_is_zero()
    out["xi_zero"] = hc.xi_is_zero()
    out["r_H_filtration_quotient"] = [str(r) for r in hc.r_H[:2]]
    return out


def _text_hodge(out: dict) -> str:
    lines = [f"curve {out['curve']}  basepoint {out['basepoint']}", "tau:"]
    lines += [f"  tau({k}) = " + " + ".join(f"{c}*{s}" for s, c in v.items()) for k, v in out["tau"].items()]
    lines.append(f"c^H = {'0' if out['c_H_zero'] else out['c_H']}")
    lines.append(f"xi  = {'0' if out['xi_zero'] else out['xi']}")
    lines.append(f"r^H = ({', '.join(out['r_H_filtration_quotient'])})")
    return "\n".join(lines)


def cmd_qc_solve(args) -> tuple:
    from .qc import BadPrimeData, QCProblem, default_working_precision, search_rational_points, solve

    curve = curve_from_args(args)
    target = _check_precision(args.prec)
    curve.check_good_reduction(args.p)
    W = args.working_prec or default_working_precision(target, args.p, curve.g)
    b = parse_point(args.b, args.field, args.p) if args.b else None
    z0 = parse_point(args.z0, args.field, args.p) if args.z0 else None
    bad = None
    if args.bad_primes:
        with open(args.bad_primes) as fh:
            bad = BadPrimeData.from_json(json.load(fh))
    known = search_rational_points(curve, args.search_bound) if args.search_bound > 0 else []
    pb = QCProblem(curve, args.p, W, b=b, z0=z0, bad_prime_data=bad, known_points=known)
    if pb.z0 is None:
        raise ConfigError("no admissible z0 found; pass --z0")
    report = solve(pb, target=target, jobs=_jobs(args))
    return report.to_json(target), report.to_text(target)


def cmd_selftest(args) -> dict:
    from .selftest import run_selftest

    results = run_selftest(verbose=False)
    return {"checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in results], "ok": all(ok for _, ok, _ in results)}


def _text_selftest(out: dict) -> str:
    return "\n".join(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}  {c['detail']}" for c in out["checks"])


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qchabauty", description="p-adic quadratic Chabauty for genus 2 bielliptic curves")
    sub = parser.add_subparsers(dest="command", required=True)

    def curve_opts(sp, need_p=True):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--a", help="KMS parameter: y^2 = x^6 + a x^4 + a x^2 + 1")
        g.add_argument("--f", help="comma-separated coefficients of f, constant term first")
        g.add_argument("--curve", help="JSON file with {a} or {f: [...]}")
        if need_p:
            sp.add_argument("--p", type=int, required=True)
            sp.add_argument("--prec", type=int, default=10)
        sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("frobenius", help="Frobenius matrix on H^1_dR")
    curve_opts(sp)

    sp = sub.add_parser("integrate", help="single and double Coleman integrals")
    curve_opts(sp)
    sp.add_argument("--from", dest="from_", required=True)
    sp.add_argument("--to", required=True)
    sp.add_argument("--word", help="i or i,j; omit for all integrals")
    sp.add_argument("--field", choices=("rational", "padic"), default="rational")

    sp = sub.add_parser("hodge", help="Hodge constants c^H, r^H, xi")
    curve_opts(sp, need_p=False)
    sp.add_argument("--b", help="basepoint, default (0,1)")

    sp = sub.add_parser("qc-solve", help="candidate set of the quadratic Chabauty function")
    curve_opts(sp)
    sp.add_argument("--working-prec", type=int, default=None)
    sp.add_argument("--b", help="basepoint, default (0,1)")
    sp.add_argument("--z0", help="auxiliary point, default: smallest admissible rational point")
    sp.add_argument("--bad-primes", help="JSON file with lambda, mu, alpha, pi_b, pi_z0")
    sp.add_argument("--search-bound", type=int, default=10, help="height bound for labelling rational candidates")
    sp.add_argument("--field", choices=("rational", "padic"), default="rational")
    sp.add_argument("--jobs", type=int, default=None, help="worker processes (env QCHABAUTY_JOBS)")

    sp = sub.add_parser("selftest", help="run the invariant suite")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    return parser


def _emit(obj, fmt, text=None):
    if fmt == "text" and text is not None:
        print(text)
    else:
        print(json.dumps(obj, indent=2, sort_keys=False))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = getattr(args, "format", "json")
    t0 = time.time()
    try:
        if args.command == "frobenius":
            out = cmd_frobenius(args)
            _emit(out, fmt, _text_frobenius(out))
        elif args.command == "integrate":
            out = cmd_integrate(args)
            _emit(out, fmt, json.dumps(out, indent=2))
        elif args.command == "hodge":
            out = cmd_hodge(args)
            _emit(out, fmt, _text_hodge(out))
        elif args.command == "qc-solve":
            out, text = cmd_qc_solve(args)
            _emit(out, fmt, text)
        elif args.command == "selftest":
            out = cmd_selftest(args)
            _emit(out, fmt, _text_selftest(out))
            return 0 if out["ok"] else 1
    except (ConfigError, BadReductionError, DegenerateInputError, ValueError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, "json")
        return EXIT_VALIDATION
    except (PrecisionError, ArithmeticError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, "json")
        return EXIT_PRECISION
    if os.environ.get("QCHABAUTY_TIMING"):
        print(f"# {time.time() - t0:.1f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
