"""Command-line front end: formulas, verify, integrate, backlund.

Exit codes: 0 pass, 1 identity failure, 2 usage, 3 blow-up, 4 singular
Backlund point.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .canonical import build_H, canonical_names
from .dynamics import build_model
from .render import render_latex, render_text, render_vector_field
from .report import dumps
from .rootdata import SystemSpec
from .suite import CHECKS, Mutation, max_l_from_env, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BLOWUP, EXIT_SINGULAR = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# -- argument types ---------------------------------------------------------------

def _level(text: str) -> int:
    try:
        l = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid l: {text!r}")
    if l < 2:
        raise argparse.ArgumentTypeError("l must be at least 2")
    return l


def _level_range(text: str) -> tuple[int, int]:
    """``4`` or ``2..5``."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        a, b = _level(lo), _level(hi)
    else:
        a = b = _level(text)
    if a > b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def _vector(text: str) -> list[float]:
    try:
        return [float(Fraction(x.strip())) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid number list: {text!r}")


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}")
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _mutation(text: str) -> Mutation:
    try:
        target, idx = text.split(":")
        return Mutation(target, int(idx))
    except ValueError:
        raise argparse.ArgumentTypeError("expected TARGET:INDEX with TARGET in {F, h}")


# -- formulas ---------------------------------------------------------------------

def emit_formulas(spec: SystemSpec, which: str, fmt: str = "text") -> str:
    latex = fmt == "latex"
    model = build_model(spec)
    sections = []
    if which in ("system", "all"):
        sections.append("\n".join(render_vector_field(j, model.F[j], latex=latex) for j in spec.nodes()))
    if which in ("h", "all"):
        body = render_latex(model.h[0]) if latex else render_text(model.h[0])
        sections.append(f"{'h_{0}' if latex else 'h0'} = {body}")
    if which in ("H", "all"):
        H = build_H(spec).H
        names = canonical_names(spec)
        body = render_latex(H, names) if latex else render_text(H, names)
        sections.append(f"H = {body}")
    return "\n\n".join(sections) + "\n"


def cmd_formulas(args) -> int:
    text = emit_formulas(SystemSpec(args.l), args.which, args.format)
    _write(args.out, text)
    return EXIT_OK


# -- verify -----------------------------------------------------------------------

def cmd_verify(args) -> int:
    lo, hi = args.l
    cap = max_l_from_env()
    if cap is not None and hi > cap:
        print(f"note: l_max clamped from {hi} to {cap} by environment", file=sys.stderr)
        hi = cap
    if lo > hi:
        raise UsageError(f"no l values left in {lo}..{hi}")
    names = list(CHECKS)
    if args.checks:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = [c for c in names if c not in CHECKS]
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    t0 = time.perf_counter()
    results = run_suite(range(lo, hi + 1), names, seed=args.seed, jobs=args.jobs, mutation=args.mutate)
    report = [{"check": r.check, "l": r.l, "status": r.status, "elapsed": r.elapsed, "cases": r.cases} for r in results]
    text = json.dumps(report, indent=2) + "\n"
    if args.full:
        text = dumps(results) + "\n"
    _write(args.out, text)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    if failed:
        print("failed checks: " + ", ".join(f"{r.check}(l={r.l})" for r in failed), file=sys.stderr)
        first = failed[0]
        detail = first.failures[0] if first.failures else "(no detail)"
        print(f"FAIL {first.check} l={first.l}: {detail}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- numerics ---------------------------------------------------------------------

def _instance(args):
    from .numeric import NumericInstance

    spec = SystemSpec(args.l)
    if len(args.alpha) != spec.size:
        raise UsageError(f"--alpha needs {spec.size} values for l={spec.l}")
    if len(args.f0) != spec.size:
        raise UsageError(f"--f0 needs {spec.size} values for l={spec.l}")
    if not args.t1 > args.t0:
        raise UsageError("--t1 must exceed --t0")
    return NumericInstance(spec, tuple(args.alpha))


def cmd_integrate(args) -> int:
    from .numeric import ChartBreakdownError, growth_law_deviation, hamiltonian_consistency, integrate, to_csv, to_json

    inst = _instance(args)
    try:
        traj = integrate(inst, args.f0, (args.t0, args.t1), args.step, method=args.method)
    except ImportError as exc:
        raise UsageError(str(exc))
    text = to_json(inst, traj) + "\n" if args.format == "json" else to_csv(traj)
    _write(args.out, text)
    summary = {
        "rows": len(traj.t),
        "max_residual": traj.meta["max_residual"],
        "growth_law_deviation": growth_law_deviation(inst, traj),
        "blow_up": traj.blow_up,
    }
    if args.compare_hamiltonian:
        try:
            summary["hamiltonian"] = hamiltonian_consistency(inst, args.f0, (args.t0, args.t1), args.step).to_dict()
        except ChartBreakdownError as exc:
            print(f"warning: {exc}", file=sys.stderr)
            summary["hamiltonian"] = "chart breakdown"
        except ArithmeticError as exc:
            print(f"warning: canonical comparison failed: {exc}", file=sys.stderr)
    print(json.dumps(summary), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    if traj.blow_up:
        print(f"blow-up at t={float(traj.t[-1])!r}; partial trajectory written", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_OK


def cmd_backlund(args) -> int:
    import numpy as np

    from .numeric import SingularBacklundError, backlund_transport, integrate
    from .weylaction import parse_word

    inst = _instance(args)
    try:
        word = parse_word(args.word, inst.spec)
    except ValueError as exc:
        raise UsageError(str(exc))
    if not word:
        raise UsageError("empty word")
    traj = integrate(inst, args.f0, (args.t0, args.t1), args.step)
    if traj.blow_up:
        print(f"blow-up at t={float(traj.t[-1])!r} before transport", file=sys.stderr)
        return EXIT_BLOWUP
    try:
        inst2, traj2 = backlund_transport(inst, traj, word, eps=args.eps, residual_tol=args.tol)
    except SingularBacklundError as exc:
        print(f"singular Backlund point at t={exc.t!r} (f{exc.index} = 0)", file=sys.stderr)
        return EXIT_SINGULAR
    res = traj2.meta["max_residual"]
    ok = res <= args.tol
    out = {
        "word": args.word,
        "alpha_prime": list(inst2.alpha),
        "residual": res,
        "tolerance": args.tol,
        "max_deviation_from_input": float(np.max(np.abs(traj2.f - traj.f))),
        "status": "pass" if ok else "fail",
    }
    print(json.dumps(out))
    return EXIT_OK if ok else EXIT_FAIL


# -- plumbing ---------------------------------------------------------------------

def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _numeric_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--l", type=_level, required=True)
    p.add_argument("--alpha", type=_vector, required=True, help="comma-separated, fractions allowed")
    p.add_argument("--f0", type=_vector, required=True, help="comma-separated initial values")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--step", type=_positive, default=1e-3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weyl-painleve",
        description="Formulas, exact verification and numerics for A(1)_l systems with affine Weyl group symmetry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("formulas", help="print f_j', h_0 or H")
    p.add_argument("--l", type=_level, required=True)
    p.add_argument("--which", choices=["system", "h", "H", "all"], default="all")
    p.add_argument("--format", choices=["text", "latex"], default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_formulas)

    p = sub.add_parser("verify", help="run the exact identity suite")
    p.add_argument("--l", type=_level_range, default=(2, 5), help="a level or a range lo..hi")
    p.add_argument("--checks", default=None, help="comma-separated subset of: " + ", ".join(CHECKS))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--full", action="store_true", help="include failures and notes in the report")
    p.add_argument("--mutate", type=_mutation, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integrate", help="integrate the f-system")
    _numeric_args(p)
    p.add_argument("--method", choices=["rk4", "rk45"], default="rk4")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)
    p.add_argument("--compare-hamiltonian", action="store_true")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("backlund", help="transport a trajectory by a Weyl group word")
    _numeric_args(p)
    p.add_argument("--word", required=True, help='e.g. "s0" or "pi s1 s0"')
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--eps", type=float, default=1e-6, help="pole guard for s_i")
    p.set_defaults(func=cmd_backlund)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
