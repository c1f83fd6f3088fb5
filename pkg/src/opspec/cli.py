"""Command-line entry point: ``opspec analyze | verify | drazin``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .analyze import EXIT_ASSERTION, EXIT_NUMERIC, EXIT_OK, EXIT_PARSE, analyze_text, exit_code_for
from .dsl import parse_matrix
from .errors import OpspecError
from .harness import SUITES, GeneratorProfile, run_suite
from .matrix import GaussianMatrix, drazin_axioms_exact, drazin_inverse, drazin_residuals
from .scalars import DEFAULT_TF, ToleranceFrame

SUITE_ORDER = ("T1", "T2", "T3", "T5", "T6", "MERO", "SMT", "AXIOMS", "FIXTURES", "ORACLE", "PROFILE")


def _tf(tol: Optional[float]) -> ToleranceFrame:
    return DEFAULT_TF if tol is None else ToleranceFrame.uniform(tol)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    try:
        text = _read(args.file)
    except OSError as exc:
        print(f"opspec: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_PARSE
    try:
        tf = _tf(args.tol)
    except ValueError as exc:
        print(f"opspec: {exc}", file=sys.stderr)
        return EXIT_PARSE
    result = analyze_text(text, tf)
    _write(result.to_json() if args.format == "json" else result.to_text(), args.out)
    if result.error:
        print(f"opspec: {result.error}", file=sys.stderr)
    return result.exit_code


def cmd_verify(args) -> int:
    names = SUITE_ORDER if args.suite == "all" else (args.suite,)
    profile = GeneratorProfile(seed=args.seed)
    reports = [run_suite(name, args.trials, profile, workers=args.workers) for name in names]
    if args.json:
        sys.stdout.write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    else:
        for r in reports:
            print(f"{r.suite:9s} {r.status:5s} trials={r.trials} failures={len(r.failures)} errors={len(r.errors)} ({r.seconds:.1f}s)")
            for f in r.failures:
                print(f"  trial {f.trial} seed {f.derived_seed}: {f.assertion}")
                print(f"    instance: {f.instance}")
            for e in r.errors:
                print(f"  trial {e.trial} seed {e.derived_seed}: error: {e.message}")
    if any(r.failures for r in reports):
        return EXIT_ASSERTION
    if any(r.errors for r in reports):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_drazin(args) -> int:
    try:
        expr = parse_matrix(_read(args.file))
        M = GaussianMatrix(expr.rows)
        tf = _tf(args.tol)
        res = drazin_inverse(M, tf)
    except OSError as exc:
        print(f"opspec: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_PARSE
    except (OpspecError, ValueError) as exc:
        print(f"opspec: {exc}", file=sys.stderr)
        return exit_code_for(exc) if isinstance(exc, OpspecError) else EXIT_PARSE
    print(f"index: {res.index}")
    print(f"drazin_inverse: {res.inverse}")
    if M.exact:
        ok = drazin_axioms_exact(M, res.inverse, res.index)
        print(f"identities: {'exact' if ok else 'VIOLATED'}")
    else:
        r = drazin_residuals(M, res.inverse, res.index)
        bound = 1e-8 * (1 + M.norm()) ** (res.index + 1)
        ok = max(r) <= bound
        print(f"residuals: {r[0]:.3e} {r[1]:.3e} {r[2]:.3e} (bound {bound:.3e})")
    return EXIT_OK if ok else EXIT_ASSERTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opspec", description="Spectral analysis of finitely presented operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="evaluate an operator program")
    p.add_argument("file")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    p.set_defaults(format="text", func=cmd_analyze)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", required=True, choices=list(SUITES) + ["all"])
    v.add_argument("--trials", type=int, default=300)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("drazin", help="Drazin inverse of a matrix literal")
    d.add_argument("file")
    d.add_argument("--tol", type=float)
    d.set_defaults(func=cmd_drazin)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
