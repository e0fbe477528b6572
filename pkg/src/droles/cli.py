"""Batch front end: ``dr check | eval | equal | roles``.

Exit codes: 0 ok, 1 rejected, 2 unknown (fuel), 64 usage, 65 parse error.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .concrete import parse_signature, parse_term, show
from .equality import EqEnv, def_eq
from .errors import DRError, EqualityUnknown, FuelExhausted, ParseError, TypeMismatch
from .reduce import DEFAULT_FUEL, Stuck, reduce
from .roles import parse_role, role_path
from .syntax import EMPTY_CTX, Signature, erase
from .typecheck import Checker, check_sig, check_sig_entries

EXIT_OK, EXIT_REJECTED, EXIT_UNKNOWN, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def corpus_text(name: str) -> str:
    return resources.files("droles").joinpath("corpus", name).read_text(encoding="utf-8")


def _read(path: str | None) -> tuple[str, str]:
    if path is None:
        return "<prelude>", corpus_text("prelude.dr")
    return path, Path(path).read_text(encoding="utf-8")


def _load(path: str | None) -> Signature:
    label, text = _read(path)
    try:
        return parse_signature(text)
    except ParseError as exc:
        raise ParseError(exc.message, exc.line, exc.col, label) from None


def _fail(exc: Exception, out) -> None:
    print(f"error: {type(exc).__name__}: {exc}", file=out)


def cmd_check(args, out=None) -> int:
    out = out or sys.stdout
    sig = _load(args.file)
    status = EXIT_OK
    for name, err in check_sig_entries(sig, args.fuel):
        if err is None:
            print(f"{name}: ok", file=out)
        else:
            print(f"{name}: {type(err).__name__}: {err}", file=out)
            status = EXIT_UNKNOWN if isinstance(err, FuelExhausted) and status == EXIT_OK else EXIT_REJECTED
    return status


def _typed_term(sig: Signature, text: str, fuel: int):
    check_sig(sig, fuel)
    term = parse_term(text, sig)
    ty = Checker(sig, fuel).infer(EMPTY_CTX, term)
    return term, ty


def cmd_eval(args, out=None) -> int:
    out = out or sys.stdout
    sig = _load(args.file)
    role = parse_role(args.role)
    term, _ = _typed_term(sig, args.expr, args.fuel)
    res = reduce(sig, role, term, args.fuel, surface=True, trace=args.trace)
    for t, rule in res.trace:
        print(f"{rule}\t{show(t, sig)}", file=out)
    print(show(res.term, sig), file=out)
    if res.exhausted:
        print(f"unknown (fuel): stopped after {res.steps} steps", file=sys.stderr)
        return EXIT_UNKNOWN
    if isinstance(res.outcome, Stuck):
        print(f"stuck: {res.outcome.reason}", file=sys.stderr)
        return EXIT_REJECTED
    return EXIT_OK


def cmd_equal(args, out=None) -> int:
    out = out or sys.stdout
    sig = _load(args.file)
    role = parse_role(args.role)
    a, ty_a = _typed_term(sig, args.lhs, args.fuel)
    b, ty_b = _typed_term(sig, args.rhs, args.fuel)
    if not Checker(sig, args.fuel).conv(EMPTY_CTX, erase(ty_a), erase(ty_b)):
        raise TypeMismatch(ty_a, ty_b)
    try:
        verdict = def_eq(EqEnv(sig, EMPTY_CTX, fuel=args.fuel), role, erase(a), erase(b))
    except FuelExhausted:
        print("unknown (fuel)", file=out)
        return EXIT_UNKNOWN
    print("equal" if verdict else "not-equal", file=out)
    return EXIT_OK if verdict else EXIT_REJECTED


def cmd_roles(args, out=None) -> int:
    out = out or sys.stdout
    sig = _load(args.file)
    rs = role_path(sig, erase(parse_term(args.expr, sig)))
    if rs is None:
        print("not a constant-headed path", file=out)
        return EXIT_REJECTED
    print("[" + ", ".join(r.value for r in rs) + "]", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dr", description="Check and evaluate terms of the role-indexed core calculus.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, file_opt: bool = True):
        if file_opt:
            sp.add_argument("-f", "--file", help="signature file (default: bundled prelude)")
        sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="step budget (default %(default)s)")

    sp = sub.add_parser("check", help="check every declaration of a signature file")
    sp.add_argument("file")
    common(sp, file_opt=False)
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("eval", help="typecheck and reduce a closed term")
    sp.add_argument("-e", "--expr", required=True)
    sp.add_argument("--role", choices=["nom", "rep"], default="nom")
    sp.add_argument("--trace", action="store_true", help="print one line per step with the rule fired")
    common(sp)
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("equal", help="decide definitional equality of two closed terms")
    sp.add_argument("lhs")
    sp.add_argument("rhs")
    sp.add_argument("--role", choices=["nom", "rep"], default="nom")
    common(sp)
    sp.set_defaults(run=cmd_equal)

    sp = sub.add_parser("roles", help="print the remaining roles of a constant-headed path")
    sp.add_argument("expr")
    sp.add_argument("-f", "--file", help="signature file (default: bundled prelude)")
    sp.set_defaults(run=cmd_roles)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "fuel", 0) < 0:
            raise UsageError("dr: --fuel must be non-negative")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.run(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FuelExhausted, EqualityUnknown) as exc:
        print(f"unknown (fuel): {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except DRError as exc:
        _fail(exc, sys.stderr)
        return EXIT_REJECTED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
