"""Role checking of erased terms and pattern contexts for axiom checking."""

from __future__ import annotations

from collections.abc import Mapping

from .errors import PatternArityError, PatternShapeError, RoleError
from .roles import Flag, Rel, Role, min_role, sub_role
from .syntax import (
    Abs, App, Bound, Box, CAbs, CApp, CoVar, CPi, Case, Const, Ctx, Pattern, Pi, Prop, Signature, Star,
    Term, TmVar, Var, fresh_name, free_vars, instantiate,
)

RoleCtx = Mapping[str, Role]


def role_check(sig: Signature, omega: RoleCtx, a: Term, r: Role) -> None:
    """Raise :class:`RoleError` unless ``omega |= a : r``."""
    _Checker(sig, omega, a).check(a, r, dict(omega))


def role_checks(sig: Signature, omega: RoleCtx, a: Term, r: Role) -> bool:
    try:
        role_check(sig, omega, a, r)
    except RoleError:
        return False
    return True


class _Checker:
    def __init__(self, sig: Signature, omega: RoleCtx, a: Term):
        self.sig = sig
        self.avoid = set(omega) | free_vars(a)

    def fresh(self, hint: str) -> str:
        name = fresh_name(hint, self.avoid)
        self.avoid.add(name)
        return name

    def check(self, a: Term, r: Role, omega: dict[str, Role]) -> None:
        match a:
            case Star() | Box():
                return
            case Var(x):
                have = omega.get(x)
                if have is None:
                    raise RoleError(x, r, None, "variable not in the role context")
                if not sub_role(have, r):
                    raise RoleError(x, r, have)
            case Bound(i):
                raise RoleError(f"#{i}", r, None, "dangling bound variable")
            case Const(name):
                if name not in self.sig:
                    raise RoleError(name, r, None, "undeclared constant")
            case Abs(_, body, _, hint):
                x = self.fresh(hint)
                self.check(instantiate(body, Var(x)), r, {**omega, x: Role.NOM})
            case Pi(_, dom, body, hint):
                self.check(dom, r, omega)
                x = self.fresh(hint)
                self.check(instantiate(body, Var(x)), r, {**omega, x: Role.NOM})
            case App(fun, arg, flag):
                self.check(fun, r, omega)
                if flag is Flag.IRR:
                    if not isinstance(arg, Box):
                        raise RoleError("irrelevant argument", r, None, "argument must be the trivial term")
                elif flag is Flag.REL:
                    self.check(arg, Role.NOM, omega)
                elif flag.role is not None:
                    self.check(arg, min_role(flag.role, r), omega)
                else:
                    raise RoleError("application", r, None, f"flag {flag} is not a term flag")
            case CApp(fun):
                self.check(fun, r, omega)
            case CAbs(body, _, _):
                self.check(body, r, omega)
            case CPi(prop, body, _):
                self.check_prop(prop, omega)
                self.check(body, r, omega)
            case Case(scrut, head, _, b1, b2):
                if head not in self.sig:
                    raise RoleError(head, r, None, "undeclared case head")
                self.check(scrut, Role.NOM, omega)
                self.check(b1, r, omega)
                self.check(b2, r, omega)
            case _:
                raise RoleError(repr(a), r, None, "unknown term form")

    def check_prop(self, p: Prop, omega: dict[str, Role]) -> None:
        self.check(p.lhs, p.role, omega)
        self.check(p.rhs, p.role, omega)
        self.check(p.type, Role.REP, omega)


def pat_ctx(sig: Signature, p: Pattern, head_type: Term, fuel: int = 1000) -> tuple[Ctx, Term, dict[str, Role]]:
    """Context, residual type and role context for an axiom pattern."""
    from .reduce import whnf

    gamma = Ctx()
    omega: dict[str, Role] = {}
    ty = head_type
    used = set(p.variables()) | free_vars(head_type)
    for i, arg in enumerate(p.args, start=1):
        if not isinstance(ty, (Pi, CPi)):
            ty = whnf(sig, Role.REP, ty, fuel)
        if not isinstance(ty, (Pi, CPi)):
            raise PatternArityError(f"pattern for {p.head} has {len(p.args)} arguments; "
                                    f"its type accepts only {i - 1}")
        if arg.flag is Flag.CO:
            if not isinstance(ty, CPi):
                raise PatternShapeError(f"argument {i} of {p.head}: coercion slot against a function type")
            c = fresh_name("c", used)
            used.add(c)
            gamma = gamma.extend(CoVar(c, ty.prop))
            ty = ty.body
            continue
        if not isinstance(ty, Pi):
            raise PatternShapeError(f"argument {i} of {p.head}: expected a coercion slot")
        if arg.flag is Flag.IRR:
            if ty.rel is not Rel.IRR:
                raise PatternShapeError(f"argument {i} of {p.head}: irrelevant slot against a relevant binder")
            x = fresh_name("_irr", used)
            used.add(x)
            gamma = gamma.extend(TmVar(x, ty.dom))
            ty = instantiate(ty.body, Var(x))
            continue
        if ty.rel is not Rel.REL:
            raise PatternShapeError(f"argument {i} of {p.head}: variable {arg.name} against an irrelevant binder")
        gamma = gamma.extend(TmVar(arg.name, ty.dom))
        omega[arg.name] = arg.flag.role if arg.flag.role is not None else Role.NOM
        ty = instantiate(ty.body, Var(arg.name))
    return gamma, ty, omega

