"""Role-indexed values, primitive reduction, one-step reduction and
parallel reduction (complete development).

Every function takes a ``surface`` switch: when set, axioms unfold to their
annotated right-hand sides so that reducing an annotated term yields an
annotated term whose erasure is the erased reduct.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import FuelExhausted
from .roles import Flag, Rel, Role, min_role, sub_role
from .syntax import (
    Abs, App, AxiomDecl, Box, CAbs, CApp, CPi, Case, Const, Pattern, Pi, Prop, Signature, Star, Term,
    Var, abstract, apply_spine, fresh_name, free_vars, instantiate, spine, subst_vars,
)

DEFAULT_FUEL = 10_000


@dataclass(frozen=True)
class Stepped:
    term: Term
    rule: str
    congruence: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValueAt:
    role: Role


@dataclass(frozen=True)
class Stuck:
    reason: str


StepOutcome = Stepped | ValueAt | Stuck


# ---------------------------------------------------------------------------
# Values and paths


def _flags_agree(p: Pattern, flags: list[Flag]) -> bool:
    return len(flags) >= len(p.args) and all(a.flag is f for a, f in zip(p.args, flags))


def case_path(sig: Signature, r: Role, a: Term) -> str | None:
    """Head constant of ``a`` when ``a`` is a path that cannot reduce at ``r``."""
    head, args = spine(a)
    if not isinstance(head, Const) or head.name not in sig:
        return None
    ax = sig.axiom(head.name)
    if ax is None or not sub_role(ax.axiom_role, r):
        return head.name
    if not _flags_agree(ax.pattern, [f for _, f in args]):
        return head.name
    return None


def is_value(sig: Signature, r: Role, a: Term) -> bool:
    match a:
        case Star() | Pi() | CPi() | CAbs():
            return True
        case Abs(Rel.REL, _, _, _):
            return True
        case Abs(Rel.IRR, body, _, _):
            # a dangling index behaves like a variable: never a value
            return is_value(sig, r, body)
        case Const() | App() | CApp():
            return case_path(sig, r, a) is not None
        case _:
            return False


# ---------------------------------------------------------------------------
# Axiom matching


def rename(p: Pattern, rhs: Term, avoid: set[str]) -> tuple[Pattern, Term]:
    """Freshen pattern variables away from ``avoid``, consistently in ``rhs``."""
    taken = set(avoid) | set(p.variables())
    mapping: dict[str, str] = {}
    for v in p.variables():
        if v in avoid:
            new = fresh_name(v, taken)
            taken.add(new)
            mapping[v] = new
    if not mapping:
        return p, rhs
    return p.rename(mapping), subst_vars(rhs, {v: Var(n) for v, n in mapping.items()})


def match_subst(a: Term, p: Pattern, rhs: Term) -> Term | None:
    head, args = spine(a)
    if not (isinstance(head, Const) and head.name == p.head and len(args) == len(p.args)):
        return None
    mapping: dict[str, Term] = {}
    for pa, (arg, flag) in zip(p.args, args):
        if pa.flag is not flag:
            return None
        if pa.is_var:
            mapping[pa.name] = arg
    return subst_vars(rhs, mapping)


def _unfold(sig: Signature, ax: AxiomDecl, a: Term, surface: bool) -> Term | None:
    p, rhs = rename(ax.pattern, sig.rhs(ax.name, surface), free_vars(a))
    return match_subst(a, p, rhs)


# ---------------------------------------------------------------------------
# Case analysis


def apps_path(sig: Signature, scrut: Term, head: str, flags: tuple[Flag, ...]):
    """The scrutinee's applicators when it is ``head`` applied per ``flags``."""
    h, args = spine(scrut)
    if not (isinstance(h, Const) and h.name == head):
        return None
    ax = sig.axiom(head)
    if ax is not None and ax.axiom_role is Role.NOM:
        return None
    if tuple(f for _, f in args) != tuple(flags):
        return None
    return args


def apply_args(args, branch: Term) -> Term:
    """Pass scrutinee arguments to a branch.

    Role-flagged arguments are passed with ``+``: a role flag is only
    meaningful on a constant-headed path, and the branch is an abstraction.
    """
    out = branch
    for arg, flag in args:
        if flag is Flag.CO:
            out = CApp(out)
        elif flag.role is not None:
            out = App(out, arg, Flag.REL)
        else:
            out = App(out, arg, flag)
    return out


# ---------------------------------------------------------------------------
# Primitive and one-step reduction


def beta_step(sig: Signature, r: Role, a: Term, surface: bool = False) -> tuple[Term, str] | None:
    match a:
        case App(Abs(Rel.REL, body, _, _), arg, Flag.REL):
            return instantiate(body, arg), "ABeta-AppAbs"
        case App(Abs(Rel.IRR, body, _, _) as fun, arg, Flag.IRR) if is_value(sig, r, fun):
            return instantiate(body, arg), "ABeta-IAppAbs"
        case CApp(CAbs(body, _, _)):
            return body, "ABeta-CAppCAbs"
        case Case(scrut, head, flags, b1, b2) if is_value(sig, Role.NOM, scrut):
            args = apps_path(sig, scrut, head, flags)
            if args is not None:
                return CApp(apply_args(args, b1)), "Beta-PatternTrue"
            return b2, "Beta-PatternFalse"
    h, _ = spine(a)
    if isinstance(h, Const):
        ax = sig.axiom(h.name)
        if ax is not None and sub_role(ax.axiom_role, r):
            out = _unfold(sig, ax, a, surface)
            if out is not None:
                return out, "ABeta-Axiom"
    return None


def step(sig: Signature, r: Role, a: Term, surface: bool = False) -> StepOutcome:
    beta = beta_step(sig, r, a, surface)
    if beta is not None:
        return Stepped(beta[0], beta[1])
    match a:
        case App(fun, arg, flag):
            out = step(sig, r, fun, surface)
            if isinstance(out, Stepped):
                return Stepped(App(out.term, arg, flag), out.rule, ("E-AppLeft",) + out.congruence)
        case CApp(fun):
            out = step(sig, r, fun, surface)
            if isinstance(out, Stepped):
                return Stepped(CApp(out.term), out.rule, ("E-CAppLeft",) + out.congruence)
        case Abs(Rel.IRR, body, ann, hint):
            x = fresh_name(hint, free_vars(a))
            out = step(sig, r, instantiate(body, Var(x)), surface)
            if isinstance(out, Stepped):
                return Stepped(Abs(Rel.IRR, abstract(out.term, x), ann, hint), out.rule,
                               ("E-AbsTerm",) + out.congruence)
        case Case(scrut, head, flags, b1, b2):
            out = step(sig, Role.NOM, scrut, surface)
            if isinstance(out, Stepped):
                return Stepped(Case(out.term, head, flags, b1, b2), out.rule, ("E-Pattern",) + out.congruence)
    if is_value(sig, r, a):
        return ValueAt(r)
    return Stuck(_stuck_reason(a))


def _stuck_reason(a: Term) -> str:
    head, _ = spine(a)
    match head:
        case Var(x):
            return f"head is the free variable {x}"
        case Box():
            return "the trivial term outside an irrelevant argument"
        case Case():
            return "case scrutinee is neither a value nor reducible"
        case Abs() | CAbs():
            return "abstraction applied with a mismatched flag"
        case Const(name):
            return f"unknown constant {name}"
    return f"no rule applies to {type(head).__name__}"


@dataclass
class ReduceResult:
    term: Term
    steps: int
    exhausted: bool
    outcome: StepOutcome | None = None
    trace: list[tuple[Term, str]] = field(default_factory=list)

    @property
    def stuck(self) -> bool:
        return isinstance(self.outcome, Stuck)


def reduce(sig: Signature, r: Role, a: Term, fuel: int = DEFAULT_FUEL, surface: bool = False,
           trace: bool = False) -> ReduceResult:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    steps = 0
    log: list[tuple[Term, str]] = []
    while True:
        out = step(sig, r, a, surface)
        if not isinstance(out, Stepped):
            return ReduceResult(a, steps, False, out, log)
        if steps >= fuel:
            return ReduceResult(a, steps, True, None, log)
        a = out.term
        steps += 1
        if trace:
            log.append((a, out.rule))


def whnf(sig: Signature, r: Role, a: Term, fuel: int = DEFAULT_FUEL, surface: bool = False) -> Term:
    """Weak-head normal form; raises :class:`FuelExhausted` past the budget."""
    res = reduce(sig, r, a, fuel, surface)
    if res.exhausted:
        raise FuelExhausted(f"no weak-head normal form within {fuel} steps")
    return res.term


def normalize(sig: Signature, r: Role, a: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Full normal form for display; not part of the reduction relation.

    Arguments are normalised at the role their position would be compared
    at by definitional equality.
    """
    budget = [fuel]

    def go(t: Term, role: Role, avoid: set[str]) -> Term:
        res = reduce(sig, role, t, budget[0])
        budget[0] -= res.steps
        if res.exhausted:
            raise FuelExhausted(f"no normal form within {fuel} steps")
        t = res.term
        match t:
            case Abs(rel, body, ann, hint):
                x = fresh_name(hint, avoid)
                return Abs(rel, abstract(go(instantiate(body, Var(x)), role, avoid | {x}), x), ann, hint)
            case Pi(rel, dom, body, hint):
                x = fresh_name(hint, avoid)
                return Pi(rel, go(dom, role, avoid), abstract(go(instantiate(body, Var(x)), role, avoid | {x}), x),
                          hint)
            case App(fun, arg, flag):
                if flag is Flag.IRR:
                    return App(go(fun, role, avoid), arg, flag)
                arg_role = Role.NOM if flag is Flag.REL else min_role(flag.role, role)
                return App(go(fun, role, avoid), go(arg, arg_role, avoid), flag)
            case CApp(fun):
                return CApp(go(fun, role, avoid))
            case CAbs(body, ann, hint):
                return CAbs(go(body, role, avoid), ann, hint)
            case CPi(p, body, hint):
                prop = Prop(go(p.lhs, p.role, avoid), go(p.rhs, p.role, avoid), p.role, go(p.type, Role.REP, avoid))
                return CPi(prop, go(body, role, avoid), hint)
            case Case(scrut, head, flags, b1, b2):
                return Case(go(scrut, Role.NOM, avoid), head, flags, go(b1, role, avoid), go(b2, role, avoid))
        return t

    return go(a, r, free_vars(a))


# ---------------------------------------------------------------------------
# Parallel reduction


def arg_role(flag: Flag, r: Role) -> Role:
    """Role at which an argument with ``flag`` is role-checked and reduced."""
    if flag.role is not None:
        return min_role(flag.role, r)
    return Role.NOM


def _axiom_redex(sig: Signature, r: Role, a: Term):
    h, args = spine(a)
    if not isinstance(h, Const):
        return None
    ax = sig.axiom(h.name)
    if ax is None or not sub_role(ax.axiom_role, r):
        return None
    if len(args) != len(ax.pattern.args) or not _flags_agree(ax.pattern, [f for _, f in args]):
        return None
    return ax, args


def par_step(sig: Signature, omega: Mapping[str, Role], r: Role, a: Term) -> Term:
    """Complete development of ``a`` at role ``r``: every redex contracted at once."""
    return _Developer(sig, set(omega) | free_vars(a)).dev(a, r)


class _Developer:
    def __init__(self, sig: Signature, avoid: set[str]):
        self.sig = sig
        self.avoid = avoid

    def fresh(self, hint: str) -> str:
        x = fresh_name(hint, self.avoid)
        self.avoid.add(x)
        return x

    def under(self, body: Term, hint: str, r: Role) -> tuple[str, Term]:
        x = self.fresh(hint)
        return x, self.dev(instantiate(body, Var(x)), r)

    def dev_args(self, args, r: Role):
        return [(None if arg is None else (arg if flag is Flag.IRR else self.dev(arg, arg_role(flag, r))), flag)
                for arg, flag in args]

    def dev(self, a: Term, r: Role) -> Term:
        sig = self.sig
        redex = _axiom_redex(sig, r, a)
        if redex is not None:
            ax, args = redex
            p, rhs = rename(ax.pattern, sig.rhs(ax.name), free_vars(a) | self.avoid)
            return match_subst(apply_spine(Const(ax.name), self.dev_args(args, r)), p, rhs)
        match a:
            case App(Abs(Rel.REL, body, _, hint), arg, Flag.REL):
                x, body2 = self.under(body, hint, r)
                return subst_vars(body2, {x: self.dev(arg, Role.NOM)})
            case App(Abs(Rel.IRR, body, _, hint), arg, Flag.IRR):
                x, body2 = self.under(body, hint, r)
                return subst_vars(body2, {x: arg})
            case CApp(CAbs(body, _, _)):
                return self.dev(body, r)
            case Case(scrut, head, flags, b1, b2) if is_value(sig, Role.NOM, scrut):
                args = apps_path(sig, scrut, head, flags)
                if args is not None:
                    return CApp(apply_args(self.dev_args(args, Role.NOM), self.dev(b1, r)))
                return self.dev(b2, r)
            case Case(scrut, head, flags, b1, b2):
                return Case(self.dev(scrut, Role.NOM), head, flags, self.dev(b1, r), self.dev(b2, r))
            case App(fun, arg, flag):
                new_arg = arg if flag is Flag.IRR else self.dev(arg, arg_role(flag, r))
                return App(self.dev(fun, r), new_arg, flag)
            case CApp(fun):
                return CApp(self.dev(fun, r))
            case Abs(rel, body, ann, hint):
                x, body2 = self.under(body, hint, r)
                return Abs(rel, abstract(body2, x), ann, hint)
            case Pi(rel, dom, body, hint):
                dom2 = self.dev(dom, r)
                x, body2 = self.under(body, hint, r)
                return Pi(rel, dom2, abstract(body2, x), hint)
            case CAbs(body, ann, hint):
                return CAbs(self.dev(body, r), ann, hint)
            case CPi(p, body, hint):
                prop = Prop(self.dev(p.lhs, p.role), self.dev(p.rhs, p.role), p.role, self.dev(p.type, Role.REP))
                return CPi(prop, self.dev(body, r), hint)
        return a
