"""Brute-force oracles and term generators for the property suites.

The reduct enumerators follow the reduction rules case by case and return
every successor, so they are independent of the first-match strategy in
:mod:`droles.reduce`.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterator, Mapping
from dataclasses import dataclass

from .concrete import parse_term
from .errors import CapExceeded, DRError
from .reduce import apply_args, apps_path, is_value, match_subst, rename
from .rolecheck import RoleCtx, role_checks
from .roles import Flag, Rel, Role, min_role, sub_role
from .syntax import (
    BOX, EMPTY_CTX, STAR, Abs, App, AxiomDecl, Bound, CAbs, CApp, CPi, Case, Const, Pi, Prop, Signature, Term, Var,
    abstract, apply_spine, free_vars, fresh_name, instantiate, size, spine, subst_vars,
)
from .typecheck import Checker

DEFAULT_CAP = 4096


# ---------------------------------------------------------------------------
# Parallel reducts


def _arg_role(flag: Flag, r: Role) -> Role:
    return Role.NOM if flag.role is None else min_role(flag.role, r)


class _ParEnum:
    def __init__(self, sig: Signature, avoid: set[str], cap: int):
        self.sig = sig
        self.avoid = avoid
        self.cap = cap

    def bound(self, out: set[Term]) -> set[Term]:
        if len(out) > self.cap:
            raise CapExceeded(f"more than {self.cap} parallel reducts")
        return out

    def product(self, *sets: set[Term]) -> Iterator[tuple[Term, ...]]:
        total = 1
        for s in sets:
            total *= len(s)
        if total > self.cap:
            raise CapExceeded(f"more than {self.cap} parallel reducts")
        return itertools.product(*sets)

    def opened(self, body: Term, hint: str, r: Role) -> tuple[str, set[Term]]:
        x = fresh_name(hint, self.avoid)
        self.avoid.add(x)
        return x, self.go(instantiate(body, Var(x)), r)

    def go(self, a: Term, r: Role) -> set[Term]:
        out: set[Term] = {a}
        sig = self.sig
        match a:
            case App(fun, arg, flag):
                args = {arg} if flag is Flag.IRR else self.go(arg, _arg_role(flag, r))
                out |= {App(f, x, flag) for f, x in self.product(self.go(fun, r), args)}
                if isinstance(fun, Abs) and fun.rel is Rel.REL and flag is Flag.REL:
                    x, bodies = self.opened(fun.body, fun.hint, r)
                    out |= {subst_vars(b, {x: v}) for b, v in self.product(bodies, self.go(arg, Role.NOM))}
                if isinstance(fun, Abs) and fun.rel is Rel.IRR and flag is Flag.IRR:
                    x, bodies = self.opened(fun.body, fun.hint, r)
                    out |= {subst_vars(b, {x: arg}) for b in bodies}
            case CApp(fun):
                out |= {CApp(f) for f in self.go(fun, r)}
                if isinstance(fun, CAbs):
                    out |= self.go(fun.body, r)
            case Abs(rel, body, ann, hint):
                x, bodies = self.opened(body, hint, r)
                out |= {Abs(rel, abstract(b, x), ann, hint) for b in bodies}
            case Pi(rel, dom, body, hint):
                x, bodies = self.opened(body, hint, r)
                out |= {Pi(rel, d, abstract(b, x), hint) for d, b in self.product(self.go(dom, r), bodies)}
            case CAbs(body, ann, hint):
                out |= {CAbs(b, ann, hint) for b in self.go(body, r)}
            case CPi(p, body, hint):
                parts = self.product(self.go(p.lhs, p.role), self.go(p.rhs, p.role), self.go(p.type, Role.REP),
                                     self.go(body, r))
                out |= {CPi(Prop(lhs, rhs, p.role, ty), b, hint) for lhs, rhs, ty, b in parts}
            case Case(scrut, head, flags, b1, b2):
                parts = self.product(self.go(scrut, Role.NOM), self.go(b1, r), self.go(b2, r))
                out |= {Case(s, head, flags, x, y) for s, x, y in parts}
                if is_value(sig, Role.NOM, scrut):
                    args = apps_path(sig, scrut, head, flags)
                    if args is None:
                        out |= self.go(b2, r)
                    else:
                        choices = [{arg} if arg is None or flag is Flag.IRR else self.go(arg, Role.NOM)
                                   for arg, flag in args]
                        for combo in self.product(self.go(b1, r), *choices):
                            branch, *vals = combo
                            new_args = [(v, flag) for v, (_, flag) in zip(vals, args)]
                            out.add(CApp(apply_args(new_args, branch)))
        out |= self.axiom(a, r)
        return self.bound(out)

    def axiom(self, a: Term, r: Role) -> set[Term]:
        ax = _axiom_at(self.sig, r, a)
        if ax is None:
            return set()
        head, args = spine(a)
        choices = [{arg} if arg is None or flag is Flag.IRR else self.go(arg, _arg_role(flag, r))
                   for arg, flag in args]
        p, rhs = rename(ax.pattern, self.sig.rhs(ax.name), free_vars(a) | self.avoid)
        out = set()
        for vals in self.product(*choices):
            spine_ = apply_spine(head, [(v, flag) for v, (_, flag) in zip(vals, args)])
            out.add(match_subst(spine_, p, rhs))
        return out


def _axiom_at(sig: Signature, r: Role, a: Term) -> AxiomDecl | None:
    """The axiom whose pattern ``a`` matches exactly at role ``r``."""
    head, args = spine(a)
    if not isinstance(head, Const):
        return None
    ax = sig.axiom(head.name)
    if ax is None or not sub_role(ax.axiom_role, r) or len(args) != len(ax.pattern.args):
        return None
    if any(pa.flag is not flag for pa, (_, flag) in zip(ax.pattern.args, args)):
        return None
    return ax


def enumerate_par_reducts(sig: Signature, omega: RoleCtx, role: Role, a: Term,
                          cap: int = DEFAULT_CAP) -> frozenset[Term]:
    """Every ``a'`` with ``omega |= a => a' : role``; raises :class:`CapExceeded`."""
    return frozenset(_ParEnum(sig, set(omega) | free_vars(a), cap).go(a, role))


def count_redexes(sig: Signature, role: Role, a: Term) -> int:
    """Number of positions contractible by a parallel step."""
    return _Redexes(sig, free_vars(a)).go(a, role)


class _Redexes:
    def __init__(self, sig: Signature, avoid: set[str]):
        self.sig = sig
        self.avoid = avoid

    def under(self, body: Term, hint: str, r: Role) -> int:
        x = fresh_name(hint, self.avoid)
        self.avoid.add(x)
        return self.go(instantiate(body, Var(x)), r)

    def go(self, a: Term, r: Role) -> int:
        n = 1 if _axiom_at(self.sig, r, a) is not None else 0
        match a:
            case App(fun, arg, flag):
                if isinstance(fun, Abs) and (fun.rel, flag) in ((Rel.REL, Flag.REL), (Rel.IRR, Flag.IRR)):
                    n += 1
                return n + self.go(fun, r) + (0 if flag is Flag.IRR else self.go(arg, _arg_role(flag, r)))
            case CApp(fun):
                return n + isinstance(fun, CAbs) + self.go(fun, r)
            case Abs(_, body, _, hint):
                return n + self.under(body, hint, r)
            case Pi(_, dom, body, hint):
                return n + self.go(dom, r) + self.under(body, hint, r)
            case CAbs(body, _, _):
                return n + self.go(body, r)
            case CPi(p, body, _):
                return n + self.go(p.lhs, p.role) + self.go(p.rhs, p.role) + self.go(p.type, Role.REP) + self.go(body, r)
            case Case(scrut, _, _, b1, b2):
                n += is_value(self.sig, Role.NOM, scrut)
                return n + self.go(scrut, Role.NOM) + self.go(b1, r) + self.go(b2, r)
        return n


# ---------------------------------------------------------------------------
# One-step reducts and joinability


def one_step_reducts(sig: Signature, role: Role, a: Term) -> list[tuple[Term, str]]:
    """All one-step successors licensed by some rule, one entry per derivation."""
    out: list[tuple[Term, str]] = []
    match a:
        case App(Abs(Rel.REL, body, _, _), arg, Flag.REL):
            out.append((instantiate(body, arg), "ABeta-AppAbs"))
        case App(Abs(Rel.IRR, body, _, _) as fun, arg, Flag.IRR) if is_value(sig, role, fun):
            out.append((instantiate(body, arg), "ABeta-IAppAbs"))
        case CApp(CAbs(body, _, _)):
            out.append((body, "ABeta-CAppCAbs"))
        case Case(scrut, head, flags, b1, b2) if is_value(sig, Role.NOM, scrut):
            args = apps_path(sig, scrut, head, flags)
            if args is not None:
                out.append((CApp(apply_args(args, b1)), "Beta-PatternTrue"))
            else:
                out.append((b2, "Beta-PatternFalse"))
    head, args = spine(a)
    if isinstance(head, Const):
        ax = sig.axiom(head.name)
        if ax is not None and sub_role(ax.axiom_role, role):
            p, rhs = rename(ax.pattern, sig.rhs(ax.name), free_vars(a))
            hit = match_subst(a, p, rhs)
            if hit is not None:
                out.append((hit, "ABeta-Axiom"))
    match a:
        case App(fun, arg, flag):
            out += [(App(f, arg, flag), rule) for f, rule in one_step_reducts(sig, role, fun)]
        case CApp(fun):
            out += [(CApp(f), rule) for f, rule in one_step_reducts(sig, role, fun)]
        case Abs(Rel.IRR, body, ann, hint):
            x = fresh_name(hint, free_vars(a))
            out += [(Abs(Rel.IRR, abstract(b, x), ann, hint), rule)
                    for b, rule in one_step_reducts(sig, role, instantiate(body, Var(x)))]
        case Case(scrut, head_, flags, b1, b2):
            out += [(Case(s, head_, flags, b1, b2), rule) for s, rule in one_step_reducts(sig, Role.NOM, scrut)]
    return out


@dataclass(frozen=True)
class JoinResult:
    joined: bool
    depth_reached: int
    exhausted: bool


def join_search(sig: Signature, role: Role, a: Term, b: Term, depth: int,
                cap: int = DEFAULT_CAP) -> JoinResult:
    omega = {x: Role.NOM for x in free_vars(a) | free_vars(b)}
    left, right = {a}, {b}
    seen_l, seen_r = {a}, {b}
    for d in range(depth + 1):
        if seen_l & seen_r:
            return JoinResult(True, d, False)
        if d == depth:
            break
        left = _frontier(sig, omega, role, left, cap) - seen_l
        right = _frontier(sig, omega, role, right, cap) - seen_r
        seen_l |= left
        seen_r |= right
        if len(seen_l) > cap or len(seen_r) > cap:
            raise CapExceeded(f"joinability search grew beyond {cap} terms")
    return JoinResult(False, depth, True)


def _frontier(sig, omega, role, terms, cap) -> set[Term]:
    out: set[Term] = set()
    for t in terms:
        out |= enumerate_par_reducts(sig, omega, role, t, cap)
    return out


def joinable(sig: Signature, role: Role, a: Term, b: Term, depth: int) -> bool:
    """True iff ``a`` and ``b`` reach a common term within ``depth`` parallel steps each."""
    return join_search(sig, role, a, b, depth).joined


# ---------------------------------------------------------------------------
# Generators


def spine_flags(sig: Signature, name: str) -> list[Flag]:
    """Flags of a saturating spine for ``name``: the pattern, or the type's telescope."""
    e = sig[name]
    if isinstance(e, AxiomDecl):
        return [a.flag for a in e.pattern.args]
    flags: list[Flag] = []
    roles = list(e.roles)
    ty = e.type
    while isinstance(ty, (Pi, CPi)):
        if isinstance(ty, CPi):
            flags.append(Flag.CO)
        elif ty.rel is Rel.IRR:
            flags.append(Flag.IRR)
        else:
            flags.append(Flag.of_role(roles.pop(0)) if roles else Flag.REL)
        ty = ty.body
    return flags


class _Gen:
    """Random erased terms; biased towards redexes and constant-headed spines."""

    VARS = ("x", "y")

    def __init__(self, sig: Signature, rng: random.Random):
        self.sig = sig
        self.rng = rng
        self.heads = list(sig)

    def atom(self, depth: int) -> Term:
        rng = self.rng
        k = rng.random()
        if k < 0.15:
            return STAR
        if k < 0.55:
            return Const(rng.choice(self.heads))
        if depth and k < 0.8:
            return Bound(rng.randrange(depth))
        return Var(rng.choice(self.VARS))

    def spine(self, n: int, depth: int, exact: bool, name: str | None = None) -> Term:
        name = name or self.rng.choice(self.heads)
        flags = spine_flags(self.sig, name)
        if not exact and flags:
            flags = flags[: self.rng.randint(0, len(flags))]
        t: Term = Const(name)
        share = max(1, (n - 1) // max(1, len(flags)))
        for f in flags:
            if f is Flag.CO:
                t = CApp(t)
            elif f is Flag.IRR:
                t = App(t, BOX, f)
            else:
                t = App(t, self.term(share, depth), f)
        return t

    def term(self, n: int, depth: int) -> Term:
        rng = self.rng
        if n <= 1:
            return self.atom(depth)
        k = rng.randrange(14)
        m = n - 1
        left = rng.randint(1, max(1, m - 1))
        match k:
            case 0 | 1:
                return self.spine(m, depth, exact=True)
            case 2:
                return self.spine(m, depth, exact=False)
            case 3:
                return App(Abs(Rel.REL, self.term(left, depth + 1)), self.term(max(1, m - left), depth), Flag.REL)
            case 4:
                return App(Abs(Rel.IRR, self.term(m, depth + 1)), BOX, Flag.IRR)
            case 5:
                return CApp(CAbs(self.term(m, depth)))
            case 6:
                return Abs(rng.choice([Rel.REL, Rel.IRR]), self.term(m, depth + 1))
            case 7:
                return App(self.term(left, depth), self.term(max(1, m - left), depth),
                           rng.choice([Flag.REL, Flag.NOM, Flag.REP]))
            case 8:
                return rng.choice([App(self.term(m, depth), BOX, Flag.IRR), CApp(self.term(m, depth))])
            case 9:
                return Pi(rng.choice([Rel.REL, Rel.IRR]), self.term(left, depth),
                          self.term(max(1, m - left), depth + 1))
            case 10:
                q = max(1, m // 4)
                prop = Prop(self.term(q, depth), self.term(q, depth), rng.choice(list(Role)), self.term(q, depth))
                return CPi(prop, self.term(q, depth))
            case 11 | 12:
                return self.case(m, depth)
            case _:
                return self.term(m, depth)

    def case(self, n: int, depth: int) -> Term:
        head = self.rng.choice(self.heads)
        flags = tuple(spine_flags(self.sig, head))
        q = max(1, n // 3)
        k = self.rng.random()
        if k < 0.5:
            scrut = self.spine(q, depth, exact=True, name=head)
        elif k < 0.75:
            scrut = self.spine(q, depth, exact=True)
        else:
            scrut = self.term(q, depth)
        b1: Term = CAbs(self.term(q, depth + sum(f is not Flag.CO for f in flags)))
        for f in reversed(flags):
            b1 = CAbs(b1) if f is Flag.CO else Abs(Rel.IRR if f is Flag.IRR else Rel.REL, b1)
        return Case(scrut, head, flags, b1, self.term(q, depth))


def small_terms(sig: Signature, max_size: int) -> Iterator[Term]:
    """Exhaustive locally closed erased terms of size at most ``max_size`` (up to 3), size-ordered."""
    if max_size < 1:
        return
    atoms: list[Term] = [STAR, *(Const(n) for n in sig), *(Var(v) for v in _Gen.VARS)]
    yield from atoms
    if max_size < 2:
        return
    yield from [App(f, BOX, Flag.IRR) for f in atoms] + [CApp(f) for f in atoms]
    if max_size < 3:
        return
    for f, x in itertools.product(atoms, atoms):
        for flag in (Flag.REL, Flag.NOM, Flag.REP):
            yield App(f, x, flag)


def gen_terms(sig: Signature, size_bound: int, role: Role, seed: int = 0,
              omega: Mapping[str, Role] | None = None,
              small_first: bool = True) -> Iterator[tuple[dict[str, Role], Term]]:
    """Endless stream of erased terms of size at most ``size_bound`` that role-check at ``role``.

    Small terms come first, exhaustively, unless ``small_first`` is false;
    random samples follow.  Without ``omega`` each sample gets a random role
    context over ``x`` and ``y``.
    """
    rng = random.Random(seed)

    def ctx() -> dict[str, Role]:
        if omega is not None:
            return dict(omega)
        return {v: rng.choice(list(Role)) for v in _Gen.VARS}

    for t in small_terms(sig, min(size_bound, 3) if small_first else 0):
        om = ctx()
        if role_checks(sig, om, t, role):
            yield om, t
    gen = _Gen(sig, rng)
    while True:
        t = gen.term(rng.randint(max(1, size_bound // 3), size_bound), 0)
        if size(t) > size_bound:
            continue
        om = ctx()
        if role_checks(sig, om, t, role):
            yield om, t


# ---------------------------------------------------------------------------
# Well-typed closed surface terms


class _TypedGen:
    """Closed surface terms of type ``Type`` over the mixed corpus signature."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def base(self) -> str:
        return self.rng.choice(["Int", "Bool", "String", "HTML", "Type"])

    def ty(self, n: int, env: list[str]) -> str:
        rng = self.rng
        if n <= 1:
            return rng.choice(env) if env and rng.random() < 0.4 else self.base()
        m = n - 1
        k = rng.randrange(14)
        sub = lambda: self.ty(m, env)  # noqa: E731
        half = lambda: self.ty(max(1, m // 2), env)  # noqa: E731
        match k:
            case 0:
                return f"Maybe @rep ({sub()})"
            case 1:
                return f"Set @nom ({sub()})"
            case 2:
                return f"F @nom ({sub()})"
            case 3:
                return f"T @nom ({sub()})"
            case 4:
                return f"Elem @nom ({sub()})"
            case 5:
                return f"Wrap @rep ({half()}) @nom ({half()})"
            case 6:
                x = fresh_name("a", env)
                return f"(\\+({x}:Type) -> {self.ty(m, [*env, x])}) ({half()})"
            case 7:
                x = fresh_name("b", env)
                return f"(\\-({x}:Type) -> {self.ty(m, env)}) {{{half()}}}"
            case 8:
                a = half()
                lhs, rhs, r = rng.choice([(f"({a})", f"({a})", "nom"), (f"F @nom ({a})", f"Maybe @rep ({a})", "nom"),
                                          ("HTML", "String", "rep"), (f"T @nom ({a})", f"Maybe @rep ({a})", "rep")])
                c = fresh_name("c", env)
                return f"(/\\({c} : {lhs} ~[{r}] {rhs} : Type) -> {half()}) []"
            case 9:
                x = fresh_name("z", env)
                return f"Pi +({x}:{half()}) -> {half()}"
            case 10:
                s = half()
                a = fresh_name("a", env)
                c = fresh_name("c", [*env, a])
                body = self.ty(max(1, m // 2), [*env, a])
                return (f"case ({s}) of Maybe [rep] -> (\\+({a}:Type) -> /\\({c} : ({s}) ~[nom] Maybe @rep {a} : Type)"
                        f" -> {body}) ; _ -> {half()}")
            case 11:
                s = half()
                c = fresh_name("c", env)
                return f"case ({s}) of Int [] -> (/\\({c} : ({s}) ~[nom] Int : Type) -> {half()}) ; _ -> {half()}"
            case 12:
                return f"Phantom @rep ({sub()})"
            case _:
                x, v = fresh_name("t", env), fresh_name("v", env)
                return f"(\\-({x}:Type) -> \\+({v}:{x}) -> {v}) {{Type}} ({sub()})"


def gen_typed_terms(sig: Signature, size_bound: int, seed: int = 0) -> Iterator[tuple[Term, Term]]:
    """Endless stream of ``(term, type)`` for closed surface terms accepted by the checker."""
    rng = random.Random(seed)
    gen = _TypedGen(rng)
    checker = Checker(sig)
    while True:
        text = gen.ty(rng.randint(1, size_bound), [])
        t = parse_term(text, sig)
        try:
            ty = checker.infer(EMPTY_CTX, t)
        except DRError:
            continue
        yield t, ty


__all__ = [
    "DEFAULT_CAP", "JoinResult", "count_redexes", "enumerate_par_reducts", "gen_terms", "gen_typed_terms",
    "join_search", "joinable", "one_step_reducts", "small_terms", "spine_flags",
]
