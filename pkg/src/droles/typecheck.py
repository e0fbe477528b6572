"""Bidirectional checking of annotated terms, contexts and signatures.

Binder annotations make inference syntax-directed; all types produced here
are erased. Conversion is representational equality.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equality import EqEnv, def_eq
from .errors import (
    BoxMisuse, BranchShapeError, CoercionUnprovable, DRError, DuplicateName, EqualityUnknown, FlagMismatch,
    FuelExhausted, HeadNotConstant, IrrelVarEscape, KindError, MissingAnnotation, NotACoercionFunction,
    NotAFunction, PatternShapeError, RoleListMismatch, TypeMismatch, UnknownName, UnsaturatedCase,
)
from .reduce import DEFAULT_FUEL, reduce
from .rolecheck import pat_ctx, role_check
from .roles import Flag, Rel, Role, role_path
from .syntax import (
    BOX, STAR, Abs, App, AxiomDecl, Bound, Box, CAbs, CApp, CoVar, CPi, Case, Const, Ctx, Pi, Prop,
    Signature, Star, Term, TmVar, Var, abstract, apply_spine, children, erase, erase_prop, fresh_name, free_vars,
    instantiate,
)


@dataclass
class Checker:
    sig: Signature
    fuel: int = DEFAULT_FUEL

    # -- helpers -----------------------------------------------------------

    def whnf(self, t: Term) -> Term:
        res = reduce(self.sig, Role.REP, t, self.fuel)
        if res.exhausted:
            raise EqualityUnknown(f"type did not reach weak-head normal form within {self.fuel} steps")
        return res.term

    def conv(self, gamma: Ctx, got: Term, expected: Term) -> bool:
        try:
            return def_eq(EqEnv(self.sig, gamma, None, self.fuel), Role.REP, got, expected)
        except FuelExhausted as exc:
            raise EqualityUnknown(str(exc)) from None

    def fresh(self, hint: str, gamma: Ctx, *terms: Term) -> str:
        avoid = gamma.names() | set(self.sig)
        for t in terms:
            avoid |= free_vars(t)
        return fresh_name(hint, avoid)

    # -- judgments ---------------------------------------------------------

    def check(self, gamma: Ctx, a: Term, expected: Term) -> None:
        got = self.infer(gamma, a)
        if not self.conv(gamma, got, expected):
            raise TypeMismatch(expected, got)

    def check_type(self, gamma: Ctx, a: Term) -> None:
        try:
            self.check(gamma, a, STAR)
        except TypeMismatch as exc:
            raise KindError(f"not a type: {exc}") from None

    def check_prop(self, gamma: Ctx, p: Prop) -> None:
        self.check_type(gamma, p.type)
        ty = erase(p.type)
        self.check(gamma, p.lhs, ty)
        self.check(gamma, p.rhs, ty)

    def infer(self, gamma: Ctx, a: Term) -> Term:
        match a:
            case Star():
                return STAR
            case Var(x):
                entry = gamma.lookup(x)
                if not isinstance(entry, TmVar):
                    raise UnknownName(f"unbound variable {x}")
                return entry.type
            case Bound(i):
                raise UnknownName(f"dangling bound variable #{i}")
            case Const(name):
                if name not in self.sig:
                    raise UnknownName(f"undeclared constant {name}")
                return erase(self.sig[name].type)
            case Box():
                raise BoxMisuse("the trivial term may only appear as an irrelevant argument")
            case Pi(rel, dom, body, hint):
                self.check_type(gamma, dom)
                x = self.fresh(hint, gamma, body)
                self.check_type(gamma.extend(TmVar(x, erase(dom))), instantiate(body, Var(x)))
                return STAR
            case CPi(prop, body, hint):
                self.check_prop(gamma, prop)
                c = self.fresh(hint, gamma, body)
                self.check_type(gamma.extend(CoVar(c, erase_prop(prop))), body)
                return STAR
            case Abs(rel, body, ann, hint):
                if ann is None:
                    raise MissingAnnotation("abstractions need an annotated binder")
                self.check_type(gamma, ann)
                x = self.fresh(hint, gamma, body)
                opened = instantiate(body, Var(x))
                cod = self.infer(gamma.extend(TmVar(x, erase(ann))), opened)
                if rel is Rel.IRR and x in free_vars(erase(opened)):
                    raise IrrelVarEscape(f"irrelevant variable {hint} is used in the body")
                return Pi(rel, erase(ann), abstract(cod, x), hint)
            case CAbs(body, ann, hint):
                if ann is None:
                    raise MissingAnnotation("coercion abstractions need an annotated proposition")
                self.check_prop(gamma, ann)
                c = self.fresh(hint, gamma, body)
                cod = self.infer(gamma.extend(CoVar(c, erase_prop(ann))), body)
                return CPi(erase_prop(ann), cod, hint)
            case App(fun, arg, flag):
                return self.infer_app(gamma, fun, arg, flag)
            case CApp(fun):
                ty = self.whnf(self.infer(gamma, fun))
                if not isinstance(ty, CPi):
                    raise NotACoercionFunction(f"applied to a coercion but has type {_show(ty)}")
                p = ty.prop
                try:
                    ok = def_eq(EqEnv(self.sig, gamma, None, self.fuel), p.role, p.lhs, p.rhs)
                except FuelExhausted as exc:
                    raise EqualityUnknown(str(exc)) from None
                if not ok:
                    raise CoercionUnprovable(f"cannot show {_show(p.lhs)} ~[{p.role}] {_show(p.rhs)}")
                return ty.body
            case Case():
                return self.branch_typing(gamma, a)
        raise UnknownName(f"unknown term form {a!r}")

    def infer_app(self, gamma: Ctx, fun: Term, arg: Term, flag: Flag) -> Term:
        ty = self.whnf(self.infer(gamma, fun))
        if not isinstance(ty, Pi):
            raise NotAFunction(f"applied to an argument but has type {_show(ty)}")
        if flag is Flag.IRR:
            if ty.rel is not Rel.IRR:
                raise FlagMismatch("irrelevant argument given to a relevant function")
            if isinstance(arg, Box):
                if 0 in _bound_uses(ty.body):
                    raise MissingAnnotation("the result type depends on the irrelevant argument; write f {A}")
                return instantiate(ty.body, BOX)
            self.check(gamma, arg, ty.dom)
            return instantiate(ty.body, erase(arg))
        if ty.rel is not Rel.REL:
            raise FlagMismatch("relevant argument given to an irrelevant function; use {A}")
        if flag.role is not None:
            roles = role_path(self.sig, erase(fun))
            if not roles or roles[0] is not flag.role:
                expected = "no role flag" if not roles else f"@{roles[0]}"
                raise FlagMismatch(f"argument flagged @{flag.role} but the path expects {expected}")
        elif flag is not Flag.REL:
            raise FlagMismatch(f"flag {flag} cannot annotate an application")
        self.check(gamma, arg, ty.dom)
        return instantiate(ty.body, erase(arg))

    def branch_typing(self, gamma: Ctx, a: Case) -> Term:
        scrut, head, flags, b1, b2 = a.scrut, a.head, a.flags, a.branch1, a.branch2
        self.check(gamma, scrut, STAR)
        if head not in self.sig:
            raise UnknownName(f"undeclared case head {head}")
        ax = self.sig.axiom(head)
        if ax is not None and ax.axiom_role is Role.NOM:
            raise HeadNotConstant(f"{head} is a type family axiom and cannot head a case pattern")
        result = self.infer(gamma, b2)

        roles = list(self.sig[head].roles)
        ty = erase(self.sig[head].type)
        avoid = gamma.names() | set(self.sig) | free_vars(result) | free_vars(scrut)
        tele: list[tuple[str, object]] = []
        args: list[tuple[Term | None, Flag]] = []
        for i, flag in enumerate(flags, start=1):
            ty = self.whnf(ty)
            if flag is Flag.CO:
                if not isinstance(ty, CPi):
                    raise BranchShapeError(f"flag {i} of case on {head} is a coercion slot but {head} "
                                           f"expects {'no more arguments' if not isinstance(ty, Pi) else 'a term'}")
                tele.append(("co", ty.prop))
                args.append((None, Flag.CO))
                ty = ty.body
                continue
            if not isinstance(ty, Pi):
                raise BranchShapeError(f"case on {head} has {len(flags)} flags, more than {head} accepts")
            x = fresh_name(ty.hint, avoid)
            avoid.add(x)
            if flag is Flag.IRR:
                if ty.rel is not Rel.IRR:
                    raise BranchShapeError(f"flag {i} of case on {head} is irrelevant; the binder is relevant")
                tele.append(("irr", x, ty.dom))
                args.append((BOX, Flag.IRR))
            else:
                if ty.rel is not Rel.REL:
                    raise BranchShapeError(f"flag {i} of case on {head} is relevant; the binder is irrelevant")
                declared = roles.pop(0) if roles else None
                if flag.role is not None and flag.role is not declared:
                    raise FlagMismatch(f"flag {i} of case on {head} is @{flag.role}; "
                                       f"{head} declares {declared if declared else 'no role'} there")
                tele.append(("rel", x, ty.dom))
                args.append((Var(x), flag))
            ty = instantiate(ty.body, Var(x))
        if not isinstance(self.whnf(ty), Star):
            raise UnsaturatedCase(f"case on {head} must apply it to all of its arguments "
                                  f"(remaining type {_show(ty)})")

        pattern_term = apply_spine(Const(head), args)
        c = fresh_name("c", avoid)
        expected: Term = CPi(Prop(erase(scrut), pattern_term, Role.NOM, STAR), result, c)
        for entry in reversed(tele):
            if entry[0] == "co":
                expected = CPi(entry[1], expected, "c")
            else:
                _, x, dom = entry
                rel = Rel.IRR if entry[0] == "irr" else Rel.REL
                expected = Pi(rel, dom, abstract(expected, x), x)
        _branch_shape(head, b1, [entry[0] for entry in tele] + ["co"])
        self.check(gamma, b1, expected)
        return result

    # -- contexts and signatures ------------------------------------------

    def ctx_ok(self, gamma: Ctx) -> None:
        prefix = Ctx()
        for entry in gamma:
            if entry.name in prefix.names():
                raise DuplicateName(f"{entry.name} is bound twice in the context")
            if isinstance(entry, TmVar):
                self.check_type(prefix, entry.type)
            else:
                self.check_prop(prefix, entry.prop)
            prefix = prefix.extend(entry)

    def check_entry(self, name: str) -> None:
        entry = self.sig[name]
        try:
            self.check_type(Ctx(), entry.type)
        except DRError as exc:
            raise KindError(f"type of {name}: {exc}") from None
        if not isinstance(entry, AxiomDecl):
            relevant = _relevant_binders(erase(entry.type))
            if relevant is not None and len(entry.roles) > relevant:
                raise RoleListMismatch(f"{name} declares {len(entry.roles)} roles for {relevant} relevant parameters")
            return
        p = entry.pattern
        if p.head != name:
            raise PatternShapeError(f"axiom {name} has a pattern headed by {p.head}")
        names = p.variables()
        if len(set(names)) != len(names):
            raise PatternShapeError(f"pattern of {name} binds a variable twice")
        gamma, result, omega = pat_ctx(self.sig, p, erase(entry.type), self.fuel)
        self.check(gamma, entry.rhs, result)
        role_check(self.sig, omega, erase(entry.rhs), entry.axiom_role)
        if list(entry.roles) != list(omega.values()):
            raise RoleListMismatch(f"{name} declares roles {[str(r) for r in entry.roles]} but its pattern "
                                   f"binds {[str(r) for r in omega.values()]}")

    def check_sig(self) -> list[tuple[str, DRError | None]]:
        out: list[tuple[str, DRError | None]] = []
        for name in self.sig:
            try:
                self.check_entry(name)
            except DRError as exc:
                out.append((name, exc))
            else:
                out.append((name, None))
        for dup in self.sig.duplicates:
            out.append((dup, DuplicateName(f"{dup} is declared more than once")))
        return out


def _branch_shape(head: str, b1: Term, kinds: list[str]) -> None:
    """The first branch must start with one abstraction per telescope entry."""
    t = b1
    for i, kind in enumerate(kinds, start=1):
        ok = (isinstance(t, CAbs) if kind == "co"
              else isinstance(t, Abs) and t.rel is (Rel.IRR if kind == "irr" else Rel.REL))
        if not ok:
            want = {"co": "a coercion abstraction", "irr": "an irrelevant abstraction", "rel": "a relevant abstraction"}
            raise BranchShapeError(f"branch for {head} must start with {len(kinds)} abstractions; "
                                   f"position {i} needs {want[kind]}")
        t = t.body


def _bound_uses(t: Term, depth: int = 0) -> set[int]:
    """Indices (relative to the outer binder) of dangling bound variables."""
    match t:
        case Bound(i):
            return {i - depth} if i >= depth else set()
        case Abs(_, body, ann, _):
            return _bound_uses(body, depth + 1) | (set() if ann is None else _bound_uses(ann, depth))
        case Pi(_, dom, body, _):
            return _bound_uses(dom, depth) | _bound_uses(body, depth + 1)
    out: set[int] = set()
    for c in children(t):
        out |= _bound_uses(c, depth)
    return out


def _relevant_binders(ty: Term) -> int | None:
    n = 0
    while isinstance(ty, (Pi, CPi)):
        if isinstance(ty, Pi) and ty.rel is Rel.REL:
            n += 1
        ty = ty.body
    return n if isinstance(ty, Star) else None


def _show(t: Term) -> str:
    from .concrete import show

    return show(t)


# ---------------------------------------------------------------------------
# Function interface


def infer(sig: Signature, gamma: Ctx, a: Term, fuel: int = DEFAULT_FUEL) -> Term:
    return Checker(sig, fuel).infer(gamma, a)


def check(sig: Signature, gamma: Ctx, a: Term, expected: Term, fuel: int = DEFAULT_FUEL) -> None:
    Checker(sig, fuel).check(gamma, a, erase(expected))


def branch_typing(sig: Signature, gamma: Ctx, a: Case, fuel: int = DEFAULT_FUEL) -> Term:
    return Checker(sig, fuel).branch_typing(gamma, a)


def check_prop(sig: Signature, gamma: Ctx, p: Prop, fuel: int = DEFAULT_FUEL) -> None:
    Checker(sig, fuel).check_prop(gamma, p)


def ctx_ok(sig: Signature, gamma: Ctx, fuel: int = DEFAULT_FUEL) -> None:
    Checker(sig, fuel).ctx_ok(gamma)


def check_sig_entries(sig: Signature, fuel: int = DEFAULT_FUEL) -> list[tuple[str, DRError | None]]:
    return Checker(sig, fuel).check_sig()


def check_sig(sig: Signature, fuel: int = DEFAULT_FUEL) -> None:
    """Raise the first problem found in ``sig``."""
    for _, err in check_sig_entries(sig, fuel):
        if err is not None:
            raise err


__all__ = [
    "Checker", "infer", "check", "branch_typing", "check_prop", "ctx_ok", "check_sig", "check_sig_entries",
]
