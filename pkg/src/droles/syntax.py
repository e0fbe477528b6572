"""Terms, propositions, patterns and signatures.

Bound term variables are de Bruijn indices (``Bound``); free variables are
names (``Var``). Binder name hints never take part in equality, so two terms
are alpha-equivalent exactly when they compare equal with ``==``.

Coercion variables never occur inside terms (coercion application is the
nameless ``a []``), so ``CAbs``/``CPi`` keep the variable only as a hint and
do not shift indices.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from .roles import Flag, Rel, Role


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Star(Term):
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Bound(Term):
    index: int


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Box(Term):
    pass


@dataclass(frozen=True)
class Abs(Term):
    rel: Rel
    body: Term
    ann: Term | None = None
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term
    flag: Flag = Flag.REL


@dataclass(frozen=True)
class Pi(Term):
    rel: Rel
    dom: Term
    body: Term
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Prop:
    lhs: Term
    rhs: Term
    role: Role
    type: Term


@dataclass(frozen=True)
class CAbs(Term):
    body: Term
    ann: Prop | None = None
    hint: str = field(default="c", compare=False)


@dataclass(frozen=True)
class CApp(Term):
    fun: Term


@dataclass(frozen=True)
class CPi(Term):
    prop: Prop
    body: Term
    hint: str = field(default="c", compare=False)


@dataclass(frozen=True)
class Case(Term):
    scrut: Term
    head: str
    flags: tuple[Flag, ...]
    branch1: Term
    branch2: Term


STAR = Star()
BOX = Box()


# ---------------------------------------------------------------------------
# Generic traversal


def _map_prop(p: Prop, f) -> Prop:
    return Prop(f(p.lhs, 0), f(p.rhs, 0), p.role, f(p.type, 0))


def _map(t: Term, f, depth: int) -> Term:
    """Rebuild ``t`` applying ``f(child, depth)`` to immediate children."""
    match t:
        case Abs(rel, body, ann, hint):
            return Abs(rel, f(body, depth + 1), None if ann is None else f(ann, depth), hint)
        case App(fun, arg, flag):
            return App(f(fun, depth), f(arg, depth), flag)
        case Pi(rel, dom, body, hint):
            return Pi(rel, f(dom, depth), f(body, depth + 1), hint)
        case CAbs(body, ann, hint):
            return CAbs(f(body, depth), None if ann is None else _map_prop(ann, lambda s, _: f(s, depth)), hint)
        case CApp(fun):
            return CApp(f(fun, depth))
        case CPi(prop, body, hint):
            return CPi(_map_prop(prop, lambda s, _: f(s, depth)), f(body, depth), hint)
        case Case(scrut, head, flags, b1, b2):
            return Case(f(scrut, depth), head, flags, f(b1, depth), f(b2, depth))
        case _:
            return t


def children(t: Term) -> Iterator[Term]:
    match t:
        case Abs(_, body, ann, _):
            if ann is not None:
                yield ann
            yield body
        case App(fun, arg, _):
            yield fun
            yield arg
        case Pi(_, dom, body, _):
            yield dom
            yield body
        case CAbs(body, ann, _):
            if ann is not None:
                yield from (ann.lhs, ann.rhs, ann.type)
            yield body
        case CApp(fun):
            yield fun
        case CPi(prop, body, _):
            yield from (prop.lhs, prop.rhs, prop.type)
            yield body
        case Case(scrut, _, _, b1, b2):
            yield from (scrut, b1, b2)


# ---------------------------------------------------------------------------
# Binding operations


def instantiate(body: Term, replacement: Term) -> Term:
    """Open the outermost binder of ``body`` with ``replacement``."""

    def go(t: Term, depth: int) -> Term:
        if isinstance(t, Bound):
            return replacement if t.index == depth else t
        if isinstance(t, (Var, Const, Star, Box)):
            return t
        return _map(t, go, depth)

    return go(body, 0)


substitute = instantiate


def abstract(t: Term, name: str) -> Term:
    """Turn free occurrences of ``name`` into the index of a new binder."""

    def go(s: Term, depth: int) -> Term:
        if isinstance(s, Var):
            return Bound(depth) if s.name == name else s
        if isinstance(s, (Bound, Const, Star, Box)):
            return s
        return _map(s, go, depth)

    return go(t, 0)


def subst_vars(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Simultaneously replace free variables; replacements must be locally closed."""
    if not mapping:
        return t

    def go(s: Term, depth: int) -> Term:
        if isinstance(s, Var):
            return mapping.get(s.name, s)
        if isinstance(s, (Bound, Const, Star, Box)):
            return s
        return _map(s, go, depth)

    return go(t, 0)


def subst_prop(p: Prop, mapping: Mapping[str, Term]) -> Prop:
    return Prop(subst_vars(p.lhs, mapping), subst_vars(p.rhs, mapping), p.role, subst_vars(p.type, mapping))


def instantiate_prop(p: Prop, replacement: Term) -> Prop:
    return Prop(instantiate(p.lhs, replacement), instantiate(p.rhs, replacement), p.role,
                instantiate(p.type, replacement))


def abstract_prop(p: Prop, name: str) -> Prop:
    return Prop(abstract(p.lhs, name), abstract(p.rhs, name), p.role, abstract(p.type, name))


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        else:
            stack.extend(children(s))
    return out


def prop_free_vars(p: Prop) -> set[str]:
    return free_vars(p.lhs) | free_vars(p.rhs) | free_vars(p.type)


def constants(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Const):
            out.add(s.name)
        elif isinstance(s, Case):
            out.add(s.head)
            stack.extend(children(s))
        else:
            stack.extend(children(s))
    return out


def is_locally_closed(t: Term) -> bool:
    def go(s: Term, depth: int) -> bool:
        match s:
            case Bound(i):
                return i < depth
            case Abs(_, body, ann, _):
                return go(body, depth + 1) and (ann is None or go(ann, depth))
            case Pi(_, dom, body, _):
                return go(dom, depth) and go(body, depth + 1)
            case _:
                return all(go(c, depth) for c in children(s))

    return go(t, 0)


def alpha_eq(a: Term, b: Term) -> bool:
    return a == b


def erase(t: Term) -> Term:
    """Drop binder annotations and irrelevant arguments."""
    match t:
        case Abs(rel, body, _, hint):
            return Abs(rel, erase(body), None, hint)
        case CAbs(body, _, hint):
            return CAbs(erase(body), None, hint)
        case App(fun, _, Flag.IRR):
            return App(erase(fun), BOX, Flag.IRR)
        case Var() | Bound() | Const() | Star() | Box():
            return t
        case _:
            return _map(t, lambda s, _d: erase(s), 0)


def erase_prop(p: Prop) -> Prop:
    return Prop(erase(p.lhs), erase(p.rhs), p.role, erase(p.type))


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in children(t))


# ---------------------------------------------------------------------------
# Spines


def spine(t: Term) -> tuple[Term, list[tuple[Term | None, Flag]]]:
    """Split an application path into its head and applicators.

    Coercion applications appear as ``(None, Flag.CO)``.
    """
    args: list[tuple[Term | None, Flag]] = []
    while True:
        if isinstance(t, App):
            args.append((t.arg, t.flag))
            t = t.fun
        elif isinstance(t, CApp):
            args.append((None, Flag.CO))
            t = t.fun
        else:
            break
    args.reverse()
    return t, args


def apply_spine(head: Term, args: Iterable[tuple[Term | None, Flag]]) -> Term:
    for arg, flag in args:
        head = CApp(head) if flag is Flag.CO else App(head, arg, flag)
    return head


def path_head(t: Term) -> str | None:
    head, _ = spine(t)
    return head.name if isinstance(head, Const) else None


# ---------------------------------------------------------------------------
# Fresh names

_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def fresh_name(hint: str, avoid: Iterable[str] | set[str]) -> str:
    """``hint`` itself, or ``hint`` with the least numeric suffix not in ``avoid``."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    if hint not in avoid:
        return hint
    base = _SUFFIX.match(hint)
    stem = base.group(1) if base and base.group(1) else hint
    n = 1
    while f"{stem}{n}" in avoid:
        n += 1
    return f"{stem}{n}"


def open_fresh(body: Term, hint: str, avoid: set[str]) -> tuple[str, Term]:
    name = fresh_name(hint, avoid)
    return name, instantiate(body, Var(name))


# ---------------------------------------------------------------------------
# Patterns and signatures


@dataclass(frozen=True)
class PatArg:
    """One pattern slot. ``flag`` NOM/REP is a role variable, REL a relevant
    variable, IRR the irrelevant slot and CO the coercion slot."""

    flag: Flag
    name: str | None = None

    @property
    def is_var(self) -> bool:
        return self.flag not in (Flag.IRR, Flag.CO)


@dataclass(frozen=True)
class Pattern:
    head: str
    args: tuple[PatArg, ...] = ()

    def variables(self) -> list[str]:
        return [a.name for a in self.args if a.is_var]

    def roles(self) -> list[Role]:
        return [a.flag.role for a in self.args if a.flag.role is not None]

    def as_term(self) -> Term:
        t: Term = Const(self.head)
        for a in self.args:
            if a.flag is Flag.CO:
                t = CApp(t)
            elif a.flag is Flag.IRR:
                t = App(t, BOX, Flag.IRR)
            else:
                t = App(t, Var(a.name), a.flag)
        return t

    def rename(self, mapping: Mapping[str, str]) -> Pattern:
        return Pattern(self.head, tuple(PatArg(a.flag, mapping.get(a.name, a.name)) if a.is_var else a
                                        for a in self.args))


@dataclass(frozen=True)
class ConstDecl:
    name: str
    type: Term
    roles: tuple[Role, ...] = ()


@dataclass(frozen=True)
class AxiomDecl:
    name: str
    type: Term
    roles: tuple[Role, ...]
    pattern: Pattern
    rhs: Term
    axiom_role: Role

    @property
    def rhs_core(self) -> Term:
        return erase(self.rhs)


SigEntry = ConstDecl | AxiomDecl


class Signature(Mapping[str, SigEntry]):
    """Ordered, read-only map from constant names to declarations."""

    def __init__(self, entries: Iterable[SigEntry] = ()):
        self._entries: dict[str, SigEntry] = {}
        self.duplicates: list[str] = []
        self._core_rhs: dict[str, Term] = {}
        for e in entries:
            if e.name in self._entries:
                self.duplicates.append(e.name)
                continue
            self._entries[e.name] = e
            if isinstance(e, AxiomDecl):
                self._core_rhs[e.name] = erase(e.rhs)

    def __getitem__(self, name: str) -> SigEntry:
        return self._entries[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"Signature({list(self._entries)})"

    def axiom(self, name: str) -> AxiomDecl | None:
        e = self._entries.get(name)
        return e if isinstance(e, AxiomDecl) else None

    def rhs(self, name: str, surface: bool = False) -> Term:
        return self._entries[name].rhs if surface else self._core_rhs[name]

    def extend(self, entries: Iterable[SigEntry]) -> Signature:
        return Signature([*self._entries.values(), *entries])


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class TmVar:
    name: str
    type: Term


@dataclass(frozen=True)
class CoVar:
    name: str
    prop: Prop


CtxEntry = TmVar | CoVar


@dataclass(frozen=True)
class Ctx:
    entries: tuple[CtxEntry, ...] = ()

    def extend(self, entry: CtxEntry) -> Ctx:
        return Ctx(self.entries + (entry,))

    def lookup(self, name: str) -> CtxEntry | None:
        for e in reversed(self.entries):
            if e.name == name:
                return e
        return None

    def names(self) -> set[str]:
        return {e.name for e in self.entries}

    def term_vars(self) -> list[str]:
        return [e.name for e in self.entries if isinstance(e, TmVar)]

    def coercions(self) -> list[CoVar]:
        return [e for e in self.entries if isinstance(e, CoVar)]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


EMPTY_CTX = Ctx()
