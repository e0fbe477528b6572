"""Algorithmic role-indexed definitional equality.

A sound, fuel-bounded semi-decision procedure. ``True`` verdicts come with a
:class:`Derivation` whose nodes name the declarative rule used; ``audit``
re-checks each node locally. Running out of fuel raises
:class:`FuelExhausted`, which is distinct from ``False``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import FuelExhausted
from .reduce import DEFAULT_FUEL, Stepped, reduce, step
from .roles import Flag, Role, min_role, sub_role
from .syntax import (
    Abs, App, CAbs, CApp, CPi, Case, Ctx, Pi, Prop, Signature, Term, Var, abstract, erase, erase_prop,
    fresh_name, free_vars, instantiate, prop_free_vars,
)


@dataclass
class EqEnv:
    sig: Signature
    ctx: Ctx = field(default_factory=Ctx)
    avail: frozenset[str] | None = None
    fuel: int = DEFAULT_FUEL

    def __post_init__(self):
        if self.avail is None:
            self.avail = frozenset(self.ctx.names())
        else:
            self.avail = frozenset(self.avail)
            missing = self.avail - self.ctx.names()
            if missing:
                raise ValueError(f"available set mentions names outside the context: {sorted(missing)}")

    def assumptions(self) -> list[tuple[str, Prop]]:
        return [(c.name, erase_prop(c.prop)) for c in self.ctx.coercions() if c.name in self.avail]


@dataclass(frozen=True)
class Derivation:
    rule: str
    role: Role
    lhs: Term
    rhs: Term
    premises: tuple[Derivation, ...] = ()
    info: object = None

    def rules(self) -> set[str]:
        out = {self.rule}
        for p in self.premises:
            out |= p.rules()
        return out


def def_eq(env: EqEnv, r: Role, a: Term, b: Term) -> bool:
    return def_eq_derivation(env, r, a, b) is not None


def def_eq_derivation(env: EqEnv, r: Role, a: Term, b: Term) -> Derivation | None:
    return _Equality(env).eq(erase(a), erase(b), r)


def prop_eq(env: EqEnv, p1: Prop, p2: Prop) -> bool:
    return _Equality(env).prop(erase_prop(p1), erase_prop(p2)) is not None


class _Equality:
    def __init__(self, env: EqEnv):
        self.env = env
        self.sig = env.sig
        self.budget = env.fuel
        self.hyps = env.assumptions()
        self.avoid = set(env.ctx.names())
        for _, p in self.hyps:
            self.avoid |= prop_free_vars(p)
        self._graphs: dict[Role, dict[Term, list[tuple[Term, object]]]] = {}
        self._memo: dict[tuple[Term, Term, Role], Derivation | None] = {}

    # -- reduction under a shared budget ---------------------------------

    def whnf(self, a: Term, r: Role) -> tuple[Term, int]:
        res = reduce(self.sig, r, a, self.budget)
        self.budget -= res.steps
        if res.exhausted:
            raise FuelExhausted(f"equality check ran out of fuel ({self.env.fuel} steps)")
        return res.term, res.steps

    # -- assumptions -------------------------------------------------------

    def graph(self, r: Role) -> dict[Term, list[tuple[Term, object]]]:
        g = self._graphs.get(r)
        if g is not None:
            return g
        g = {}

        def link(u: Term, v: Term, via: object) -> None:
            g.setdefault(u, []).append((v, via))
            g.setdefault(v, []).append((u, via))

        for name, p in self.hyps:
            if not sub_role(p.role, r):
                continue
            link(p.lhs, p.rhs, name)
            for end in (p.lhs, p.rhs):
                res = reduce(self.sig, r, end, min(self.budget, 1000))
                if not res.exhausted and res.term != end:
                    link(end, res.term, ("reduce", res.steps))
        self._graphs[r] = g
        return g

    def assume(self, a: Term, b: Term, r: Role) -> Derivation | None:
        if not self.hyps:
            return None
        g = self.graph(r)
        if a not in g or b not in g:
            return None
        prev: dict[Term, tuple[Term, object] | None] = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for v, via in g[u]:
                if v not in prev:
                    prev[v] = (u, via)
                    queue.append(v)
        if b not in prev:
            return None
        chain = []
        node = b
        while prev[node] is not None:
            u, via = prev[node]
            chain.append((u, node, via))
            node = u
        chain.reverse()
        return Derivation("E-Assn", r, a, b, info=tuple(chain))

    # -- main loop ---------------------------------------------------------

    def fresh(self, hint: str, *terms: Term) -> str:
        avoid = set(self.avoid)
        for t in terms:
            avoid |= free_vars(t)
        x = fresh_name(hint, avoid)
        self.avoid.add(x)
        return x

    def eq(self, a: Term, b: Term, r: Role) -> Derivation | None:
        key = (a, b, r)
        if key in self._memo:
            return self._memo[key]
        out = self._eq(a, b, r)
        self._memo[key] = out
        return out

    def _eq(self, a: Term, b: Term, r: Role) -> Derivation | None:
        if a == b:
            return Derivation("AE-Refl", r, a, b)
        hyp = self.assume(a, b, r)
        if hyp is not None:
            return hyp
        a1, na = self.whnf(a, r)
        b1, nb = self.whnf(b, r)
        if (a1, b1) != (a, b):
            core = Derivation("AE-Refl", r, a1, b1) if a1 == b1 else (self.assume(a1, b1, r)
                                                                     or self.structural(a1, b1, r))
            if core is None:
                return None
            parts = []
            if na:
                parts.append(Derivation("Reduce", r, a, a1, info=na))
            parts.append(core)
            if nb:
                parts.append(Derivation("AE-Sym", r, b1, b, (Derivation("Reduce", r, b, b1, info=nb),)))
            return parts[0] if len(parts) == 1 else Derivation("AE-Trans", r, a, b, tuple(parts))
        return self.structural(a, b, r)

    def structural(self, a: Term, b: Term, r: Role) -> Derivation | None:
        match a, b:
            case Abs(rel1, body1, _, hint), Abs(rel2, body2, _, _) if rel1 is rel2:
                x = self.fresh(hint, a, b)
                d = self.eq(instantiate(body1, Var(x)), instantiate(body2, Var(x)), r)
                return d and Derivation("AE-AbsCong", r, a, b, (d,), x)
            case Pi(rel1, dom1, body1, hint), Pi(rel2, dom2, body2, _) if rel1 is rel2:
                d1 = self.eq(dom1, dom2, r)
                if d1 is None:
                    return None
                x = self.fresh(hint, a, b)
                d2 = self.eq(instantiate(body1, Var(x)), instantiate(body2, Var(x)), r)
                return d2 and Derivation("AE-PiCong", r, a, b, (d1, d2), x)
            case App(f1, x1, fl1), App(f2, x2, fl2) if fl1 is fl2:
                d1 = self.eq(f1, f2, r)
                if d1 is None:
                    return None
                if fl1 is Flag.IRR:
                    return Derivation("E-IAppCong", r, a, b, (d1,))
                if fl1 is Flag.REL:
                    d2 = self.eq(x1, x2, Role.NOM)
                    return d2 and Derivation("AE-AppCong", r, a, b, (d1, d2))
                d2 = self.eq(x1, x2, min_role(fl1.role, r))
                return d2 and Derivation("AE-TAppCong", r, a, b, (d1, d2))
            case CApp(f1), CApp(f2):
                d = self.eq(f1, f2, r)
                return d and Derivation("E-CAppCong", r, a, b, (d,))
            case CAbs(body1, _, _), CAbs(body2, _, _):
                d = self.eq(body1, body2, r)
                return d and Derivation("E-CAbsCong", r, a, b, (d,))
            case CPi(p1, body1, _), CPi(p2, body2, _):
                dp = self.prop(p1, p2)
                if dp is None:
                    return None
                d = self.eq(body1, body2, r)
                return d and Derivation("E-CPiCong", r, a, b, (*dp, d))
            case Case(s1, h1, fl1, l1, r1), Case(s2, h2, fl2, l2, r2) if h1 == h2 and fl1 == fl2:
                ds = self.eq(s1, s2, Role.NOM)
                if ds is None:
                    return None
                d1 = self.eq(l1, l2, r)
                if d1 is None:
                    return None
                d2 = self.eq(r1, r2, r)
                return d2 and Derivation("E-CaseCong", r, a, b, (ds, d1, d2))
        return None

    def prop(self, p1: Prop, p2: Prop) -> tuple[Derivation, ...] | None:
        if p1.role is not p2.role:
            return None
        out = []
        for u, v, role in ((p1.lhs, p2.lhs, p1.role), (p1.rhs, p2.rhs, p1.role), (p1.type, p2.type, Role.REP)):
            d = self.eq(u, v, role)
            if d is None:
                return None
            out.append(d)
        return tuple(out)


# ---------------------------------------------------------------------------
# Auditing derivations


def audit(env: EqEnv, d: Derivation) -> bool:
    """Check every node of ``d`` against the local shape of its rule."""
    sig = env.sig
    hyps = dict(env.assumptions())

    def reduces_to(a: Term, b: Term, r: Role, n: int) -> bool:
        for _ in range(n):
            out = step(sig, r, a)
            if not isinstance(out, Stepped):
                return False
            a = out.term
        return a == b

    def ok(d: Derivation) -> bool:
        r = d.role
        ps = d.premises
        if not all(ok(p) for p in ps):
            return False
        if any(not sub_role(p.role, r) for p in ps if d.rule in ("AE-Trans", "AE-Sym")):
            return False
        match d.rule:
            case "AE-Refl":
                return d.lhs == d.rhs
            case "Reduce":
                return reduces_to(d.lhs, d.rhs, r, d.info)
            case "AE-Sym":
                return len(ps) == 1 and (ps[0].lhs, ps[0].rhs) == (d.rhs, d.lhs)
            case "AE-Trans":
                ends = [d.lhs] + [x for p in ps for x in (p.lhs, p.rhs)] + [d.rhs]
                return all(ends[i] == ends[i + 1] for i in range(0, len(ends), 2))
            case "E-Assn":
                cur = d.lhs
                for u, v, via in d.info:
                    if u != cur:
                        return False
                    if isinstance(via, tuple):
                        if not (reduces_to(u, v, r, via[1]) or reduces_to(v, u, r, via[1])):
                            return False
                    else:
                        p = hyps.get(via)
                        if p is None or not sub_role(p.role, r) or {u, v} != {p.lhs, p.rhs}:
                            return False
                    cur = v
                return cur == d.rhs
        return _audit_congruence(d)

    return ok(d)


def _audit_congruence(d: Derivation) -> bool:
    a, b, r, ps = d.lhs, d.rhs, d.role, d.premises

    def rel(p: Derivation, u: Term, v: Term, role: Role) -> bool:
        return p.lhs == u and p.rhs == v and p.role is role

    match d.rule, a, b:
        case "AE-AbsCong", Abs(rel1, body1, _, _), Abs(rel2, body2, _, _):
            x = d.info
            return (rel1 is rel2 and len(ps) == 1 and ps[0].role is r
                    and abstract(ps[0].lhs, x) == body1 and abstract(ps[0].rhs, x) == body2)
        case "AE-PiCong", Pi(rel1, dom1, body1, _), Pi(rel2, dom2, body2, _):
            x = d.info
            return (rel1 is rel2 and len(ps) == 2 and rel(ps[0], dom1, dom2, r) and ps[1].role is r
                    and abstract(ps[1].lhs, x) == body1 and abstract(ps[1].rhs, x) == body2)
        case "AE-AppCong", App(f1, x1, Flag.REL), App(f2, x2, Flag.REL):
            return len(ps) == 2 and rel(ps[0], f1, f2, r) and rel(ps[1], x1, x2, Role.NOM)
        case "AE-TAppCong", App(f1, x1, fl1), App(f2, x2, fl2):
            return (fl1 is fl2 and fl1.role is not None and len(ps) == 2 and rel(ps[0], f1, f2, r)
                    and rel(ps[1], x1, x2, min_role(fl1.role, r)))
        case "E-IAppCong", App(f1, _, Flag.IRR), App(f2, _, Flag.IRR):
            return len(ps) == 1 and rel(ps[0], f1, f2, r)
        case "E-CAppCong", CApp(f1), CApp(f2):
            return len(ps) == 1 and rel(ps[0], f1, f2, r)
        case "E-CAbsCong", CAbs(b1, _, _), CAbs(b2, _, _):
            return len(ps) == 1 and rel(ps[0], b1, b2, r)
        case "E-CPiCong", CPi(p1, b1, _), CPi(p2, b2, _):
            return (p1.role is p2.role and len(ps) == 4 and rel(ps[0], p1.lhs, p2.lhs, p1.role)
                    and rel(ps[1], p1.rhs, p2.rhs, p1.role) and rel(ps[2], p1.type, p2.type, Role.REP)
                    and rel(ps[3], b1, b2, r))
        case "E-CaseCong", Case(s1, h1, f1, l1, r1), Case(s2, h2, f2, l2, r2):
            return (h1 == h2 and f1 == f2 and len(ps) == 3 and rel(ps[0], s1, s2, Role.NOM)
                    and rel(ps[1], l1, l2, r) and rel(ps[2], r1, r2, r))
    return False
