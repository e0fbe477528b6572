"""Concrete ASCII syntax: tokenizer, parser and printer for ``.dr`` files.

Declarations::

    const NAME : TYPE @ [r1, ...]
    typefam NAME : TYPE @ [r, ...] where PATTERN = TERM     -- axiom role nom
    newtype NAME : TYPE @ [r, ...] where PATTERN = TERM     -- axiom role rep

Terms::

    Type                         \\+(x:A) -> b    \\-(x:A) -> b
    Pi +(x:A) -> B               Pi -(x:A) -> B   A -> B
    f a    f @nom a    f @rep a  f {_}    f {A}    f []
    /\\(c : a ~[nom] b : A) -> t  Forall (c : a ~[rep] b : A) -> B
    case s of F [rep, +, -, o] -> b1 ; _ -> b2

Binders may omit the annotation (``\\+x -> b``, ``/\\c -> t``); such terms
print and evaluate but do not typecheck.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import ParseError
from .roles import Flag, Rel, Role
from .syntax import (
    BOX, STAR, Abs, App, AxiomDecl, Bound, Box, CAbs, CApp, ConstDecl, CPi, Case, Const, Pattern, PatArg, Pi,
    Prop, SigEntry, Signature, Star, Term, Var, constants, fresh_name, free_vars,
)

KEYWORDS = {"Type", "Pi", "Forall", "case", "of", "const", "typefam", "newtype", "where"}
DECL_KEYWORDS = {"const", "typefam", "newtype"}
ROLE_NAMES = {"nom": Role.NOM, "rep": Role.REP}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<sym>/\\|->|\\|[()\[\]{}:;,@~=+\-_])
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*|_[A-Za-z0-9_']+)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            out.append(Token("kw" if m.group() in KEYWORDS else "ident", m.group(), line, pos - line_start + 1))
        elif kind == "sym":
            out.append(Token("sym", m.group(), line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class Parser:
    def __init__(self, text: str, consts: Iterable[str] = ()):
        self.toks = tokenize(text)
        self.i = 0
        self.consts = set(consts)

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("sym", "kw")

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{msg}, found {found}", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error("expected an identifier")
        t = self.tok
        self.i += 1
        return t.text

    def role(self) -> Role:
        t = self.tok
        if t.kind != "ident" or t.text not in ROLE_NAMES:
            raise self.error("expected a role ('nom' or 'rep')")
        self.i += 1
        return ROLE_NAMES[t.text]

    # -- terms -------------------------------------------------------------

    def term(self, scope: list[str | None], locals_: frozenset[str] = frozenset()) -> Term:
        t = self.tok
        if t.kind == "sym" and t.text == "\\":
            self.i += 1
            rel = self.relevance()
            x, ann = self.binder(scope, locals_)
            self.expect("->")
            return Abs(rel, self.term([x, *scope], locals_), ann, x)
        if t.kind == "kw" and t.text == "Pi":
            self.i += 1
            rel = self.relevance()
            self.expect("(")
            x = self.ident()
            self.expect(":")
            dom = self.term(scope, locals_)
            self.expect(")")
            self.expect("->")
            return Pi(rel, dom, self.term([x, *scope], locals_), x)
        if t.kind == "sym" and t.text == "/\\":
            self.i += 1
            if self.at("("):
                self.expect("(")
                c = self.ident()
                self.expect(":")
                prop = self.prop(scope, locals_)
                self.expect(")")
            else:
                c, prop = self.ident(), None
            self.expect("->")
            return CAbs(self.term(scope, locals_), prop, c)
        if t.kind == "kw" and t.text == "Forall":
            self.i += 1
            self.expect("(")
            c = self.ident()
            self.expect(":")
            prop = self.prop(scope, locals_)
            self.expect(")")
            self.expect("->")
            return CPi(prop, self.term(scope, locals_), c)
        if t.kind == "kw" and t.text == "case":
            return self.case(scope, locals_)
        lhs = self.app(scope, locals_)
        if self.at("->"):
            self.i += 1
            return Pi(Rel.REL, lhs, self.term([None, *scope], locals_), "_")
        return lhs

    def relevance(self) -> Rel:
        if self.at("+"):
            self.i += 1
            return Rel.REL
        if self.at("-"):
            self.i += 1
            return Rel.IRR
        raise self.error("expected '+' or '-'")

    def binder(self, scope, locals_) -> tuple[str, Term | None]:
        if self.at("("):
            self.expect("(")
            x = self.ident()
            self.expect(":")
            ann = self.term(scope, locals_)
            self.expect(")")
            return x, ann
        return self.ident(), None

    def prop(self, scope, locals_) -> Prop:
        lhs = self.app(scope, locals_)
        self.expect("~")
        self.expect("[")
        r = self.role()
        self.expect("]")
        rhs = self.app(scope, locals_)
        self.expect(":")
        ty = self.term(scope, locals_)
        return Prop(lhs, rhs, r, ty)

    def case(self, scope, locals_) -> Term:
        self.expect("case")
        scrut = self.term(scope, locals_)
        self.expect("of")
        head = self.ident()
        self.expect("[")
        flags: list[Flag] = []
        while not self.at("]"):
            flags.append(self.case_flag())
            if self.at(","):
                self.i += 1
        self.expect("]")
        self.expect("->")
        b1 = self.term(scope, locals_)
        self.expect(";")
        self.expect("_")
        self.expect("->")
        b2 = self.term(scope, locals_)
        return Case(scrut, head, tuple(flags), b1, b2)

    def case_flag(self) -> Flag:
        t = self.tok
        if t.text == "+" and t.kind == "sym":
            self.i += 1
            return Flag.REL
        if t.text == "-" and t.kind == "sym":
            self.i += 1
            return Flag.IRR
        if t.kind == "ident" and t.text == "o":
            self.i += 1
            return Flag.CO
        if t.kind == "ident" and t.text in ROLE_NAMES:
            self.i += 1
            return Flag.of_role(ROLE_NAMES[t.text])
        raise self.error("expected a case flag (nom, rep, +, -, o)")

    def starts_atom(self) -> bool:
        t = self.tok
        return t.kind == "ident" or (t.kind == "kw" and t.text == "Type") or (t.kind == "sym" and t.text == "(")

    def app(self, scope, locals_) -> Term:
        if not self.starts_atom():
            raise self.error("expected a term")
        f = self.atom(scope, locals_)
        while True:
            if self.starts_atom():
                f = App(f, self.atom(scope, locals_), Flag.REL)
            elif self.at("@") and self.peek().kind == "ident" and self.peek().text in ROLE_NAMES:
                self.i += 1
                r = self.role()
                f = App(f, self.atom(scope, locals_), Flag.of_role(r))
            elif self.at("{"):
                self.i += 1
                if self.at("_") and self.peek().text == "}":
                    self.i += 1
                    arg: Term = BOX
                else:
                    arg = self.term(scope, locals_)
                self.expect("}")
                f = App(f, arg, Flag.IRR)
            elif self.at("[") and self.peek().text == "]":
                self.i += 2
                f = CApp(f)
            else:
                return f

    def atom(self, scope, locals_) -> Term:
        t = self.tok
        if t.kind == "kw" and t.text == "Type":
            self.i += 1
            return STAR
        if t.kind == "sym" and t.text == "(":
            self.i += 1
            inner = self.term(scope, locals_)
            self.expect(")")
            return inner
        name = self.ident()
        if name in scope:
            return Bound(scope.index(name))
        if name in locals_:
            return Var(name)
        if name in self.consts:
            return Const(name)
        return Var(name)

    # -- declarations ------------------------------------------------------

    def pattern(self, head: str) -> Pattern:
        at = self.tok
        if self.ident() != head:
            raise self.error(f"pattern must be headed by {head}", at)
        args: list[PatArg] = []
        while not self.at("="):
            if self.at("{"):
                self.expect("{")
                self.expect("_")
                self.expect("}")
                args.append(PatArg(Flag.IRR))
            elif self.at("["):
                self.expect("[")
                self.expect("]")
                args.append(PatArg(Flag.CO))
            else:
                x = self.ident()
                if self.at("@"):
                    self.i += 1
                    args.append(PatArg(Flag.of_role(self.role()), x))
                else:
                    args.append(PatArg(Flag.REL, x))
        return Pattern(head, tuple(args))

    def roles_list(self) -> tuple[Role, ...]:
        if not self.at("@"):
            return ()
        self.expect("@")
        self.expect("[")
        out: list[Role] = []
        while not self.at("]"):
            out.append(self.role())
            if not self.at("]"):
                self.expect(",")
        self.expect("]")
        return tuple(out)

    def decl(self) -> SigEntry:
        t = self.tok
        if t.kind != "kw" or t.text not in DECL_KEYWORDS:
            raise self.error("expected a declaration (const, typefam or newtype)")
        self.i += 1
        name = self.ident()
        self.expect(":")
        ty = self.term([])
        roles = self.roles_list()
        if t.text == "const":
            return ConstDecl(name, ty, roles)
        self.expect("where")
        p = self.pattern(name)
        self.expect("=")
        rhs = self.term([], frozenset(p.variables()))
        return AxiomDecl(name, ty, roles, p, rhs, Role.NOM if t.text == "typefam" else Role.REP)

    def decls(self) -> list[SigEntry]:
        out = []
        while self.tok.kind != "eof":
            out.append(self.decl())
        return out


def declared_names(text: str) -> list[str]:
    toks = tokenize(text)
    return [toks[i + 1].text for i, t in enumerate(toks[:-1])
            if t.kind == "kw" and t.text in DECL_KEYWORDS and toks[i + 1].kind == "ident"]


def parse_signature(text: str) -> Signature:
    return Signature(Parser(text, declared_names(text)).decls())


def parse_term(text: str, sig: Signature | Iterable[str] = ()) -> Term:
    p = Parser(text, sig)
    t = p.term([])
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return t


# ---------------------------------------------------------------------------
# Printing


def show(t: Term, reserved: Iterable[str] = ()) -> str:
    avoid = set(reserved) | free_vars(t) | constants(t) | KEYWORDS | {"o", "nom", "rep"}
    return _Printer(avoid).go(t, [], 0)


def show_prop(p: Prop, reserved: Iterable[str] = ()) -> str:
    avoid = set(reserved) | KEYWORDS | {"o", "nom", "rep"}
    for t in (p.lhs, p.rhs, p.type):
        avoid |= free_vars(t) | constants(t)
    return _Printer(avoid).prop(p, [])


class _Printer:
    def __init__(self, avoid: set[str]):
        self.avoid = avoid

    def name_for(self, hint: str, scope: list[str]) -> str:
        base = hint if hint and hint != "_" and re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", hint) else "x"
        return fresh_name(base, self.avoid | set(scope))

    def go(self, t: Term, scope: list[str], prec: int) -> str:
        match t:
            case Star():
                return "Type"
            case Var(x) | Const(x):
                return x
            case Bound(i):
                return scope[i] if i < len(scope) else f"#{i}"
            case Box():
                return "_"
            case App() | CApp():
                s = self.app(t, scope)
                return f"({s})" if prec >= 2 else s
        s = self.binder(t, scope)
        return f"({s})" if prec >= 1 else s

    def app(self, t: Term, scope: list[str]) -> str:
        match t:
            case App(fun, arg, flag):
                f = self.app(fun, scope) if isinstance(fun, (App, CApp)) else self.go(fun, scope, 2)
                if flag is Flag.IRR:
                    return f"{f} {{{'_' if isinstance(arg, Box) else self.go(arg, scope, 0)}}}"
                a = self.go(arg, scope, 2)
                return f"{f} {a}" if flag is Flag.REL else f"{f} @{flag.value} {a}"
            case CApp(fun):
                f = self.app(fun, scope) if isinstance(fun, (App, CApp)) else self.go(fun, scope, 2)
                return f"{f} []"
        return self.go(t, scope, 2)

    def binder(self, t: Term, scope: list[str]) -> str:
        match t:
            case Abs(rel, body, ann, hint):
                x = self.name_for(hint, scope)
                head = f"({x}:{self.go(ann, scope, 0)})" if ann is not None else x
                return f"\\{rel.value}{head} -> {self.go(body, [x, *scope], 0)}"
            case Pi(rel, dom, body, hint):
                x = self.name_for(hint, scope)
                return f"Pi {rel.value}({x}:{self.go(dom, scope, 0)}) -> {self.go(body, [x, *scope], 0)}"
            case CAbs(body, ann, hint):
                c = self.name_for(hint or "c", scope)
                head = f"({c} : {self.prop(ann, scope)})" if ann is not None else c
                return f"/\\{head} -> {self.go(body, scope, 0)}"
            case CPi(prop, body, hint):
                c = self.name_for(hint or "c", scope)
                return f"Forall ({c} : {self.prop(prop, scope)}) -> {self.go(body, scope, 0)}"
            case Case(scrut, head, flags, b1, b2):
                fl = ", ".join(f.value for f in flags)
                return (f"case {self.go(scrut, scope, 1)} of {head} [{fl}] -> {self.go(b1, scope, 0)} ; "
                        f"_ -> {self.go(b2, scope, 0)}")
        raise TypeError(f"cannot print {t!r}")

    def prop(self, p: Prop, scope: list[str]) -> str:
        return (f"{self.go(p.lhs, scope, 1)} ~[{p.role.value}] {self.go(p.rhs, scope, 1)} : "
                f"{self.go(p.type, scope, 0)}")


def show_pattern(p: Pattern) -> str:
    parts = [p.head]
    for a in p.args:
        if a.flag is Flag.IRR:
            parts.append("{_}")
        elif a.flag is Flag.CO:
            parts.append("[]")
        elif a.flag is Flag.REL:
            parts.append(a.name)
        else:
            parts.append(f"{a.name}@{a.flag.value}")
    return " ".join(parts)


def show_decl(e: SigEntry, reserved: Iterable[str] = ()) -> str:
    reserved = set(reserved)
    roles = ", ".join(r.value for r in e.roles)
    head = f"{e.name} : {show(e.type, reserved)} @ [{roles}]"
    if isinstance(e, ConstDecl):
        return f"const {head}"
    kw = "typefam" if e.axiom_role is Role.NOM else "newtype"
    rhs = show(e.rhs, reserved | set(e.pattern.variables()))
    return f"{kw} {head} where {show_pattern(e.pattern)} = {rhs}"


def show_signature(sig: Signature) -> str:
    return "\n".join(show_decl(sig[n], sig) for n in sig) + "\n"
