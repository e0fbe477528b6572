"""Acceptance criteria.

Each test prints exactly one ``[PASS]`` or ``[FAIL]`` line naming its
criterion, then asserts.  Thresholds are fixed; generator seeds are pinned.
"""

import itertools
import logging
import random

import pytest

from droles.cli import corpus_text, main
from droles.concrete import parse_signature, parse_term, show_signature
from droles.equality import EqEnv, def_eq
from droles.errors import CapExceeded, DRError, RoleError
from droles.oracle import (
    count_redexes, enumerate_par_reducts, gen_terms, gen_typed_terms, one_step_reducts,
)
from droles.reduce import DEFAULT_FUEL, Stepped, ValueAt, is_value, par_step, reduce, step
from droles.rolecheck import role_checks
from droles.roles import Flag, Role
from droles.syntax import EMPTY_CTX, STAR, App, CApp, Const, CoVar, Ctx, Prop, erase, free_vars, subst_vars
from droles.typecheck import Checker, check_sig

from conftest import CORPUS

log = logging.getLogger("acceptance")
NOM, REP = Role.NOM, Role.REP
LEMMA_TERMS = 1000
SIZE = 16


@pytest.fixture
def report(capsys):
    def emit(name: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}{': ' + detail if detail else ''}")
        assert ok, detail
    return emit


def cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out.strip()


# ---------------------------------------------------------------------------


def test_corpus_exactness(capsys, report, prelude):
    checks = {
        "eval rep HTML": cli(capsys, "eval", "--role", "rep", "-e", "HTML") == (0, "String"),
        "eval nom F Int": cli(capsys, "eval", "--role", "nom", "-e", "F @nom Int") == (0, "Maybe @rep Int"),
        "T Int nom value": (cli(capsys, "eval", "--role", "nom", "-e", "T @nom Int") == (0, "T @nom Int")
                            and is_value(prelude, NOM, erase(parse_term("T @nom Int", prelude)))),
        "eval rep T Int in 2 steps": cli(capsys, "eval", "--role", "rep", "--trace", "-e", "T @nom Int") == (
            0, "ABeta-Axiom\tF @nom Int\nABeta-Axiom\tMaybe @rep Int\nMaybe @rep Int"),
    }
    for role, a, b, want in [("nom", "F @nom Int", "Maybe @rep Int", "equal"),
                             ("nom", "T @nom Int", "F @nom Int", "not-equal"),
                             ("rep", "T @nom Int", "Maybe @rep Int", "equal"),
                             ("rep", "Maybe @rep HTML", "Maybe @rep String", "equal"),
                             ("rep", "Set @nom HTML", "Set @nom String", "not-equal")]:
        checks[f"equal {role} {a} / {b}"] = cli(capsys, "equal", "--role", role, a, b)[1] == want
    bad = [k for k, v in checks.items() if not v]
    report("Corpus exactness", not bad, f"{len(checks) - len(bad)}/{len(checks)} exact" + (f"; wrong: {bad}" if bad else ""))


def test_phantom_encoding(capsys, report):
    from importlib import resources
    path = str(resources.files("droles").joinpath("corpus", "phantom.dr"))
    checks = {
        "signature checks": cli(capsys, "check", path)[0] == 0,
        "rep equal": cli(capsys, "equal", "-f", path, "--role", "rep", "F @rep Int", "F @rep Bool")[1] == "equal",
        "nom not-equal": cli(capsys, "equal", "-f", path, "--role", "nom", "F @rep Int", "F @rep Bool")[1] == "not-equal",
    }
    bad = [k for k, v in checks.items() if not v]
    report("Phantom encoding", not bad, f"{len(checks) - len(bad)}/{len(checks)} exact")


def test_negative_role_safety(report):
    try:
        check_sig(parse_signature(corpus_text("discern_bad.dr")))
        rejected, where = False, None
    except RoleError as exc:
        rejected, where = True, exc.where
    try:
        check_sig(parse_signature(corpus_text("discern_ok.dr")))
        accepted = True
    except DRError:
        accepted = False
    ok = rejected and where == "x" and accepted
    report("Negative role safety", ok, f"rep parameter rejected at {where!r}; nom parameter accepted={accepted}")


# ---------------------------------------------------------------------------
# Lemma suites


def _terms(sig, role, seed, n=LEMMA_TERMS):
    return list(itertools.islice(gen_terms(sig, SIZE, role, seed=seed, small_first=False), n))


def _lemma_subrole_value(sig):
    n = bad = 0
    for seed, role in ((101, REP), (102, NOM)):
        for _, a in _terms(sig, role, seed):
            n += 1
            if is_value(sig, REP, a) and not is_value(sig, NOM, a):
                bad += 1
    return n, bad


def _lemma_subrole_step(sig):
    n = bad = 0
    for _, a in _terms(sig, NOM, 103, 2 * LEMMA_TERMS):
        n += 1
        if isinstance(step(sig, NOM, a), Stepped) and not isinstance(step(sig, REP, a), Stepped):
            bad += 1
    return n, bad


def _lemma_deterministic(sig):
    n = bad = 0
    for seed, role in ((104, NOM), (105, REP)):
        for _, a in _terms(sig, role, seed):
            n += 1
            found = one_step_reducts(sig, role, a)
            out = step(sig, role, a)
            expect = [out.term] if isinstance(out, Stepped) else []
            if len(found) > 1 or [t for t, _ in found] != expect:
                bad += 1
    return n, bad


def _lemma_subrole_ing(sig):
    n = bad = 0
    for omega, a in _terms(sig, NOM, 106, 2 * LEMMA_TERMS):
        n += 1
        bad += not role_checks(sig, omega, a, REP)
    return n, bad


def _lemma_narrowing(sig):
    n = bad = 0
    for seed, role in ((107, NOM), (108, REP)):
        for omega, a in _terms(sig, role, seed):
            n += 1
            for x, r in omega.items():
                if r is REP and not role_checks(sig, {**omega, x: NOM}, a, role):
                    bad += 1
                    break
    return n, bad


def _lemma_par_roleing(sig):
    n = bad = 0
    for seed, role in ((109, NOM), (110, REP)):
        for omega, a in _terms(sig, role, seed):
            n += 1
            try:
                reducts = enumerate_par_reducts(sig, omega, role, a)
            except CapExceeded:
                reducts = frozenset()
            targets = {par_step(sig, omega, role, a)} | reducts
            bad += any(not role_checks(sig, omega, b, role) for b in targets)
    return n, bad


def _lemma_par_subst(sig):
    rng = random.Random(111)
    n = bad = skipped = 0
    stream = {r: gen_terms(sig, 8, r, seed=112 + i, small_first=False) for i, r in enumerate(Role)}
    while n < LEMMA_TERMS:
        r1, r = rng.choice(list(Role)), rng.choice(list(Role))
        omega_a = {"y": rng.choice(list(Role))}
        _, a = next(a for a in stream[r1] if "x" not in free_vars(a[1]))
        if not role_checks(sig, omega_a, a, r1):
            continue
        omega_b = {**omega_a, "x": r1}
        b = next(t for om, t in gen_terms(sig, 8, r, seed=rng.randrange(1 << 30), omega=omega_b, small_first=False)
                 if "x" in free_vars(t))
        try:
            a_reducts = sorted(enumerate_par_reducts(sig, omega_a, r1, a), key=repr)
            b_reducts = sorted(enumerate_par_reducts(sig, omega_b, r, b), key=repr)
            a2 = rng.choice(a_reducts)
            b2s = {par_step(sig, omega_b, r, b), rng.choice(b_reducts)}
            whole = enumerate_par_reducts(sig, omega_a, r, subst_vars(b, {"x": a}))
        except CapExceeded:
            skipped += 1
            continue
        n += 1
        bad += any(subst_vars(b2, {"x": a2}) not in whole for b2 in b2s)
    return n, bad


LEMMAS = {
    "SubRole-Value": _lemma_subrole_value,
    "SubRole-Step": _lemma_subrole_step,
    "Deterministic": _lemma_deterministic,
    "SubRole-ing": _lemma_subrole_ing,
    "Role-assignment narrowing": _lemma_narrowing,
    "Parallel reduction role preservation": _lemma_par_roleing,
    "Parallel reduction substitution": _lemma_par_subst,
}


def test_lemma_suites(report, mixed):
    results = {name: fn(mixed) for name, fn in LEMMAS.items()}
    summary = "; ".join(f"{k} {n} terms/{bad} cex" for k, (n, bad) in results.items())
    ok = all(n >= LEMMA_TERMS and bad == 0 for n, bad in results.values())
    report("Lemma suites", ok, summary)


# ---------------------------------------------------------------------------


def test_confluence(report, mixed):
    checked = bad = skipped = 0
    for role, seed in ((NOM, 201), (REP, 202)):
        stream = gen_terms(mixed, SIZE, role, seed=seed, small_first=False)
        done = 0
        while done < 300:
            omega, a = next(stream)
            if count_redexes(mixed, role, a) < 2:
                continue
            try:
                reducts = enumerate_par_reducts(mixed, omega, role, a)
                target = par_step(mixed, omega, role, a)
                ok = target in reducts and all(target in enumerate_par_reducts(mixed, omega, role, u) for u in reducts)
            except CapExceeded:
                skipped += 1
                continue
            done += 1
            bad += not ok
        checked += done
    report("Confluence (triangle)", checked >= 500 and bad == 0,
           f"{checked} terms with >=2 redexes, {bad} counterexamples, {skipped} over the reduct cap")


# ---------------------------------------------------------------------------


CORPUS_EVALS = {
    "prelude.dr": ["HTML", "F @nom Int", "T @nom Int", "Maybe @rep HTML", "Set @nom HTML", "T @nom HTML",
                   "(\\+(x:Type) -> \\+(y:x) -> y) HTML"],
    "phantom.dr": ["F @rep Int", "F @rep Bool"],
    "case.dr": ["IsMaybe @nom (Maybe @rep Int)", "IsMaybe @nom Int", "IsMaybe @nom (Maybe Int)"],
    "mixed.dr": ["Elem @nom (Maybe @rep Int)", "Elem @nom (F @nom Bool)", "Elem @nom HTML", "Wrap @rep HTML @nom Int",
                 "Lock []", "Phantom @rep HTML", "T @nom (Elem @nom (T @nom Int))"],
}


def _trajectory(sig, checker, t, ty, role, stats):
    """Walk one evaluation; return a failure description or None."""
    a = t
    for _ in range(DEFAULT_FUEL):
        out = step(sig, role, a, surface=True)
        if isinstance(out, ValueAt):
            stats["values"] += 1
            return None
        if not isinstance(out, Stepped):
            return f"progress: stuck at {a!r}"
        b = out.term
        try:
            checker.check(EMPTY_CTX, b, ty)
        except DRError as exc:
            return f"preservation: {exc}"
        if not def_eq(EqEnv(sig), role, erase(a), erase(b)):
            return "preservation: step endpoints not def_eq"
        stats["steps"] += 1
        a = b
    stats["exhausted"] += 1
    log.info("fuel exhausted on %r at %s", t, role)
    return None


def test_preservation_and_progress(report):
    stats = {"values": 0, "steps": 0, "exhausted": 0}
    failures: list[str] = []
    generated = 0
    mixed = parse_signature(corpus_text("mixed.dr"))
    checker = Checker(mixed)
    for t, ty in itertools.islice(gen_typed_terms(mixed, SIZE, seed=301), 600):
        generated += 1
        for role in Role:
            err = _trajectory(mixed, checker, t, ty, role, stats)
            if err:
                failures.append(err)
    gen_exhausted = stats["exhausted"]
    corpus_runs = 0
    for name, exprs in CORPUS_EVALS.items():
        sig = parse_signature(corpus_text(name))
        checker = Checker(sig)
        for text in exprs:
            t = parse_term(text, sig)
            ty = checker.infer(EMPTY_CTX, t)
            for role in Role:
                corpus_runs += 1
                err = _trajectory(sig, checker, t, ty, role, stats)
                if err:
                    failures.append(f"{name}: {text}: {err}")
    terminating = 1 - gen_exhausted / (2 * generated)
    ok = generated >= 500 and not failures and terminating >= 0.95
    report("Preservation + progress", ok,
           f"{generated} generated terms and {corpus_runs} corpus runs, {stats['steps']} steps checked, "
           f"{terminating:.1%} terminating, {len(failures)} failures" + (f"; first: {failures[0]}" if failures else ""))


def test_case_semantics(report, case_sig):
    checker = Checker(case_sig)
    def branch(scrut):
        return f"(\\+(a:Type) -> /\\(c : {scrut} ~[nom] Maybe @rep a : Type) -> True)"
    true_term = parse_term(f"case Maybe @rep Int of Maybe [rep] -> {branch('Maybe @rep Int')} ; _ -> False", case_sig)
    false_term = parse_term(f"case Int of Maybe [rep] -> {branch('Int')} ; _ -> False", case_sig)
    checks = {}
    for role in Role:
        ty = checker.infer(EMPTY_CTX, true_term)
        out = step(case_sig, role, true_term, surface=True)
        want = CApp(App(parse_term(branch("Maybe @rep Int"), case_sig), Const("Int"), Flag.REL))
        checks[f"PatternTrue {role}"] = out.rule == "Beta-PatternTrue" and out.term == want
        checks[f"PatternTrue preserves {role}"] = _preserves(checker, out.term, ty)
        res = reduce(case_sig, role, true_term, surface=True, trace=True)
        checks[f"PatternTrue result {role}"] = res.term == Const("True") and res.trace[0][1] == "Beta-PatternTrue"
        out = step(case_sig, role, false_term, surface=True)
        checks[f"PatternFalse {role}"] = out.rule == "Beta-PatternFalse" and out.term == Const("False")
        checks[f"PatternFalse preserves {role}"] = _preserves(checker, out.term, checker.infer(EMPTY_CTX, false_term))
    bad = [k for k, v in checks.items() if not v]
    report("Case semantics", not bad, f"{len(checks) - len(bad)}/{len(checks)} exact")


def _preserves(checker, term, ty) -> bool:
    try:
        checker.check(EMPTY_CTX, term, ty)
    except DRError:
        return False
    return True


def test_coercion_assumptions(report, prelude):
    ctx = Ctx().extend(CoVar("c", Prop(Const("Int"), Const("Bool"), NOM, STAR)))
    with_c = def_eq(EqEnv(prelude, ctx, {"c"}), NOM, Const("Int"), Const("Bool"))
    without = def_eq(EqEnv(prelude, ctx, set()), NOM, Const("Int"), Const("Bool"))
    report("Coercion assumptions", with_c is True and without is False,
           f"with c available: {with_c}; with none available: {without}")


def test_round_trip(report):
    bad = []
    for name in CORPUS:
        sig = parse_signature(corpus_text(name))
        if list(parse_signature(show_signature(sig)).values()) != list(sig.values()):
            bad.append(name)
    for name, exprs in CORPUS_EVALS.items():
        sig = parse_signature(corpus_text(name))
        from droles.concrete import show
        for text in exprs:
            t = parse_term(text, sig)
            if parse_term(show(t, sig), sig) != t:
                bad.append(text)
    report("Round-trip", not bad, f"{len(CORPUS)} corpus files and {sum(map(len, CORPUS_EVALS.values()))} "
                                  f"expressions" + (f"; failed: {bad}" if bad else ""))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
