import itertools

import pytest

from droles.errors import CapExceeded
from droles.oracle import (
    count_redexes, enumerate_par_reducts, gen_terms, gen_typed_terms, join_search, joinable, one_step_reducts,
    small_terms, spine_flags,
)
from droles.reduce import Stepped, step
from droles.rolecheck import role_checks
from droles.roles import Flag, Rel, Role
from droles.syntax import STAR, Abs, App, Bound, Const, is_locally_closed

NOM, REP = Role.NOM, Role.REP


def test_gen_terms_small_sizes(prelude, term):
    first = [t for _, t in itertools.islice(gen_terms(prelude, 1, NOM), 10)]
    assert STAR in first
    upto4 = {t for _, t in itertools.islice(gen_terms(prelude, 4, NOM, omega={}), 2000)}
    assert term("F @nom Int") in upto4 and term("T @nom Int") in upto4


@pytest.mark.parametrize("role", list(Role))
def test_gen_terms_contract(mixed, role):
    for omega, t in itertools.islice(gen_terms(mixed, 12, role, seed=3, small_first=False), 500):
        assert role_checks(mixed, omega, t, role) and is_locally_closed(t)


def test_gen_terms_is_reproducible(mixed):
    a = list(itertools.islice(gen_terms(mixed, 10, NOM, seed=5), 200))
    b = list(itertools.islice(gen_terms(mixed, 10, NOM, seed=5), 200))
    assert a == b


def test_generators_cover_interesting_forms(mixed):
    kinds = set()
    for _, t in itertools.islice(gen_terms(mixed, 12, REP, seed=1, small_first=False), 2000):
        kinds.add(type(t).__name__)
        out = step(mixed, REP, t)
        if isinstance(out, Stepped):
            kinds.add(out.rule)
    assert {"Case", "Abs", "App", "ABeta-Axiom", "Beta-PatternTrue", "Beta-PatternFalse", "ABeta-AppAbs",
            "ABeta-IAppAbs", "ABeta-CAppCAbs"} <= kinds


def test_par_reduct_examples(prelude, term):
    assert enumerate_par_reducts(prelude, {}, NOM, STAR) == {STAR}
    redex = App(Abs(Rel.REL, Bound(0)), STAR)
    assert enumerate_par_reducts(prelude, {}, NOM, redex) == {redex, STAR}
    assert enumerate_par_reducts(prelude, {}, REP, term("HTML")) == {term("HTML"), term("String")}


def test_par_reducts_independent_choices(prelude, term):
    a = term("Maybe @rep HTML -> HTML")
    assert len(enumerate_par_reducts(prelude, {}, REP, a)) == 4
    assert count_redexes(prelude, REP, a) == 2
    assert count_redexes(prelude, NOM, a) == 0


def test_cap(prelude, term):
    wide = term(" -> ".join(["HTML"] * 13))
    with pytest.raises(CapExceeded):
        enumerate_par_reducts(prelude, {}, REP, wide)
    assert len(enumerate_par_reducts(prelude, {}, REP, wide, cap=10_000)) == 2 ** 13


def test_joinable_examples(prelude, term):
    assert joinable(prelude, NOM, term("F @nom Int"), term("Maybe @rep Int"), 2)
    assert not joinable(prelude, NOM, term("T @nom Int"), term("F @nom Int"), 4)
    a = term("Set @nom HTML")
    assert joinable(prelude, REP, a, a, 0)
    res = join_search(prelude, NOM, term("T @nom Int"), term("F @nom Int"), 4)
    assert not res.joined and res.exhausted


def test_one_step_reducts_match_step(prelude, term):
    for text in ["T @nom Int", "(\\+x -> x) HTML", "case F @nom Int of Maybe [rep] -> (\\+a -> /\\c -> a) ; _ -> Int",
                 "Maybe @rep Int", "\\-x -> HTML"]:
        for r in Role:
            a = term(text)
            found = one_step_reducts(prelude, r, a)
            out = step(prelude, r, a)
            assert len(found) <= 1
            assert [t for t, _ in found] == ([out.term] if isinstance(out, Stepped) else [])


def test_spine_flags(mixed):
    assert spine_flags(mixed, "Either") == [Flag.REP, Flag.REP]
    assert spine_flags(mixed, "Ghost") == [Flag.IRR]
    assert spine_flags(mixed, "Proof") == [Flag.CO]
    assert spine_flags(mixed, "Wrap") == [Flag.REP, Flag.NOM]


def test_small_terms_sizes(prelude):
    assert list(small_terms(prelude, 0)) == []
    assert Const("Int") in set(small_terms(prelude, 1))


def test_typed_generator(mixed):
    pairs = list(itertools.islice(gen_typed_terms(mixed, 10, seed=2), 100))
    assert len(pairs) == 100
    assert any(count_redexes(mixed, REP, t) >= 2 for t, _ in pairs)
