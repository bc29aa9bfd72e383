import itertools

import pytest
from hypothesis import given, strategies as st

from caseforge.logic import (
    Atom,
    Compound,
    ListTerm,
    Literal,
    Naf,
    Rule,
    SafetyError,
    Var,
    apply_subst,
    check_safety,
    compose,
    format_atom,
    is_variant,
    term_vars,
    unify,
)
from caseforge.syntax import parse_literal
from strategies import SMALL_UNIVERSE, small_terms, terms

X, Y, A, P, E = Var("X"), Var("Y"), Var("A"), Var("P"), Var("E")


def L(*names):
    return ListTerm(tuple(Atom(n) for n in names))


def test_unify_binds_variable():
    assert unify(X, Atom("arducopter_software"), {}) == {X: Atom("arducopter_software")}


def test_occurs_check():
    assert unify(X, Compound("f", (X,)), {}) is None
    assert unify(ListTerm((X,)), ListTerm((ListTerm((X,)),))) is None


def test_claim_mgu():
    none = Compound("application", (Atom("none"),))
    a = Compound("claim", (A, L("o1"), P, E))
    b = Compound("claim", (none, L("o1"), L("p1"), L("e1")))
    assert unify(a, b, {}) == {A: none, P: L("p1"), E: L("e1")}


def test_unify_extends_given_substitution():
    s = unify(Compound("f", (X, Y)), Compound("f", (Atom("a"), X)), {})
    assert s == {X: Atom("a"), Y: Atom("a")}
    assert unify(X, Atom("b"), s) is None


def test_unify_clashes():
    assert unify(Atom("a"), Atom("b")) is None
    assert unify(Compound("f", (X,)), Compound("g", (X,))) is None
    assert unify(L("a"), L("a", "b")) is None


def test_apply_subst_examples():
    t = Compound("f", (X, Y))
    assert apply_subst({}, t) == t
    assert apply_subst({X: Atom("a")}, t) == Compound("f", (Atom("a"), Y))


def test_variant():
    assert is_variant(Compound("f", (X, Y)), Compound("f", (Y, X)))
    assert not is_variant(Compound("f", (X, X)), Compound("f", (X, Y)))
    assert not is_variant(Compound("f", (X,)), Compound("f", (Atom("a"),)))


def test_format_atom_quotes_when_needed():
    assert format_atom("tim") == "tim"
    assert format_atom("C29") == "'C29'"
    assert format_atom("it's") == "'it''s'"
    assert format_atom("not") == "'not'"


def test_literal_rejects_bad_predicate():
    with pytest.raises(ValueError):
        Literal("Bad")
    with pytest.raises(ValueError):
        Literal("not", (Atom("a"),))


def test_negated_literal_key_is_renamed():
    assert parse_literal("-safe(x)").key == ("neg$safe", 1)


def test_safety():
    check_safety(Rule(Literal("p", (X,)), (Literal("q", (X,)), Naf(Literal("r", (X,))))))
    with pytest.raises(SafetyError) as info:
        check_safety(Rule(Literal("p", (X,)), (Naf(Literal("q", (X,))),)))
    assert info.value.variable == X
    # anonymous variables inside not are read as "no instance"
    check_safety(Rule(Literal("p"), (Literal("q", (X,)), Naf(Literal("r", (X, Var("_")))))))


# ---------------------------------------------------------------- properties


@given(terms(), terms())
def test_unify_symmetric(a, b):
    assert (unify(a, b, {}) is None) == (unify(b, a, {}) is None)


@given(terms(), terms())
def test_mgu_unifies_and_is_idempotent(a, b):
    s = unify(a, b, {})
    if s is None:
        return
    assert apply_subst(s, a) == apply_subst(s, b)
    for t in s.values():
        assert apply_subst(s, t) == t
    for v in s:
        assert not any(v == w for t in s.values() for w in term_vars(t))


@given(terms(), terms(), terms())
def test_apply_is_fixed_under_reapplication(a, b, t):
    s = unify(a, b, {})
    if s is None:
        return
    once = apply_subst(s, t)
    assert apply_subst(s, once) == once


substitutions = st.dictionaries(st.sampled_from([Var(n) for n in "XYZW"]), terms(4), max_size=3)


@given(substitutions, substitutions, terms())
def test_composition_law(s1, s2, t):
    assert apply_subst(s2, apply_subst(s1, t)) == apply_subst(compose(s1, s2), t)


def _brute_unifiers(a, b):
    vs = sorted({*term_vars(a), *term_vars(b)}, key=lambda v: v.name)
    for combo in itertools.product(SMALL_UNIVERSE, repeat=len(vs)):
        u = dict(zip(vs, combo))
        if apply_subst(u, a) == apply_subst(u, b):
            yield vs, u


@given(small_terms, small_terms)
def test_mgu_is_most_general_against_brute_force(a, b):
    mgu = unify(a, b, {})
    found = False
    for vs, u in _brute_unifiers(a, b):
        found = True
        assert mgu is not None
        # u = compose(mgu, u): u is an instance of the mgu
        c = compose(mgu, u)
        assert all(apply_subst(c, v) == apply_subst(u, v) for v in vs)
    if mgu is not None:
        # ground the mgu's free variables: if that lands inside the universe,
        # brute force must have found it
        vs = sorted({*term_vars(a), *term_vars(b)}, key=lambda v: v.name)
        rest = {v: Atom("a") for t in [a, b] for v in term_vars(apply_subst(mgu, t))}
        g = compose(mgu, rest)
        if all(apply_subst(g, v) in SMALL_UNIVERSE for v in vs):
            assert found
