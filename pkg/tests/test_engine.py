import random
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from caseforge.engine import (
    FAILED,
    LOOP,
    NAF_HOLDS,
    NO_CLAUSE,
    PROVED,
    DepthLimitExceeded,
    FlounderError,
    NotStratifiedError,
    blamed_leaves,
    check_constraints,
    compile_program,
    prove_negation,
    solve,
    stratify,
    verify_proof,
)
from caseforge.logic import Atom, Literal, Var, is_ground
from caseforge.oracle import random_stratified_program
from caseforge.syntax import parse_literal, parse_program
from caseforge.translator import translate_case

COMPLETENESS = parse_program(
    """
    assessment(design_assessment).
    process_complete(design_assessment).
    assessment(security_assessment).
    incomplete(X) :- assessment(X), not process_complete(X).
    """
)


def test_single_fact():
    (ans,) = solve(parse_program("p."), "p")
    assert ans.bindings == {}
    assert ans.justification.verdict == PROVED
    assert ans.model == {parse_literal("p")}


def test_incomplete_assessment():
    answers = solve(COMPLETENESS, "incomplete(X)")
    assert [a.bindings[Var("X")] for a in answers] == [Atom("security_assessment")]
    tree = answers[0].justification
    assert tree.literal == parse_literal("incomplete(security_assessment)")
    assert [c.verdict for c in tree.children] == [PROVED, NAF_HOLDS]


def test_answer_invariants():
    for ans in solve(COMPLETENESS, "assessment(X)"):
        assert all(is_ground(l) for l in ans.model)
        assert ans.justification.literal == Literal("assessment", (ans.bindings[Var("X")],))


# ---------------------------------------------------------------- stratify


def test_stratify_two_levels():
    s = stratify(parse_program("p :- not q. q."))
    assert s.stratified
    assert s.strata == {"p/0": 1, "q/0": 0}


def test_stratify_odd_loop():
    s = stratify(parse_program("p :- not p."))
    assert not s.stratified and s.cycle == ["p/0"]
    with pytest.raises(NotStratifiedError):
        solve(parse_program("p :- not p."), "p")


def test_stratify_longer_cycle():
    s = stratify(parse_program("p :- q. q :- not r. r :- p."))
    assert not s.stratified and sorted(s.cycle) == ["p/0", "q/0", "r/0"]


def test_safedriver_bundle_stratified(load):
    assert stratify(translate_case(load("safedriver")).program).stratified


# ---------------------------------------------------------------- prove_negation


def test_negation_of_fact_fails():
    assert prove_negation(parse_program("p."), "not p") is None


def test_negation_blames_missing_property():
    p = parse_program(
        """
        meets_intent(arducopter_software). is_correct(arducopter_software).
        adequate(X) :- meets_intent(X), is_correct(X), is_innocuous(X).
        """
    )
    ans = prove_negation(p, "not adequate(arducopter_software)")
    assert blamed_leaves(ans.justification) == [parse_literal("is_innocuous(arducopter_software)")]
    leaf = [t for t in ans.justification.walk() if not t.children][0]
    assert (leaf.verdict, leaf.reason) == (FAILED, NO_CLAUSE)


def test_negation_blames_defeater(load):
    bundle = translate_case(load("safedriver_defeated"))
    ans = prove_negation(bundle.program, bundle.negative_query)
    assert parse_literal("unresolved_defeater('D1', 'C13')") in blamed_leaves(ans.justification)


def test_positive_loops_fail_the_branch():
    p = parse_program("a :- b. b :- a. c :- c. c :- d. d.")
    assert solve(p, "a") == []
    assert solve(p, "c")
    ans = prove_negation(p, "a")
    assert any(t.reason == LOOP for t in ans.justification.walk())


def test_recursion_over_lists_of_answers():
    p = parse_program("e(a,b). e(b,c). e(c,a). r(X,Y) :- e(X,Y). r(X,Y) :- e(X,Z), r(Z,Y).")
    got = {a.bindings[Var("Y")].name for a in solve(p, "r(a,Y)")}
    assert got == {"a", "b", "c"}


def test_flounder():
    with pytest.raises(FlounderError):
        solve(parse_program("q(a)."), "not q(X)")
    # a local variable inside not reads as "no instance"
    assert solve(parse_program("q(a). r."), "r, not s(_)")


def test_depth_limit_from_env(monkeypatch):
    chain = parse_program("".join(f"p{i} :- p{i + 1}. " for i in range(30)) + "p30.")
    assert solve(chain, "p0")
    monkeypatch.setenv("CASEFORGE_DEPTH_LIMIT", "10")
    with pytest.raises(DepthLimitExceeded):
        solve(chain, "p0")
    with pytest.raises(DepthLimitExceeded):
        prove_negation(chain, "not p0")


def test_max_answers():
    p = parse_program("n(a). n(b). n(c).")
    assert len(solve(p, "n(X)", max_answers=2)) == 2


# ---------------------------------------------------------------- check_constraints


def test_consistency_violation():
    p = parse_program("safe(train). hazardous(train).")
    (v,) = check_constraints(p, parse_program(":- safe(X), hazardous(X)."))
    assert v.witness == {Var("X"): Atom("train")}


def test_no_constraints():
    assert check_constraints(parse_program("safe(train).")) == []


def test_security_violation():
    p = parse_program("no_vulnerabilities(sw). residual_security_risks(sw).")
    c = parse_program(":- no_vulnerabilities(X), residual_security_risks(X).")
    (v,) = check_constraints(p, c)
    # the witness grounds the constraint body into a provable conjunction
    body = [Literal(lit.predicate, tuple(v.witness.get(a, a) for a in lit.args)) for lit in c.rules[0].body]
    assert all(solve(p, lit) for lit in body)


def test_classical_negation_twins():
    p = parse_program("-safe(train). safe(train). -safe(car).")
    (v,) = check_constraints(p)
    assert v.witness[Var("X1")] == Atom("train")


def test_constraints_inside_program():
    p = parse_program("safe(train). hazardous(train). :- safe(X), hazardous(X).")
    assert len(check_constraints(p)) == 1


# ---------------------------------------------------------------- properties

seeds = st.integers(0, 2**32 - 1)


def _atoms(p):
    out = {}
    for r in p.rules:
        for el in (r.head,) + r.body:
            lit = getattr(el, "literal", el)
            out[lit] = None
    return list(out)


@given(seeds)
def test_solve_and_negation_are_exclusive(seed):
    p = random_stratified_program(random.Random(seed))
    for lit in _atoms(p):
        proved = bool(solve(p, lit))
        negated = prove_negation(p, lit) is not None
        assert proved != negated


@given(seeds)
def test_proofs_replay(seed):
    p = random_stratified_program(random.Random(seed))
    for lit in _atoms(p):
        for ans in solve(p, lit):
            assert verify_proof(p, ans.justification)


def test_proof_replay_on_bundle(load):
    bundle = translate_case(load("arducopter"))
    (ans,) = solve(bundle.program, bundle.positive_query)
    assert verify_proof(bundle.program, ans.justification)
    tampered = replace(ans.justification, rule_used=0 if ans.justification.rule_used else 1)
    assert not verify_proof(bundle.program, tampered)
    pruned = replace(ans.justification, children=ans.justification.children[:-1])
    assert not verify_proof(bundle.program, pruned)


@given(seeds)
def test_determinism(seed):
    p = random_stratified_program(random.Random(seed))
    q = _atoms(p)[0]
    first = [(a.bindings, a.justification) for a in solve(p, q)]
    compile_program.cache_clear()
    again = [(a.bindings, a.justification) for a in solve(p, q)]
    assert first == again


def test_answer_order_follows_rule_order():
    p = parse_program("n(c). n(a). n(b). m(X) :- n(X).")
    assert [a.bindings[Var("X")].name for a in solve(p, "m(X)")] == ["c", "a", "b"]
