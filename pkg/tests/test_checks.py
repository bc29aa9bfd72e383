from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from caseforge.checks import (
    CHECK_NAMES,
    FAIL,
    PASS,
    CheckError,
    CompletenessRule,
    SemanticRuleSet,
    check_adequacy,
    check_completeness,
    check_consistency,
    check_indefeasibility,
    check_theory_application,
    check_theory_harmony,
    completeness_program,
    instance_program,
    parse_rules,
    run_checks,
)
from caseforge.engine import check_constraints, prove_negation
from caseforge.logic import Atom, Naf, Var, unify_literals
from caseforge.syntax import ParseError, parse_literal, parse_program
from caseforge.translator import instantiated_theories, translate_case
from strategies import CASE_PROPERTIES, assurance_cases

X = Var("X")


def drop_property(case, nid, prop):
    node = case.nodes[nid]
    props = tuple(p for p in node.ope.properties if p != prop)
    return case.with_node(replace(node, ope=replace(node.ope, properties=props)))


# ---------------------------------------------------------------- rule files


def test_parse_rules_sections(rules):
    r = rules("arducopter")
    assert len(r.consistency.rules) == 2 and len(r.harmony.rules) == 1
    assert [a.name for a in r.adequacy] == ["overarching_properties", "do178c_requirements_test_conformance_achieved"]
    assert r.completeness == (CompletenessRule("assessments_complete", "assessment", "process_complete"),)
    assert all(c.is_constraint for c in r.consistency.rules + r.harmony.rules)


def test_parse_rules_errors():
    with pytest.raises(ParseError):
        parse_rules("p.")
    with pytest.raises(ParseError):
        parse_rules("%% nonsense\n")
    with pytest.raises(CheckError, match="headless"):
        parse_rules("%% consistency\nsafe(X) :- hazardous(X).")
    with pytest.raises(ParseError):
        parse_rules("%% completeness\nbroken: assessment process_complete")
    with pytest.raises(ParseError) as info:
        parse_rules("%% consistency\n\n:- safe(X) hazardous(X).")
    assert info.value.line == 3


def test_adequacy_bodies_are_positive():
    with pytest.raises(ParseError):
        parse_rules("%% adequacy\nbad: meets_intent(X), not is_correct(X)")
    (rule,) = parse_rules("%% adequacy\nfine: meets_intent(X), is_correct(Y)").adequacy
    assert len(rule.body) == 2


# ---------------------------------------------------------------- indefeasibility


def test_indefeasibility_safedriver(load):
    v = check_indefeasibility(load("safedriver"))
    assert v.status == PASS
    assert v.justification.literal.args[0] == Atom("C1")
    assert "Tim is a safe driver" in str(v.justification.literal)


def test_indefeasibility_arducopter_defeated(load):
    v = check_indefeasibility(load("arducopter_defeated"))
    assert v.status == FAIL
    assert parse_literal("unresolved_defeater('D102', 'C102')") in v.blamed
    assert any("D102" in r for r in v.reasons)


def test_indefeasibility_bare_root(load):
    assert check_indefeasibility(load("minimal")).status == PASS


# ---------------------------------------------------------------- theory application


def test_theory_application_pass(load):
    v = check_theory_application(load("arducopter"))
    assert v.status == PASS and v.reasons == ()


def test_theory_application_property_mismatch(load):
    case = load("arducopter")
    node = case.nodes["C102"]
    case = case.with_node(replace(node, ope=replace(node.ope, properties=("statically_checked",))))
    v = check_theory_application(case)
    assert v.status == FAIL
    assert any(r.startswith("property mismatch") and "statically_checked" in r and "statically_analyzed" in r for r in v.reasons)
    assert v.blamed


def test_theory_application_undeclared_instance(load):
    case = load("arducopter")
    voc = replace(case.vocabulary, instances=case.vocabulary.instances - {("arducopter_software", "software")})
    v = check_theory_application(replace(case, vocabulary=voc))
    assert v.status == FAIL
    assert any(r.startswith("undeclared instance") for r in v.reasons)
    assert parse_literal("instance_of(arducopter_software, software)") in v.blamed


def test_theory_application_binding_domain(load):
    case = load("arducopter")
    node = case.nodes["C102"]
    bad = replace(node.theory_ref, binding=node.theory_ref.binding[:1])
    with pytest.raises(CheckError, match="binding domain mismatch"):
        check_theory_application(case.with_node(replace(node, theory_ref=bad)))


# ---------------------------------------------------------------- consistency


def test_consistency_violation(load, rules):
    v = check_consistency(load("consistency"), rules("consistency"))
    assert v.status == FAIL
    assert v.witnesses == ({X: Atom("train")},)
    assert parse_literal("hazardous(train)") in v.blamed


def test_consistency_pass(load, rules):
    assert check_consistency(load("consistency").without_subtree("C3"), rules("consistency")).status == PASS
    assert check_consistency(load("arducopter"), rules("arducopter")).status == PASS


def test_consistency_security_rule(load, rules):
    case = load("consistency").without_subtree("C3")
    node = case.nodes["C4"]
    risky = replace(node, ope=replace(node.ope, properties=node.ope.properties + ("residual_security_risks",)))
    v = check_consistency(case.with_node(risky), rules("consistency"))
    assert v.status == FAIL
    assert v.witnesses == ({X: Atom("signalling_software")},)


def test_consistency_needs_rules(load):
    with pytest.raises(CheckError):
        check_consistency(load("consistency"), SemanticRuleSet())


# ---------------------------------------------------------------- adequacy


def test_adequacy_pass(load, rules):
    verdicts = check_adequacy(load("arducopter"), rules("arducopter"))
    assert [v.status for v in verdicts] == [PASS, PASS]
    assert verdicts[0].witnesses == ({X: Atom("arducopter_software")},)


def test_adequacy_missing_innocuity(load, rules):
    case = load("arducopter").without_subtree("C33")
    v = check_adequacy(case, rules("arducopter"))[0]
    assert v.status == FAIL
    assert v.blamed == (parse_literal("is_innocuous(arducopter_software)"),)
    leaves = [t for t in v.justification.walk() if not t.children]
    assert [(str(t.literal), t.reason) for t in leaves] == [("is_innocuous(arducopter_software)", "no matching clause")]


def test_adequacy_do178c_missing_coverage(load, rules):
    case = drop_property(load("arducopter"), "C34", "structural_coverage_achieved")
    v = check_adequacy(case, rules("arducopter"))[1]
    assert v.status == FAIL
    assert v.blamed == (parse_literal("structural_coverage_achieved(arducopter_software)"),)


# ---------------------------------------------------------------- completeness


def test_completeness_security_assessment(load, rules):
    (v,) = check_completeness(load("arducopter"), rules("arducopter"))
    assert v.status == FAIL
    assert v.witnesses == ({X: Atom("security_assessment")},)
    assert v.blamed == (parse_literal("process_complete(security_assessment)"),)
    assert v.reasons == ("security_assessment of type assessment lacks process_complete",)


def test_completeness_all_present(load, rules):
    case = load("arducopter")
    node = case.nodes["C41"]
    case = case.with_node(replace(node, ope=replace(node.ope, properties=("process_complete",))))
    (v,) = check_completeness(case, rules("arducopter"))
    assert v.status == PASS


def test_completeness_vacuous(load):
    case = load("arducopter")
    voc = replace(case.vocabulary, object_types=case.vocabulary.object_types | {"tool"})
    rs = SemanticRuleSet(completeness=(CompletenessRule("tools_qualified", "tool", "qualified"),))
    (v,) = check_completeness(replace(case, vocabulary=voc), rs)
    assert v.status == PASS


def test_completeness_undeclared_type(load):
    rs = SemanticRuleSet(completeness=(CompletenessRule("x", "gadget", "ok"),))
    with pytest.raises(CheckError, match="undeclared type gadget"):
        check_completeness(load("arducopter"), rs)


# ---------------------------------------------------------------- harmony


def test_harmony_conflict(load, rules):
    v = check_theory_harmony(load("harmony"), rules("harmony"))
    assert v.status == FAIL
    assert v.witnesses == ({X: Atom("arducopter_software")},)


def test_harmony_single_theory(load, rules):
    assert check_theory_harmony(load("harmony").without_subtree("C3"), rules("harmony")).status == PASS


def test_harmony_disjoint_objects(load, rules):
    assert check_theory_harmony(load("harmony_disjoint"), rules("harmony")).status == PASS


# ---------------------------------------------------------------- run_checks


def test_run_checks_order(load, rules):
    verdicts = run_checks(load("arducopter"), rules("arducopter"))
    assert [v.check for v in verdicts] == [
        "indefeasibility",
        "theory-application",
        "consistency",
        "adequacy:overarching_properties",
        "adequacy:do178c_requirements_test_conformance_achieved",
        "completeness:assessments_complete",
        "harmony",
    ]
    assert [v.status for v in verdicts].count(FAIL) == 1


def test_run_checks_errors(load):
    with pytest.raises(CheckError, match="unknown check"):
        run_checks(load("minimal"), None, ["bogus"])
    with pytest.raises(CheckError, match="needs a rules file"):
        run_checks(load("minimal"), None, ["adequacy"])
    assert [v.check for v in run_checks(load("minimal"), None, ["indefeasibility", "theory-application"])] == [
        "indefeasibility",
        "theory-application",
    ]


# ---------------------------------------------------------------- properties

FIXTURE_RULES = {
    "safedriver": None,
    "safedriver_defeated": None,
    "arducopter": "arducopter",
    "arducopter_defeated": "arducopter",
    "consistency": "consistency",
    "harmony": "harmony",
    "harmony_disjoint": "harmony",
    "minimal": None,
}


def _checks_for(case, rs):
    names = [n for n in CHECK_NAMES if rs is not None or n in ("indefeasibility", "theory-application")]
    return run_checks(case, rs, names)


@pytest.mark.parametrize("name", sorted(FIXTURE_RULES))
def test_fail_verdicts_carry_evidence(load, rules, name):
    rs = rules(FIXTURE_RULES[name]) if FIXTURE_RULES[name] else None
    for v in _checks_for(load(name), rs):
        if v.status == FAIL:
            assert v.witnesses or v.blamed
            assert v.justifications


def _sources(case, rs):
    """Every literal (positive or under not) the checks may legitimately point at."""
    progs = [translate_case(case).program, instantiated_theories(case), instance_program(case)]
    if rs is not None:
        progs.append(rs.program())
        progs.extend(completeness_program(case, r)[0] for r in rs.completeness)
    out = []
    for p in progs:
        for r in p.rules:
            for el in ((r.head,) if r.head else ()) + r.body:
                out.append(el.literal if isinstance(el, Naf) else el)
    return out


@pytest.mark.parametrize("name", sorted(FIXTURE_RULES))
def test_blamed_literals_are_traceable(load, rules, name):
    rs = rules(FIXTURE_RULES[name]) if FIXTURE_RULES[name] else None
    case = load(name)
    sources = _sources(case, rs)
    for v in _checks_for(case, rs):
        for lit in v.blamed:
            assert any(unify_literals(lit, s, {}) is not None for s in sources), (v.check, lit)


def test_blamed_traceable_on_mutations(load, rules):
    rs = rules("arducopter")
    for case in [
        load("arducopter").without_subtree("C33"),
        drop_property(load("arducopter"), "C34", "structural_coverage_achieved"),
        load("arducopter_defeated"),
    ]:
        sources = _sources(case, rs)
        for v in run_checks(case, rs):
            assert all(any(unify_literals(l, s, {}) is not None for s in sources) for l in v.blamed)


@pytest.mark.parametrize("name", ["safedriver_defeated", "arducopter_defeated"])
def test_monotone_repair(load, rules, name):
    rs = rules(FIXTURE_RULES[name]) if FIXTURE_RULES[name] else None
    case = load(name)
    before = {v.check: v.status for v in _checks_for(case, rs)}
    for d in [n for n in case.nodes.values() if n.kind == "defeater" and n.defeater_status == "unresolved"]:
        after = {v.check: v.status for v in _checks_for(case.with_node(replace(d, defeater_status="resolved")), rs)}
        assert set(after) == set(before)
        assert all(after[k] == PASS for k in before if before[k] == PASS)
        assert after["indefeasibility"] == PASS


@given(assurance_cases())
def test_indefeasibility_duality(case):
    bundle = translate_case(case)
    passed = check_indefeasibility(case).status == PASS
    negation = prove_negation(bundle.program, bundle.negative_query) is not None
    assert passed != negation


@given(assurance_cases(), st.lists(st.tuples(st.sampled_from(CASE_PROPERTIES), st.sampled_from(CASE_PROPERTIES)), min_size=1, max_size=3))
def test_consistency_composition_identity(case, pairs):
    text = "\n".join(f":- {a}(X), {b}(X)." for a, b in pairs)
    rs = SemanticRuleSet(consistency=parse_program(text))
    v = check_consistency(case, rs)
    direct = check_constraints(translate_case(case).program, rs.consistency)
    assert list(v.witnesses) == [d.witness for d in direct]
    assert (v.status == PASS) == (direct == [])
