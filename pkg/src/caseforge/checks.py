"""The six semantic analyses over a translated case.

Each check maps to one engine entry point:

* indefeasibility: positive query via ``solve``, negative query via ``prove_negation``
* theory application: structural comparison plus ``instance_of`` lookups
* consistency and harmony: ``check_constraints``
* adequacy: a satisfiability query, with ``prove_negation`` for blame
* completeness: an NAF-encoded complement queried for witnesses
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .case_model import AssuranceCase, theory_variables, vocabulary_of
from .engine import (
    JustificationTree,
    blamed_leaves,
    check_constraints,
    prove_negation,
    solve,
)
from .logic import (
    Atom,
    Literal,
    Naf,
    Program,
    Query,
    Rule,
    Var,
    apply_literal,
    check_safety,
    render_rule_inline,
    is_ground,
    unique_vars,
)
from .syntax import ParseError, parse_program, parse_query
from .translator import expand_claim_predicate, instantiated_theories, translate_case

CHECK_NAMES = ("indefeasibility", "theory-application", "consistency", "adequacy", "completeness", "harmony")
RULE_DRIVEN = ("consistency", "adequacy", "completeness", "harmony")
PASS, FAIL = "pass", "fail"


class CheckError(ValueError):
    pass


@dataclass(frozen=True)
class AdequacyRule:
    name: str
    body: Tuple[Literal, ...]


@dataclass(frozen=True)
class CompletenessRule:
    name: str
    type_name: str
    prop: str


@dataclass(frozen=True)
class SemanticRuleSet:
    consistency: Program = Program()
    adequacy: Tuple[AdequacyRule, ...] = ()
    completeness: Tuple[CompletenessRule, ...] = ()
    harmony: Program = Program()

    def program(self) -> Program:
        """Every rule-set literal as one program, used to trace blamed literals."""
        rules = list(self.consistency.rules) + list(self.harmony.rules)
        rules += [Rule(None, r.body) for r in self.adequacy]
        return Program(tuple(rules))


@dataclass(frozen=True)
class Verdict:
    check: str
    status: str
    witnesses: Tuple[Dict[Var, object], ...] = ()
    blamed: Tuple[Literal, ...] = ()
    justifications: Tuple[JustificationTree, ...] = ()
    reasons: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def justification(self) -> Optional[JustificationTree]:
        return self.justifications[0] if self.justifications else None


# ---------------------------------------------------------------- rule files

_SECTION_RE = re.compile(r"^%%\s*(\w+)\s*$")
_ADEQ_RE = re.compile(r"^([a-z][A-Za-z0-9_]*)\s*:\s*(.+?)\.?$")
_COMPL_RE = re.compile(r"^([a-z][A-Za-z0-9_]*)\s*:\s*([a-z][A-Za-z0-9_]*)\s*=>\s*([a-z][A-Za-z0-9_]*)\s*\.?$")


def parse_rules(text: str) -> SemanticRuleSet:
    """Parse a rule-set file with ``%% consistency|adequacy|completeness|harmony`` sections."""
    sections: Dict[str, List[Tuple[int, str]]] = {k: [] for k in RULE_DRIVEN}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(line.strip())
        if m:
            current = m.group(1)
            if current not in sections:
                raise ParseError(f"unknown section {current!r}", lineno, 1)
            continue
        if current is None:
            if line.strip() and not line.strip().startswith("%"):
                raise ParseError("rule text before the first section header", lineno, 1)
            continue
        sections[current].append((lineno, line))

    def constraints(name):
        lines = sections[name]
        # keep line numbers meaningful in parse errors
        offset = lines[0][0] - 1 if lines else 0
        prog = parse_program("\n" * offset + "\n".join(l for _, l in lines))
        for r in prog.rules:
            if not r.is_constraint:
                raise CheckError(f"{name} section may only hold headless constraints, found {r}")
        return Program(prog.rules)

    adequacy = []
    completeness = []
    for lineno, line in sections["adequacy"]:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        m = _ADEQ_RE.match(s)
        if not m:
            raise ParseError("expected 'name: lit1, lit2, ...'", lineno, 1)
        body = parse_query(m.group(2)).body
        if any(isinstance(el, Naf) for el in body):
            raise ParseError("adequacy bodies are conjunctions of positive literals", lineno, 1)
        head = Literal(f"adequate_{m.group(1)}", tuple(v for v in unique_vars(body) if not v.is_local))
        check_safety(Rule(head, body))
        adequacy.append(AdequacyRule(m.group(1), body))
    for lineno, line in sections["completeness"]:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        m = _COMPL_RE.match(s)
        if not m:
            raise ParseError("expected 'name: type => property'", lineno, 1)
        completeness.append(CompletenessRule(*m.groups()))
    return SemanticRuleSet(constraints("consistency"), tuple(adequacy), tuple(completeness), constraints("harmony"))


def load_rules_file(path) -> SemanticRuleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


# ---------------------------------------------------------------- checks


def check_indefeasibility(case: AssuranceCase) -> Verdict:
    bundle = translate_case(case)
    prog = bundle.program
    proofs = solve(prog, bundle.positive_query, max_answers=1)
    negation = prove_negation(prog, bundle.negative_query)
    if proofs and negation is None:
        return Verdict("indefeasibility", PASS, ({},), (), (proofs[0].justification,))
    tree = negation.justification
    blamed = blamed_leaves(tree)
    reasons = []
    for lit in blamed:
        if lit.predicate == "unresolved_defeater":
            reasons.append(f"unresolved defeater {lit.args[0]} on {lit.args[1]}")
        else:
            reasons.append(f"unsupported: {lit}")
    return Verdict("indefeasibility", FAIL, (), tuple(blamed), (tree,), tuple(reasons))


def instance_program(case: AssuranceCase) -> Program:
    """`instance_of(Atom, Type)` facts for the declared vocabulary."""
    return Program(
        tuple(
            Rule(Literal("instance_of", (Atom(a), Atom(t))))
            for a, t in sorted(case.vocabulary.instances)
        )
    )


def check_theory_application(case: AssuranceCase) -> Verdict:
    """Each application's nodes must carry the theory's properties, and bindings must hit typed instances."""
    scratch = instance_program(case)
    blamed: List[Literal] = []
    reasons: List[str] = []
    trees: List[JustificationTree] = []
    witnesses = []
    for nid, app, _ in case.theory_applications():
        want = theory_variables(case, app.theory_id)
        got = set(app.binding_map)
        if want != got:
            raise CheckError(
                f"binding domain mismatch at {nid}: binding covers {sorted(got)}, theory uses {sorted(want)}"
            )
        binding = app.binding_map
        for a, t in app.node_correspondence:
            an, tn = case.nodes[a], case.nodes[t]
            head, _ = expand_claim_predicate(an)
            if an.ope.properties != tn.ope.properties:
                reasons.append(
                    f"property mismatch: {a} has {list(an.ope.properties)}, theory node {t} has {list(tn.ope.properties)}"
                )
                blamed.append(head)
            bound = tuple(binding.get(x, x) for x in tn.ope.objects), tuple(binding.get(x, x) for x in tn.ope.environments)
            if bound != (an.ope.objects, an.ope.environments):
                reasons.append(
                    f"binding mismatch: {a} is about {list(an.ope.objects)} in {list(an.ope.environments)}, "
                    f"theory node {t} binds to {list(bound[0])} in {list(bound[1])}"
                )
                blamed.append(head)
        for var, value in sorted(binding.items()):
            type_name = case.vocabulary.type_of_variable(var)
            if type_name is None:
                reasons.append(f"untyped theory variable: {var} in {app.theory_id} has no declared type")
                blamed.append(Literal("instance_of", (Atom(value), Var("Type"))))
                continue
            goal = Literal("instance_of", (Atom(value), Atom(type_name)))
            if solve(scratch, goal, max_answers=1):
                continue
            neg = prove_negation(scratch, goal)
            reasons.append(f"undeclared instance: {value} (bound to {var}) is not an instance of {type_name}")
            blamed.extend(blamed_leaves(neg.justification))
            trees.append(neg.justification)
            witnesses.append({Var(var): Atom(value)})
    status = FAIL if reasons else PASS
    return Verdict("theory-application", status, tuple(witnesses), tuple(dict.fromkeys(blamed)), tuple(trees), tuple(reasons))


def _constraint_verdict(name: str, prog: Program, constraints: Program) -> Verdict:
    violations = check_constraints(prog, constraints)
    if not violations:
        return Verdict(name, PASS)
    blamed: List[Literal] = []
    for v in violations:
        for el in v.constraint.body:
            if isinstance(el, Literal):
                blamed.append(apply_literal(v.witness, el))
    reasons = tuple(
        f"violated {render_rule_inline(v.constraint)} with "
        + (", ".join(f"{k} = {t}" for k, t in v.witness.items()) or "no bindings")
        for v in violations
    )
    return Verdict(
        name,
        FAIL,
        tuple(v.witness for v in violations),
        tuple(dict.fromkeys(l for l in blamed if is_ground(l))),
        tuple(v.justification for v in violations),
        reasons,
    )


def check_consistency(case: AssuranceCase, rules: SemanticRuleSet) -> Verdict:
    if not rules.consistency.rules:
        raise CheckError("no consistency rules given")
    return _constraint_verdict("consistency", translate_case(case).program, rules.consistency)


def _property_atoms(case: AssuranceCase, prog: Program) -> List[Atom]:
    """First arguments of property facts: the objects adequacy blame is computed for."""
    props = vocabulary_of(case).global_properties
    out: Dict[Atom, None] = {}
    for lit in prog.facts():
        if lit.predicate in props and lit.args and isinstance(lit.args[0], Atom):
            out.setdefault(lit.args[0], None)
    return list(out)


def check_adequacy(case: AssuranceCase, rules: SemanticRuleSet) -> List[Verdict]:
    """One verdict per adequacy rule.

    On failure every candidate object is tried in the rule's first variable.
    Blame goes to the candidates closest to satisfying the rule (fewest body
    literals that fail on their own), which names what the case lacks for
    that object.
    """
    prog = translate_case(case).program
    out = []
    for rule in rules.adequacy:
        name = f"adequacy:{rule.name}"
        answers = solve(prog, Query(rule.body))
        if answers:
            out.append(Verdict(name, PASS, tuple(a.bindings for a in answers), (), tuple(a.justification for a in answers)))
            continue
        qvars = [v for v in unique_vars(rule.body) if not v.is_local]
        bindings = [{qvars[0]: cand} for cand in _property_atoms(case, prog)] if qvars else []
        attempts = []
        for w in bindings or [{}]:
            body = tuple(apply_literal(w, el) for el in rule.body)
            missing = [el for el in body if not solve(prog, Query((el,)), max_answers=1)]
            neg = prove_negation(prog, Query(body))
            attempts.append((w, neg.justification, missing))
        fewest = min(len(m) for _, _, m in attempts)
        chosen = [a for a in attempts if len(a[2]) == fewest]
        blamed = tuple(dict.fromkeys(l for _, t, _ in chosen for l in blamed_leaves(t)))
        reasons = tuple(
            f"missing {', '.join(map(str, m))} for {', '.join(f'{k} = {t}' for k, t in w.items()) or 'any object'}"
            for w, _, m in chosen
        )
        out.append(Verdict(name, FAIL, tuple(w for w, _, _ in chosen), blamed, tuple(t for _, t, _ in chosen), reasons))
    return out


def completeness_program(case: AssuranceCase, rule: CompletenessRule) -> Tuple[Program, Literal]:
    """Scratch rules for one completeness rule and the query literal that finds violators."""
    voc = case.vocabulary
    if rule.type_name not in voc.object_types:
        raise CheckError(f"completeness rule {rule.name}: undeclared type {rule.type_name}")
    tf = f"typefact_{rule.type_name}"
    x = Var("X")
    rules = [Rule(Literal(tf, (Atom(i),))) for i in voc.instances_of(rule.type_name)]
    goal = Literal(f"incomplete_{rule.name}", (x,))
    rules.append(Rule(goal, (Literal(tf, (x,)), Naf(Literal(rule.prop, (x,))))))
    return Program(tuple(rules)), goal


def check_completeness(case: AssuranceCase, rules: SemanticRuleSet) -> List[Verdict]:
    core = translate_case(case).program
    out = []
    for rule in rules.completeness:
        scratch, goal = completeness_program(case, rule)
        prog = core + scratch
        answers = solve(prog, goal)
        name = f"completeness:{rule.name}"
        if not answers:
            out.append(Verdict(name, PASS))
            continue
        trees, blamed, reasons = [], [], []
        for a in answers:
            w = a.bindings[Var("X")]
            missing = Literal(rule.prop, (w,))
            neg = prove_negation(prog, missing)
            trees.append(neg.justification)
            blamed.extend(blamed_leaves(neg.justification))
            reasons.append(f"{w} of type {rule.type_name} lacks {rule.prop}")
        out.append(Verdict(name, FAIL, tuple(a.bindings for a in answers), tuple(blamed), tuple(trees), tuple(reasons)))
    return out


def check_theory_harmony(case: AssuranceCase, rules: SemanticRuleSet) -> Verdict:
    if not rules.harmony.rules:
        raise CheckError("no harmony rules given")
    prog = translate_case(case).core + instantiated_theories(case)
    return _constraint_verdict("harmony", prog, rules.harmony)


def run_checks(case: AssuranceCase, rules: Optional[SemanticRuleSet], names: Sequence[str] = CHECK_NAMES) -> List[Verdict]:
    """Run the named checks in canonical order.

    Rule-driven checks need ``rules``; consistency and harmony are skipped
    when their section is empty.
    """
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise CheckError(f"unknown check {unknown[0]!r}; choose from {', '.join(CHECK_NAMES)}")
    wanted = [n for n in CHECK_NAMES if n in names]
    out: List[Verdict] = []
    for n in wanted:
        if n in RULE_DRIVEN and rules is None:
            raise CheckError(f"check {n} needs a rules file")
        if n == "indefeasibility":
            out.append(check_indefeasibility(case))
        elif n == "theory-application":
            out.append(check_theory_application(case))
        elif n == "consistency" and rules.consistency.rules:
            out.append(check_consistency(case, rules))
        elif n == "adequacy":
            out.extend(check_adequacy(case, rules))
        elif n == "completeness":
            out.extend(check_completeness(case, rules))
        elif n == "harmony" and rules.harmony.rules:
            out.append(check_theory_harmony(case, rules))
    return out
