"""Case -> logic program translation.

Each node becomes a statement rule (``claimStmt``, ``evidenceStmt``,
``side_ClaimStmt`` or ``defeater``) whose body lists the statements of the
node's supporting children followed by the node's own claim predicate
``claim(App, [Objects], [Properties], [Environments])``.  The claim predicate
itself is a fact (relationship ``off``) or is derived from the node's property
literals, which are then asserted as facts.

Nodes targeted by a defeater get a ``not defeated(Id)`` guard; an unresolved
defeater contributes ``unresolved_defeater(D, Target).`` and a single
``defeated(N) :- unresolved_defeater(D, N).`` rule links the two.

Theory subtrees are exported twice over: as variable-carrying templates (the
``theories`` part of the bundle, rules only) and, on demand, as ground
instances tagged ``application(instance_k)`` by :func:`instantiate_theory`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .case_model import AssuranceCase, Node, is_variable_name, theory_variables, validate_case
from .logic import (
    Atom,
    Compound,
    ListTerm,
    Literal,
    Naf,
    Program,
    Query,
    Rule,
    Term,
    Var,
    apply_literal,
    literal_to_term,
)
from .syntax import render_program

NONE_TAG = Compound("application", (Atom("none"),))
STATEMENT_PREDICATES = {
    "claim": "claimStmt",
    "theory_claim": "claimStmt",
    "evidence": "evidenceStmt",
    "side_claim": "side_ClaimStmt",
    "defeater": "defeater",
}
BUNDLE_PARTS = ("rules", "query", "nquery", "theories", "defeaters")


class TranslationError(ValueError):
    pass


def application_tag(instance: Optional[str] = None) -> Term:
    return NONE_TAG if instance is None else Compound("application", (Atom(instance),))


@dataclass(frozen=True)
class ExportBundle:
    core: Program
    positive_query: Query
    negative_query: Query
    theories: Program
    defeater_constraints: Program

    @property
    def program(self) -> Program:
        """Core rules plus theory templates: what queries are solved against."""
        return self.core + self.theories

    def texts(self) -> Dict[str, str]:
        """Rendered text of the five export files, keyed by file suffix."""
        return {
            "rules": render_program(self.core),
            "query": str(self.positive_query) + "\n",
            "nquery": str(self.negative_query) + "\n",
            "theories": render_program(self.theories),
            "defeaters": render_program(self.defeater_constraints),
        }


def _ident(name: str) -> Term:
    return Var(name) if is_variable_name(name) else Atom(name)


def expand_claim_predicate(node: Node, app_tag: Term = NONE_TAG) -> Tuple[Literal, List[Literal]]:
    """The node's ``claim/4`` head and its property list under the node's relationship mode."""
    ope = node.ope
    objs = [_ident(o) for o in ope.objects]
    envs = [_ident(e) for e in ope.environments]
    head = Literal(
        "claim",
        (app_tag, ListTerm(tuple(objs)), ListTerm(tuple(Atom(p) for p in ope.properties)), ListTerm(tuple(envs))),
    )
    rel = node.relationship
    tail = tuple(envs) if rel.include_environment else ()
    if rel.mode == "off":
        props: List[Literal] = []
    elif rel.mode == "joint":
        props = [Literal(p, tuple(objs) + tail) for p in ope.properties]
    elif rel.mode == "positional":
        if len(objs) != len(ope.properties):
            raise TranslationError(
                f"node {node.id}: positional mode needs |objects| = |properties| "
                f"({len(objs)} != {len(ope.properties)})"
            )
        props = [Literal(p, (o,) + tail) for p, o in zip(ope.properties, objs)]
    elif rel.mode == "distributive":
        props = [Literal(p, (o,) + tail) for p in ope.properties for o in objs]
    else:
        raise TranslationError(f"node {node.id}: unknown relationship mode {rel.mode!r}")
    return head, props


class _Translator:
    def __init__(self, case: AssuranceCase):
        self.case = case
        self.targeted = {n.defeats for n in case.nodes.values() if n.kind == "defeater"}
        self.theory_rule_ids = {
            r for r in case.theory_roots() if case.support_children(r)
        }

    def node(self, nid: str) -> Node:
        try:
            return self.case.nodes[nid]
        except KeyError:
            raise TranslationError(f"unresolved reference to node {nid!r}") from None

    def statement(self, node: Node, tag: Term) -> Literal:
        """The statement literal heading ``node``'s rule (also used in parents' bodies)."""
        head, _ = expand_claim_predicate(node, tag)
        nid = Atom(node.id)
        claim = literal_to_term(head)
        if node.kind in ("claim", "theory_claim"):
            return Literal("claimStmt", (nid, tag, claim, Atom(node.description)))
        if node.kind == "evidence":
            artefact, uri = node.evidence_artifact or ("", "")
            return Literal("evidenceStmt", (nid, tag, claim, Atom(artefact), Atom(uri)))
        if node.kind == "side_claim":
            return Literal("side_ClaimStmt", (nid, tag, claim, Atom(node.justification_text or "")))
        if node.kind == "defeater":
            return Literal(
                "defeater", (nid, tag, Compound("defeats", (Atom(node.defeats),)), claim, Atom(node.description))
            )
        raise TranslationError(f"node {node.id} of kind {node.kind} has no statement")

    def arguments_below(self, nid: str) -> List[str]:
        out = []
        for c in self.case.children(nid):
            if self.case.nodes[c].kind == "argument" and c not in out:
                out.append(c)
                out.extend(a for a in self.arguments_below(c) if a not in out)
        return out

    def claim_above(self, nid: str) -> Node:
        """Nearest non-argument ancestor of an argument node."""
        node = self.node(nid)
        while node.kind == "argument":
            parents = [e.parent for e in self.case.edges if e.child == node.id and e.kind == "supports"]
            if not parents:
                raise TranslationError(f"argument {node.id} supports nothing")
            node = self.node(parents[0])
        return node

    def child_statements(self, node: Node, tag: Term) -> List[Literal]:
        return [self.statement(self.node(c), tag) for c in self.case.support_children(node.id)]

    def node_rules(self, node: Node, tag: Term, facts: bool) -> List[Rule]:
        head, props = expand_claim_predicate(node, tag)
        body: List = self.child_statements(node, tag)
        for guarded in [node.id] + self.arguments_below(node.id):
            if guarded in self.targeted:
                body.append(Naf(Literal("defeated", (Atom(guarded),))))
        body.append(head)
        ref = node.theory_ref
        if ref is not None:
            tnode = self.node(ref.theory_id)
            if tnode.kind != "theory_claim":
                raise TranslationError(f"node {node.id}: theory_ref {ref.theory_id} is not a theory claim")
            if ref.theory_id in self.theory_rule_ids:
                body.append(Literal("theory", (Atom(ref.theory_id), tag, literal_to_term(head))))
        rules = [Rule(self.statement(node, tag), tuple(body))]
        if facts:
            if props:
                rules.append(Rule(head, tuple(props)))
                rules.extend(Rule(p) for p in props)
            else:
                rules.append(Rule(head))
        if node.kind == "defeater" and node.defeater_status == "unresolved" and facts:
            rules.append(Rule(Literal("unresolved_defeater", (Atom(node.id), Atom(node.defeats)))))
        return rules

    def subtree_rules(self, root: str, tag: Term, facts: bool, seen: set) -> List[Rule]:
        """Depth-first preorder: node, its defeaters, then its supporting children."""
        out: List[Rule] = []

        def visit(nid):
            if nid in seen:
                return
            seen.add(nid)
            node = self.node(nid)
            if node.kind != "argument":
                out.extend(self.node_rules(node, tag, facts))
            for d in self.case.defeaters_of(nid):
                visit(d)
            for c in self.case.children(nid):
                visit(c)

        visit(root)
        return out

    def theory_rule(self, root: str, tag: Term) -> Rule:
        node = self.node(root)
        head, _ = expand_claim_predicate(node, tag)
        body = tuple(self.child_statements(node, tag)) + (head,)
        return Rule(Literal("theory", (Atom(root), tag, literal_to_term(head))), body)

    def defeater_constraint(self, d: Node) -> Rule:
        target = self.claim_above(d.defeats)
        stmt = self.statement(target, Var("_"))
        anon = Literal(stmt.predicate, (Atom(target.id),) + tuple(Var("_") for _ in stmt.args[1:]))
        return Rule(None, (anon, Literal("unresolved_defeater", (Atom(d.id), Atom(d.defeats)))))


def translate_node(node: Node, case: AssuranceCase) -> List[Rule]:
    """Rules contributed by one node on its own (base application tag)."""
    t = _Translator(case)
    if node.kind == "argument":
        return []
    return t.node_rules(node, NONE_TAG, facts=True)


def translate_case(case: AssuranceCase) -> ExportBundle:
    diags = [d for d in validate_case(case) if d.severity == "error"]
    if diags:
        raise TranslationError("case is not valid:\n" + "\n".join(map(str, diags)))
    t = _Translator(case)
    theory_nodes = case.theory_nodes()
    seen = set(theory_nodes)
    core = t.subtree_rules(case.root, NONE_TAG, True, seen)
    # defeaters hanging off nodes outside the root's support tree
    for n in case.nodes.values():
        if n.kind == "defeater" and n.id not in seen and n.defeats not in theory_nodes:
            core.extend(t.subtree_rules(n.id, NONE_TAG, True, seen))
    if any(n.kind == "defeater" for n in case.nodes.values()):
        core.append(Rule(Literal("defeated", (Var("N"),)), (Literal("unresolved_defeater", (Var("D"), Var("N"))),)))

    theories: List[Rule] = []
    tseen: set = set()
    for root in case.theory_roots():
        tag = Var("App")
        theories.extend(t.subtree_rules(root, tag, False, tseen))
        if root in t.theory_rule_ids:
            theories.append(t.theory_rule(root, tag))

    root_node = case.nodes[case.root]
    root_head, _ = expand_claim_predicate(root_node, NONE_TAG)
    goal = Literal(
        "claimStmt", (Atom(case.root), NONE_TAG, literal_to_term(root_head), Var("_"))
    )
    constraints = [t.defeater_constraint(n) for n in case.nodes.values() if n.kind == "defeater"]
    return ExportBundle(
        core=Program(tuple(core)),
        positive_query=Query((goal,)),
        negative_query=Query((Naf(goal),)),
        theories=Program(tuple(theories)),
        defeater_constraints=Program(tuple(constraints)),
    )


def instantiate_theory(theory_root: str, app, case: AssuranceCase, instance: str = "instance_1"):
    """Ground copy of a theory subtree under ``app``'s binding.

    Returns ``(rules, obligations)`` where obligations are the application's
    node-correspondence pairs, left for the theory-application check.
    """
    root = case.nodes.get(theory_root)
    if root is None or root.kind != "theory_claim":
        raise TranslationError(f"{theory_root!r} is not a theory claim")
    binding = app.binding_map
    for var in sorted(theory_variables(case, theory_root)):
        if var not in binding:
            raise TranslationError(f"unbound theory variable {var}")
    subst = {}
    for var, value in binding.items():
        if is_variable_name(value) or not value:
            raise TranslationError(f"binding maps {var} to non-atom {value!r}")
        subst[Var(var)] = Atom(value)
    t = _Translator(case)
    tag = application_tag(instance)
    rules = t.subtree_rules(theory_root, tag, True, set())
    if theory_root in t.theory_rule_ids:
        rules.append(t.theory_rule(theory_root, tag))
    ground = []
    for r in rules:
        head = apply_literal(subst, r.head) if r.head is not None else None
        ground.append(Rule(head, tuple(apply_literal(subst, el) for el in r.body)))
    return ground, list(app.node_correspondence)


def instantiated_theories(case: AssuranceCase) -> Program:
    """All theory applications of the case, each instantiated with its own instance tag."""
    rules: List[Rule] = []
    for _, app, inst in case.theory_applications():
        rs, _ = instantiate_theory(app.theory_id, app, case, inst)
        rules.extend(rs)
    return Program(tuple(rules))


def export_paths(case_path) -> Dict[str, str]:
    """Output file names for the five bundle parts, next to ``case_path``."""
    from pathlib import Path

    p = Path(case_path)
    stem = p.name
    for suffix in (".json", ".case"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    return {part: str(p.with_name(f"{stem}.{part}.lp")) for part in BUNDLE_PARTS}
