"""Assurance 2.0 cases: node/edge model, JSON loading and structural validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .logic import ATOM_RE, VAR_RE

NODE_KINDS = ("claim", "evidence", "side_claim", "argument", "defeater", "theory_claim")
EDGE_KINDS = ("supports", "side-supports", "defeats", "applies-theory")
SUPPORT_EDGES = ("supports", "side-supports")
MODES = ("off", "joint", "positional", "distributive")


class CaseError(ValueError):
    """The case document cannot be turned into an :class:`AssuranceCase`."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


def is_variable_name(name: str) -> bool:
    return bool(VAR_RE.match(name))


@dataclass(frozen=True)
class OpeTriple:
    objects: Tuple[str, ...] = ()
    properties: Tuple[str, ...] = ()
    environments: Tuple[str, ...] = ()

    def identifiers(self):
        return self.objects + self.properties + self.environments


@dataclass(frozen=True)
class RelationshipMode:
    mode: str = "off"
    include_environment: bool = False


@dataclass(frozen=True)
class TheoryApplication:
    theory_id: str
    binding: Tuple[Tuple[str, str], ...] = ()
    node_correspondence: Tuple[Tuple[str, str], ...] = ()

    @property
    def binding_map(self) -> Dict[str, str]:
        return dict(self.binding)


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    description: str = ""
    ope: OpeTriple = OpeTriple()
    relationship: RelationshipMode = RelationshipMode()
    evidence_artifact: Optional[Tuple[str, str]] = None
    justification_text: Optional[str] = None
    defeats: Optional[str] = None
    defeater_status: Optional[str] = None
    theory_ref: Optional[TheoryApplication] = None


@dataclass(frozen=True)
class Edge:
    parent: str
    child: str
    kind: str = "supports"


@dataclass(frozen=True)
class Vocabulary:
    object_types: FrozenSet[str] = frozenset()
    instances: FrozenSet[Tuple[str, str]] = frozenset()
    global_properties: FrozenSet[str] = frozenset()
    global_environments: FrozenSet[str] = frozenset()
    variable_types: Tuple[Tuple[str, str], ...] = ()
    undeclared: FrozenSet[str] = frozenset()

    def instances_of(self, type_name: str) -> List[str]:
        return sorted(a for a, t in self.instances if t == type_name)

    def type_of_variable(self, var: str) -> Optional[str]:
        return dict(self.variable_types).get(var)


@dataclass(frozen=True)
class AssuranceCase:
    nodes: Mapping[str, Node]
    edges: Tuple[Edge, ...]
    root: str
    vocabulary: Vocabulary = Vocabulary()

    def children(self, node_id: str, kinds: Sequence[str] = SUPPORT_EDGES) -> List[str]:
        return [e.child for e in self.edges if e.parent == node_id and e.kind in kinds]

    def support_children(self, node_id: str) -> List[str]:
        """Children of a node with argument nodes flattened away, in edge order."""
        out = []
        for c in self.children(node_id):
            if self.nodes[c].kind == "argument":
                out.extend(x for x in self.support_children(c) if x not in out)
            elif c not in out:
                out.append(c)
        return out

    def defeaters_of(self, node_id: str) -> List[str]:
        return [n.id for n in self.nodes.values() if n.kind == "defeater" and n.defeats == node_id]

    def theory_roots(self) -> List[str]:
        has_parent = {e.child for e in self.edges if e.kind in SUPPORT_EDGES}
        return [n.id for n in self.nodes.values() if n.kind == "theory_claim" and n.id not in has_parent]

    def subtree(self, node_id: str) -> List[str]:
        """Node ids reachable through support edges, depth-first preorder."""
        out, seen = [], set()

        def visit(n):
            if n in seen:
                return
            seen.add(n)
            out.append(n)
            for c in self.children(n):
                visit(c)

        visit(node_id)
        return out

    def theory_nodes(self) -> Set[str]:
        out = set()
        for r in self.theory_roots():
            out.update(self.subtree(r))
        return out

    def theory_applications(self) -> List[Tuple[str, TheoryApplication, str]]:
        """``(node_id, application, instance_atom)`` in document order."""
        apps = [(n.id, n.theory_ref) for n in self.nodes.values() if n.theory_ref is not None]
        return [(nid, app, f"instance_{k}") for k, (nid, app) in enumerate(apps, 1)]

    def with_node(self, node: Node) -> "AssuranceCase":
        nodes = dict(self.nodes)
        nodes[node.id] = node
        return replace(self, nodes=nodes)

    def without_node(self, node_id: str) -> "AssuranceCase":
        nodes = {k: v for k, v in self.nodes.items() if k != node_id}
        edges = tuple(e for e in self.edges if node_id not in (e.parent, e.child))
        return replace(self, nodes=nodes, edges=edges)

    def without_subtree(self, node_id: str) -> "AssuranceCase":
        """Drop a node and everything left unreachable by its removal (its own support, orphaned defeaters)."""
        case = self.without_node(node_id)
        while True:
            reach = _reachable(case)
            gone = [n for n in case.nodes if n not in reach]
            gone += [n.id for n in case.nodes.values() if n.defeats is not None and n.defeats not in case.nodes]
            if not gone:
                return case
            for n in dict.fromkeys(gone):
                case = case.without_node(n)

    def with_edge(self, edge: Edge) -> "AssuranceCase":
        return replace(self, edges=self.edges + (edge,))


@dataclass(frozen=True)
class Diagnostic:
    node_id: Optional[str]
    rule: str
    message: str
    severity: str = "error"

    def __str__(self):
        where = self.node_id or "-"
        return f"{self.severity}: [{where}] {self.rule}: {self.message}"


# ---------------------------------------------------------------- loading


def _strs(value, what, node_id) -> Tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise CaseError(f"node {node_id}: {what} must be a list of strings")
    return tuple(value)


def _relationship(raw, node_id) -> RelationshipMode:
    if raw is None:
        return RelationshipMode()
    if isinstance(raw, str):
        raw = {"mode": raw}
    mode = raw.get("mode", "off")
    if mode not in MODES:
        raise CaseError(f"node {node_id}: unknown relationship mode {mode!r}")
    return RelationshipMode(mode, bool(raw.get("include_environment", False)))


def _theory_ref(raw, node_id) -> Optional[TheoryApplication]:
    if raw is None:
        return None
    if not isinstance(raw, dict) or "theory" not in raw:
        raise CaseError(f"node {node_id}: theory_ref needs a 'theory' key")
    return TheoryApplication(
        raw["theory"],
        tuple((str(k), str(v)) for k, v in raw.get("binding", {}).items()),
        tuple((str(k), str(v)) for k, v in raw.get("correspondence", {}).items()),
    )


def _node(raw) -> Node:
    if not isinstance(raw, dict):
        raise CaseError("node entries must be objects")
    for key in ("id", "kind"):
        if key not in raw:
            raise CaseError(f"node missing required key {key!r}")
    nid, kind = raw["id"], raw["kind"]
    if kind not in NODE_KINDS:
        raise CaseError(f"node {nid}: unknown kind {kind!r}")
    artefact = None
    if "artefact" in raw or "uri" in raw:
        artefact = (raw.get("artefact", ""), raw.get("uri", ""))
    if kind == "defeater" and not raw.get("defeats"):
        raise CaseError(f"node {nid}: defeater without target")
    return Node(
        id=nid,
        kind=kind,
        description=raw.get("description", ""),
        ope=OpeTriple(
            _strs(raw.get("objects"), "objects", nid),
            _strs(raw.get("properties"), "properties", nid),
            _strs(raw.get("environments"), "environments", nid),
        ),
        relationship=_relationship(raw.get("relationship"), nid),
        evidence_artifact=artefact,
        justification_text=raw.get("justification"),
        defeats=raw.get("defeats"),
        defeater_status=raw.get("defeater_status", "unresolved" if kind == "defeater" else None),
        theory_ref=_theory_ref(raw.get("theory_ref"), nid),
    )


def _vocabulary(raw) -> Vocabulary:
    raw = raw or {}
    instances = raw.get("instances", {})
    if isinstance(instances, dict):
        pairs = {(a, t) for t, atoms in instances.items() for a in atoms}
    else:
        pairs = {tuple(p) for p in instances}
    return Vocabulary(
        object_types=frozenset(raw.get("types", ())),
        instances=frozenset(pairs),
        global_properties=frozenset(raw.get("properties", ())),
        global_environments=frozenset(raw.get("environments", ())),
        variable_types=tuple(sorted(raw.get("variable_types", {}).items())),
    )


def load_case(document) -> AssuranceCase:
    """Build a case from a JSON document (``bytes`` or ``str``)."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise CaseError(f"parse error: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise CaseError("case document must be a JSON object")
    nodes: Dict[str, Node] = {}
    for rn in raw.get("nodes", []):
        node = _node(rn)
        if node.id in nodes:
            raise CaseError(f"duplicate id {node.id!r}")
        nodes[node.id] = node
    edges = []
    for re_ in raw.get("edges", []):
        if isinstance(re_, list):
            re_ = dict(zip(("parent", "child", "kind"), re_))
        edge = Edge(re_["parent"], re_["child"], re_.get("kind", "supports"))
        if edge.kind not in EDGE_KINDS:
            raise CaseError(f"unknown edge kind {edge.kind!r}")
        for end in (edge.parent, edge.child):
            if end not in nodes:
                raise CaseError(f"dangling node reference {end!r} in edge {edge.parent}->{edge.child}")
        edges.append(edge)
    for n in nodes.values():
        if n.defeats is not None and n.defeats not in nodes:
            raise CaseError(f"dangling node reference {n.defeats!r} in defeater {n.id}")
        if n.theory_ref is not None and n.theory_ref.theory_id not in nodes:
            raise CaseError(f"dangling node reference {n.theory_ref.theory_id!r} in theory_ref of {n.id}")
    root = raw.get("root")
    if root is None and len(nodes) == 1:
        root = next(iter(nodes))
    if root not in nodes:
        raise CaseError(f"dangling node reference: root {root!r}")
    return AssuranceCase(nodes, tuple(edges), root, _vocabulary(raw.get("vocabulary")))


def load_case_file(path) -> AssuranceCase:
    with open(path, "rb") as fh:
        return load_case(fh.read())


def case_to_dict(case: AssuranceCase) -> dict:
    nodes = []
    for n in case.nodes.values():
        d = {"id": n.id, "kind": n.kind, "description": n.description}
        if n.kind != "argument" or n.ope.identifiers():
            d["objects"] = list(n.ope.objects)
            d["properties"] = list(n.ope.properties)
            d["environments"] = list(n.ope.environments)
        if n.relationship != RelationshipMode():
            d["relationship"] = {"mode": n.relationship.mode, "include_environment": n.relationship.include_environment}
        if n.evidence_artifact is not None:
            d["artefact"], d["uri"] = n.evidence_artifact
        if n.justification_text is not None:
            d["justification"] = n.justification_text
        if n.defeats is not None:
            d["defeats"] = n.defeats
        if n.defeater_status is not None:
            d["defeater_status"] = n.defeater_status
        if n.theory_ref is not None:
            d["theory_ref"] = {
                "theory": n.theory_ref.theory_id,
                "binding": dict(n.theory_ref.binding),
                "correspondence": dict(n.theory_ref.node_correspondence),
            }
        nodes.append(d)
    voc = case.vocabulary
    types = sorted({t for _, t in voc.instances} | set(voc.object_types))
    return {
        "root": case.root,
        "nodes": nodes,
        "edges": [{"parent": e.parent, "child": e.child, "kind": e.kind} for e in case.edges],
        "vocabulary": {
            "types": sorted(voc.object_types),
            "instances": {t: voc.instances_of(t) for t in types if voc.instances_of(t)},
            "properties": sorted(voc.global_properties),
            "environments": sorted(voc.global_environments),
            "variable_types": dict(voc.variable_types),
        },
    }


def dump_case(case: AssuranceCase) -> str:
    return json.dumps(case_to_dict(case), indent=2) + "\n"


# ---------------------------------------------------------------- validation


def _support_cycle(case: AssuranceCase) -> Optional[List[str]]:
    adj: Dict[str, List[str]] = {n: [] for n in case.nodes}
    for e in case.edges:
        if e.kind != "defeats" and e.parent in adj and e.child in adj:
            adj[e.parent].append(e.child)
    color = dict.fromkeys(adj, 0)
    path: List[str] = []

    def dfs(n):
        color[n] = 1
        path.append(n)
        for c in adj[n]:
            if color[c] == 1:
                return path[path.index(c):]
            if color[c] == 0:
                cyc = dfs(c)
                if cyc:
                    return cyc
        path.pop()
        color[n] = 2
        return None

    for n in adj:
        if color[n] == 0:
            cyc = dfs(n)
            if cyc:
                return cyc
    return None


def _reachable(case: AssuranceCase) -> Set[str]:
    walk_kinds = SUPPORT_EDGES + ("applies-theory",)
    seen: Set[str] = set()
    frontier = [case.root] + case.theory_roots()
    while frontier:
        n = frontier.pop()
        if n in seen or n not in case.nodes:
            continue
        seen.add(n)
        frontier.extend(case.children(n, walk_kinds))
        frontier.extend(case.defeaters_of(n))
        ref = case.nodes[n].theory_ref
        if ref is not None:
            frontier.append(ref.theory_id)
    return seen


def theory_variables(case: AssuranceCase, theory_root: str) -> Set[str]:
    out = set()
    for nid in case.subtree(theory_root):
        n = case.nodes[nid]
        out.update(x for x in n.ope.objects + n.ope.environments if is_variable_name(x))
    return out


def validate_case(case: AssuranceCase) -> List[Diagnostic]:
    """All structural invariant violations of ``case``; empty when valid."""
    diags: List[Diagnostic] = []

    def bad(node_id, rule, message):
        diags.append(Diagnostic(node_id, rule, message))

    nodes = case.nodes
    for e in case.edges:
        for end in (e.parent, e.child):
            if end not in nodes:
                bad(end, "dangling reference", f"edge {e.parent}->{e.child} names unknown node {end}")
        if e.kind == "defeats" and e.parent in nodes and nodes[e.parent].kind != "defeater":
            bad(e.parent, "defeats from non-defeater", "defeats edges must originate at a defeater")
        if e.kind == "defeats" and e.parent in nodes and nodes[e.parent].defeats not in (None, e.child):
            bad(e.parent, "defeats mismatch", f"edge targets {e.child} but node defeats {nodes[e.parent].defeats}")
        if e.kind not in EDGE_KINDS:
            bad(e.parent, "unknown edge kind", e.kind)

    if case.root not in nodes:
        bad(case.root, "missing root", "root node does not exist")
    elif nodes[case.root].kind != "claim":
        bad(case.root, "root not a claim", f"root has kind {nodes[case.root].kind}")
    else:
        parents = [e.parent for e in case.edges if e.child == case.root and e.kind in SUPPORT_EDGES]
        if parents:
            bad(case.root, "root has parent", f"root is supported by {parents}")
    if any(e.parent not in nodes or e.child not in nodes for e in case.edges):
        return diags

    cycle = _support_cycle(case)
    if cycle:
        bad(cycle[0], "cycle in support graph", " -> ".join(cycle + [cycle[0]]))

    reach = _reachable(case)
    for nid in nodes:
        if nid not in reach:
            bad(nid, "unreachable node", "not reachable from the root or a theory root")

    in_theory = case.theory_nodes() if not cycle else set()
    for n in nodes.values():
        if (n.evidence_artifact is not None) != (n.kind == "evidence"):
            msg = "evidence needs artefact and uri" if n.kind == "evidence" else "only evidence carries an artefact"
            bad(n.id, "evidence artefact", msg)
        if n.kind == "defeater":
            if not n.defeats:
                bad(n.id, "defeater without target", "defeater must name the node it defeats")
            elif n.defeats not in nodes:
                bad(n.id, "dangling reference", f"defeats unknown node {n.defeats}")
            if n.defeater_status not in ("unresolved", "resolved"):
                bad(n.id, "defeater status", f"status must be unresolved or resolved, not {n.defeater_status!r}")
        elif n.defeats is not None or n.defeater_status is not None:
            bad(n.id, "defeats on non-defeater", "only defeaters carry a defeats target or status")
        if (n.justification_text is not None) != (n.kind == "side_claim"):
            bad(n.id, "side-claim justification", "justification present iff the node is a side-claim")
        for ident in n.ope.identifiers():
            if not ident or not (ATOM_RE.match(ident) or is_variable_name(ident)):
                bad(n.id, "bad identifier", f"{ident!r} is neither an atom nor a variable")
        for p in n.ope.properties:
            if is_variable_name(p):
                bad(n.id, "variable property", f"property {p} must be an atom")
        if n.id not in in_theory:
            for ident in n.ope.objects + n.ope.environments:
                if is_variable_name(ident):
                    bad(n.id, "variable outside theory", f"{ident} is a variable but the node is not part of a theory")
        if n.kind == "argument" and n.ope.identifiers():
            bad(n.id, "argument with OPE", "arguments carry no objects/properties/environments")
        if n.relationship.mode == "positional" and len(n.ope.objects) != len(n.ope.properties):
            bad(n.id, "positional arity", "positional mode needs as many objects as properties")
        if n.theory_ref is not None:
            app = n.theory_ref
            tnode = nodes.get(app.theory_id)
            if tnode is None or tnode.kind != "theory_claim":
                bad(n.id, "theory_ref to non-theory", f"{app.theory_id} is not a theory claim")
            elif not cycle:
                want = theory_variables(case, app.theory_id)
                got = set(app.binding_map)
                if want != got:
                    bad(n.id, "binding domain mismatch", f"binding covers {sorted(got)}, theory uses {sorted(want)}")
            for a, t in app.node_correspondence:
                if a not in nodes or t not in nodes:
                    bad(n.id, "dangling reference", f"correspondence {a}->{t} names unknown node")

    declared_types = case.vocabulary.object_types
    for atom, type_name in sorted(case.vocabulary.instances):
        if type_name not in declared_types:
            bad(None, "undeclared type", f"instance {atom} references undeclared type {type_name}")
    return diags


def vocabulary_of(case: AssuranceCase) -> Vocabulary:
    """Declared vocabulary merged with the identifiers the nodes actually use."""
    voc = case.vocabulary
    declared = (
        {a for a, _ in voc.instances}
        | set(voc.global_properties)
        | set(voc.global_environments)
        | set(voc.object_types)
    )
    props, envs, undeclared = set(voc.global_properties), set(voc.global_environments), set()
    for n in case.nodes.values():
        for ident in n.ope.identifiers():
            if not is_variable_name(ident) and ident not in declared:
                undeclared.add(ident)
        props.update(n.ope.properties)
        envs.update(e for e in n.ope.environments if not is_variable_name(e))
    return replace(
        voc,
        global_properties=frozenset(props),
        global_environments=frozenset(envs),
        undeclared=frozenset(undeclared),
    )
