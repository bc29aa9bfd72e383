"""Goal-directed evaluation of stratified normal programs.

The solver is SLD resolution with a variant loop check (a call that is a
variant of one of its ancestors fails that branch) and negation as failure
for ground literals.  Bodies are run positive literals first, NAF literals
after, otherwise in source order, which keeps NAF calls ground for safe
rules.  Search is driven by an explicit stack so deep proofs do not consume
the Python call stack; only nested NAF calls recurse, and those are bounded
by the number of strata.

Headless rules are never used to derive anything: they are checked by
:func:`check_constraints`.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .logic import (
    Compound,
    ListTerm,
    Literal,
    Naf,
    Program,
    Query,
    Rule,
    Substitution,
    Var,
    apply_literal,
    is_variant,
    is_ground,
    literal_vars,
    unify_literals,
    unique_vars,
)

DEFAULT_DEPTH_LIMIT = 10000
QUERY_ROOT = Literal("query")

PROVED = "proved"
FAILED = "failed"
NAF_HOLDS = "naf_holds"
NAF_FAILS = "naf_fails"
NO_CLAUSE = "no matching clause"
LOOP = "positive loop"


class EngineError(Exception):
    pass


class NotStratifiedError(EngineError):
    def __init__(self, cycle: List[str]):
        self.cycle = cycle
        super().__init__("program is not stratified; negative cycle through " + " -> ".join(cycle))


class FlounderError(EngineError):
    def __init__(self, literal: Literal):
        self.literal = literal
        super().__init__(f"NAF call on non-ground literal: not {literal}")


class DepthLimitExceeded(EngineError):
    pass


def depth_limit_from_env() -> int:
    raw = os.environ.get("CASEFORGE_DEPTH_LIMIT")
    return int(raw) if raw else DEFAULT_DEPTH_LIMIT


@dataclass(frozen=True)
class JustificationTree:
    literal: Union[Literal, Naf]
    verdict: str
    rule_used: Optional[int] = None
    children: Tuple["JustificationTree", ...] = ()
    reason: Optional[str] = None

    def walk(self) -> Iterator["JustificationTree"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())


@dataclass(frozen=True)
class Answer:
    bindings: Dict[Var, object]
    model: frozenset
    justification: JustificationTree


@dataclass(frozen=True)
class ConstraintViolation:
    constraint: Rule
    witness: Dict[Var, object]
    justification: JustificationTree


@dataclass(frozen=True)
class Stratification:
    strata: Optional[Dict[str, int]] = None
    cycle: Optional[List[str]] = None

    @property
    def stratified(self) -> bool:
        return self.cycle is None


# ---------------------------------------------------------------- stratification


def dependency_graph(p: Program) -> nx.DiGraph:
    g = nx.DiGraph()
    for r in p.rules:
        if r.head is None:
            continue
        h = r.head.indicator
        g.add_node(h)
        for el in r.body:
            neg = isinstance(el, Naf)
            b = (el.literal if neg else el).indicator
            if g.has_edge(h, b):
                g[h][b]["neg"] = g[h][b]["neg"] or neg
            else:
                g.add_edge(h, b, neg=neg)
    return g


def stratify(p: Program) -> Stratification:
    """Stratum per predicate indicator, or a cycle through negation."""
    g = dependency_graph(p)
    for comp in nx.strongly_connected_components(g):
        for u, v, d in g.subgraph(comp).edges(data=True):
            if d["neg"]:
                back = nx.shortest_path(g.subgraph(comp), v, u)
                cycle = [u] + back[:-1] if u != v else [u]
                return Stratification(cycle=cycle)
    cond = nx.condensation(g)
    comp = cond.graph["mapping"]
    level = dict.fromkeys(cond.nodes, 0)
    for c in reversed(list(nx.topological_sort(cond))):
        for u in cond.nodes[c]["members"]:
            for v in g.successors(u):
                if comp[v] != c:
                    level[c] = max(level[c], level[comp[v]] + (1 if g[u][v]["neg"] else 0))
    strata = {pred: level[comp[pred]] for pred in sorted(g.nodes)}
    return Stratification(strata=strata)


# ---------------------------------------------------------------- solver


def _rename(rule: Rule, counter) -> Rule:
    mapping: Dict[Var, Var] = {}
    n = next(counter)

    def fresh(v: Var) -> Var:
        if v.name == "_":
            return Var(f"_#{n}.{next(counter)}")
        if v not in mapping:
            mapping[v] = Var(f"{v.name}#{n}")
        return mapping[v]

    def rt(t):
        if isinstance(t, Var):
            return fresh(t)
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(rt(a) for a in t.args))
        if isinstance(t, ListTerm):
            return ListTerm(tuple(rt(a) for a in t.elements))
        return t

    def rl(lit):
        if isinstance(lit, Naf):
            return Naf(rl(lit.literal))
        return Literal(lit.predicate, tuple(rt(a) for a in lit.args), lit.negated)

    head = rl(rule.head) if rule.head is not None else None
    return Rule(head, tuple(rl(el) for el in rule.body))


def _exec_order(body: Sequence) -> List[int]:
    pos = [i for i, el in enumerate(body) if not isinstance(el, Naf)]
    neg = [i for i, el in enumerate(body) if isinstance(el, Naf)]
    return pos + neg


def _check_naf_ground(lit: Literal):
    for v in literal_vars(lit):
        if not v.is_local:
            raise FlounderError(lit)


class Solver:
    """A compiled program: rule index plus stratification check."""

    def __init__(self, program: Program, depth_limit: int = DEFAULT_DEPTH_LIMIT):
        strat = stratify(program)
        if not strat.stratified:
            raise NotStratifiedError(strat.cycle)
        self.program = program
        self.depth_limit = depth_limit
        self.index: Dict[Tuple[str, int], List[Tuple[int, Rule]]] = {}
        for i, r in enumerate(program.rules):
            if r.head is not None:
                self.index.setdefault(r.head.key, []).append((i, r))
        self.counter = itertools.count()

    # -- core search

    def _run(self, elements: Sequence, subst: Substitution, ancestors=None) -> Iterator[Tuple[Substitution, Dict]]:
        """Yield ``(substitution, steps)`` for every proof of the conjunction ``elements``.

        ``steps`` maps goal ids ``0..len(elements)-1`` (and deeper ids) to the
        resolution step that closed them, for :meth:`_tree`.
        """
        goals = None
        for pos in reversed(_exec_order(elements)):
            goals = ((elements[pos], ancestors, pos), goals)
        cid = itertools.count(len(elements))
        stack = [(goals, subst, None)]
        while stack:
            goals, s, steps = stack.pop()
            if goals is None:
                table = {}
                while steps is not None:
                    (k, v), steps = steps
                    table[k] = v
                yield s, table
                continue
            (el, anc, gid), rest = goals
            if isinstance(el, Naf):
                lit = apply_literal(s, el.literal)
                _check_naf_ground(lit)
                if self._first_proof(lit) is not None:
                    continue
                stack.append((rest, s, ((gid, ("naf", el, None, ())), steps)))
                continue
            lit = apply_literal(s, el)
            depth = anc[2] + 1 if anc is not None else 1
            if depth > self.depth_limit:
                raise DepthLimitExceeded(f"depth limit {self.depth_limit} exceeded at {lit}")
            if self._loops(lit, anc, s):
                continue
            alts = []
            for idx, rule in self.index.get(lit.key, ()):
                r = _rename(rule, self.counter)
                s2 = unify_literals(r.head, lit, s)
                if s2 is None:
                    continue
                me = (lit, anc, depth)
                kids = tuple(next(cid) for _ in r.body)
                new = rest
                for pos in reversed(_exec_order(r.body)):
                    new = ((r.body[pos], me, kids[pos]), new)
                alts.append((new, s2, ((gid, ("call", el, idx, kids)), steps)))
            stack.extend(reversed(alts))

    @staticmethod
    def _loops(lit: Literal, anc, s: Substitution) -> bool:
        while anc is not None:
            a, anc, _ = anc
            if a.key == lit.key and is_variant(apply_literal(s, a), lit):
                return True
        return False

    def _tree(self, gid: int, steps: Dict, s: Substitution) -> JustificationTree:
        kind, el, idx, kids = steps[gid]
        if kind == "naf":
            return JustificationTree(apply_literal(s, el), NAF_HOLDS)
        children = tuple(self._tree(k, steps, s) for k in kids)
        return JustificationTree(apply_literal(s, el), PROVED, idx, children)

    def _first_proof(self, lit: Literal, ancestors=None) -> Optional[JustificationTree]:
        for s, steps in self._run((lit,), {}, ancestors):
            return self._tree(0, steps, s)
        return None

    def _solutions(self, lit: Literal, s: Substitution, ancestors) -> List[Substitution]:
        out, seen = [], set()
        for s2, _ in self._run((lit,), s, ancestors):
            key = apply_literal(s2, lit)
            if key not in seen:
                seen.add(key)
                out.append(s2)
        return out

    # -- public entry points

    def solve(self, query: Query, max_answers: Optional[int] = None) -> List["Answer"]:
        q = _rename_query(query, self.counter)
        qvars = [v for v in unique_vars(query.body) if not v.is_local]
        answers, seen = [], set()
        for s, steps in self._run(q.body, {}):
            bindings = {v: s.get(v, v) for v in qvars}
            key = tuple(bindings.values())
            if key in seen:
                continue
            seen.add(key)
            if len(q.body) == 1:
                tree = self._tree(0, steps, s)
            else:
                tree = JustificationTree(QUERY_ROOT, PROVED, None, tuple(self._tree(i, steps, s) for i in range(len(q.body))))
            answers.append(Answer(bindings, model_of(tree), tree))
            if max_answers is not None and len(answers) >= max_answers:
                break
        return answers

    def explain_failure(self, lit: Literal, ancestors=None) -> JustificationTree:
        """Failure tree for a literal with no proof.

        Children list, per matching rule (and per solution of the body
        prefix), the first body element that fails.
        """
        if self._loops(lit, ancestors, {}):
            return JustificationTree(lit, FAILED, reason=LOOP)
        depth = ancestors[2] + 1 if ancestors is not None else 1
        if depth > self.depth_limit:
            raise DepthLimitExceeded(f"depth limit {self.depth_limit} exceeded at {lit}")
        me = (lit, ancestors, depth)
        matched = False
        children: List[JustificationTree] = []
        for idx, rule in self.index.get(lit.key, ()):
            r = _rename(rule, self.counter)
            s = unify_literals(r.head, lit, {})
            if s is None:
                continue
            matched = True
            body = [r.body[i] for i in _exec_order(r.body)]
            children.extend(self._explain_body(body, s, me))
        if not matched:
            return JustificationTree(lit, FAILED, reason=NO_CLAUSE)
        return JustificationTree(lit, FAILED, children=tuple(_dedupe(children)))

    def _explain_body(self, body, s, me) -> List[JustificationTree]:
        if not body:
            return []
        el, rest = body[0], body[1:]
        if isinstance(el, Naf):
            lit = apply_literal(s, el.literal)
            _check_naf_ground(lit)
            proof = self._first_proof(lit)
            if proof is not None:
                return [JustificationTree(Naf(lit), NAF_FAILS, children=(proof,))]
            return self._explain_body(rest, s, me)
        goal = apply_literal(s, el)
        sols = self._solutions(goal, s, me)
        if not sols:
            return [self.explain_failure(goal, me)]
        out = []
        for s2 in sols:
            out.extend(self._explain_body(rest, s2, me))
        return out

    def explain_conjunction(self, body: Sequence) -> List[JustificationTree]:
        ordered = [body[i] for i in _exec_order(body)]
        return _dedupe(self._explain_body(ordered, {}, None))


def _dedupe(trees):
    seen, out = set(), []
    for t in trees:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _rename_query(query: Query, counter) -> Query:
    """Give every anonymous ``_`` in a query its own variable."""
    n = next(counter)
    k = itertools.count()

    def rt(t):
        if isinstance(t, Var) and t.name == "_":
            return Var(f"_#q{n}.{next(k)}")
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(rt(a) for a in t.args))
        if isinstance(t, ListTerm):
            return ListTerm(tuple(rt(a) for a in t.elements))
        return t

    def rl(lit):
        if isinstance(lit, Naf):
            return Naf(rl(lit.literal))
        return Literal(lit.predicate, tuple(rt(a) for a in lit.args), lit.negated)

    return Query(tuple(rl(el) for el in query.body))


def model_of(tree: JustificationTree) -> frozenset:
    """Ground positive literals proved anywhere in ``tree``."""
    return frozenset(
        t.literal
        for t in tree.walk()
        if t.verdict == PROVED and isinstance(t.literal, Literal) and t.literal != QUERY_ROOT and is_ground(t.literal)
    )


@lru_cache(maxsize=64)
def compile_program(p: Program, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Solver:
    return Solver(p, depth_limit)


def _as_query(q) -> Query:
    if isinstance(q, Query):
        return q
    if isinstance(q, (Literal, Naf)):
        return Query((q,))
    from .syntax import parse_query

    return parse_query(q)


def solve(p: Program, q, max_answers: Optional[int] = None, depth_limit: Optional[int] = None) -> List[Answer]:
    """All answers to ``q`` (up to ``max_answers``) in the perfect model of ``p``."""
    solver = compile_program(p, depth_limit or depth_limit_from_env())
    return solver.solve(_as_query(q), max_answers)


def prove_negation(p: Program, q, depth_limit: Optional[int] = None) -> Optional[Answer]:
    """Prove ``not q``; the answer's justification explains why ``q`` fails.

    ``q`` may be given positively or already wrapped in ``not``.  Returns
    ``None`` when ``q`` has a proof (the negation fails).
    """
    solver = compile_program(p, depth_limit or depth_limit_from_env())
    query = _as_query(q)
    if len(query.body) == 1 and isinstance(query.body[0], Naf):
        query = Query((query.body[0].literal,))
    for el in query.body:
        if isinstance(el, Naf):
            _check_naf_ground(el.literal)
    query = _rename_query(query, solver.counter)
    if solver.solve(query, max_answers=1):
        return None
    if len(query.body) == 1:
        lit = query.body[0]
        root = JustificationTree(Naf(lit), NAF_HOLDS, children=(solver.explain_failure(lit),))
    else:
        root = JustificationTree(
            Naf(QUERY_ROOT), NAF_HOLDS, children=(JustificationTree(QUERY_ROOT, FAILED, children=tuple(solver.explain_conjunction(query.body))),)
        )
    return Answer({}, model_of(root), root)


def classical_negation_constraints(p: Program) -> Tuple[Rule, ...]:
    """``:- p(X1..Xn), -p(X1..Xn).`` for every predicate used with both signs."""
    seen = {}
    for r in p.rules:
        lits = ([r.head] if r.head is not None else []) + [el.literal if isinstance(el, Naf) else el for el in r.body]
        for lit in lits:
            seen.setdefault((lit.predicate, lit.arity), set()).add(lit.negated)
    out = []
    for (name, n), signs in sorted(seen.items()):
        if signs == {True, False}:
            args = tuple(Var(f"X{i}") for i in range(1, n + 1))
            out.append(Rule(None, (Literal(name, args), Literal(name, args, negated=True))))
    return tuple(out)


def check_constraints(p: Program, constraints: Program = Program(), depth_limit: Optional[int] = None) -> List[ConstraintViolation]:
    """Every substitution that makes a headless rule's body provable against ``p``."""
    every = p.constraints + constraints.constraints + classical_negation_constraints(p + constraints)
    solver = compile_program(p, depth_limit or depth_limit_from_env())
    out = []
    for c in every:
        for ans in solver.solve(Query(c.body)):
            out.append(ConstraintViolation(c, ans.bindings, ans.justification))
    return out


# ---------------------------------------------------------------- tree utilities


def blamed_leaves(tree: JustificationTree) -> List[Literal]:
    """Innermost causes of a failure: missing literals and facts that made a NAF fail."""
    out: List[Literal] = []

    def proof_facts(t):
        if t.verdict == PROVED and not t.children and isinstance(t.literal, Literal):
            out.append(t.literal)
        for c in t.children:
            if c.verdict == PROVED:
                proof_facts(c)

    def visit(t):
        if t.verdict == FAILED and not t.children:
            out.append(t.literal)
        elif t.verdict == NAF_FAILS:
            for c in t.children:
                proof_facts(c)
        else:
            for c in t.children:
                visit(c)

    visit(tree)
    return list(dict.fromkeys(out))


def verify_proof(p: Program, tree: JustificationTree) -> bool:
    """Re-check a proved tree against the program's rules without any search.

    NAF leaves are accepted as assumptions (re-checking them needs search).
    """
    counter = itertools.count()

    def check(t: JustificationTree) -> bool:
        if t.verdict == NAF_HOLDS:
            return not t.children or all(c.verdict == FAILED for c in t.children)
        if t.verdict != PROVED:
            return False
        if t.literal == QUERY_ROOT and t.rule_used is None:
            return all(check(c) for c in t.children)
        if t.rule_used is None or not 0 <= t.rule_used < len(p.rules):
            return False
        rule = _rename(p.rules[t.rule_used], counter)
        if rule.head is None or len(rule.body) != len(t.children):
            return False
        s = unify_literals(rule.head, t.literal, {})
        if s is None:
            return False
        for el, child in zip(rule.body, t.children):
            if isinstance(el, Naf):
                if child.verdict != NAF_HOLDS or not isinstance(child.literal, Naf):
                    return False
                s = unify_literals(el.literal, child.literal.literal, s)
            else:
                if child.verdict != PROVED or not isinstance(child.literal, Literal):
                    return False
                s = unify_literals(el, child.literal, s)
            if s is None:
                return False
        return all(check(c) for c in t.children)

    return check(tree)
