"""Brute-force stable models, used to cross-check the goal-directed engine.

Every candidate interpretation over the ground atom base is tested against
the Gelfond-Lifschitz reduct: a candidate ``M`` is stable iff the least model
of ``P^M`` equals ``M``.  Candidates are restricted to subsets of rule heads
(a stable model never contains an atom without a supporting rule) and are
processed as one vectorised batch of bitmasks.
"""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, List, Set, Tuple

import numpy as np

from .logic import (
    Atom,
    Literal,
    Naf,
    Program,
    Rule,
    Term,
    apply_literal,
    is_ground,
    literal_vars,
    term_vars,
)

DEFAULT_ATOM_BUDGET = 16


class AtomBudgetExceeded(ValueError):
    pass


def _constants(p: Program) -> List[Term]:
    out: Dict[Term, None] = {}
    for r in p.rules:
        lits = ([r.head] if r.head is not None else []) + [el.literal if isinstance(el, Naf) else el for el in r.body]
        for lit in lits:
            for a in lit.args:
                if next(term_vars(a), None) is None:
                    out.setdefault(a, None)
    return list(out)


def ground_program(p: Program) -> List[Rule]:
    """Instantiate every rule over the program's own ground argument terms.

    Variables local to a ``not`` (``_``-prefixed, not bound positively) are
    read as "no instance exists", so ``not q(_)`` expands into one NAF
    literal per constant.
    """
    universe = _constants(p)
    out: List[Rule] = []
    for r in p.rules:
        positive_vars = {v for el in r.body if isinstance(el, Literal) for v in literal_vars(el)}
        head_vars = set(literal_vars(r.head)) if r.head is not None else set()
        outer = sorted(positive_vars | head_vars, key=lambda v: v.name)
        for combo in itertools.product(universe, repeat=len(outer)):
            s = dict(zip(outer, combo))
            body = []
            for el in r.body:
                inst = apply_literal(s, el)
                if isinstance(inst, Naf) and not is_ground(inst):
                    local = sorted(set(literal_vars(inst)), key=lambda v: v.name)
                    for combo2 in itertools.product(universe, repeat=len(local)):
                        body.append(apply_literal(dict(zip(local, combo2)), inst))
                else:
                    body.append(inst)
            head = apply_literal(s, r.head) if r.head is not None else None
            out.append(Rule(head, tuple(body)))
    return out


def brute_force_stable_models(p: Program, atom_budget: int = DEFAULT_ATOM_BUDGET) -> Set[FrozenSet[Literal]]:
    rules = ground_program(p)
    atoms: Dict[Literal, int] = {}
    for r in rules:
        if r.head is not None:
            atoms.setdefault(r.head, len(atoms))
    for r in rules:
        for el in r.body:
            atoms.setdefault(el.literal if isinstance(el, Naf) else el, len(atoms))
    if len(atoms) > atom_budget:
        raise AtomBudgetExceeded(f"{len(atoms)} ground atoms exceed the budget of {atom_budget}")
    if len(atoms) > 62:
        raise AtomBudgetExceeded("at most 62 ground atoms are supported")

    def mask(lits) -> int:
        m = 0
        for lit in lits:
            m |= 1 << atoms[lit]
        return m

    compiled: List[Tuple[int, int, int]] = []
    constraints: List[Tuple[int, int]] = []
    for r in rules:
        pos = mask(el for el in r.body if isinstance(el, Literal))
        neg = mask(el.literal for el in r.body if isinstance(el, Naf))
        if r.head is None:
            constraints.append((pos, neg))
        else:
            compiled.append((1 << atoms[r.head], pos, neg))
    # classical negation: p and -p may not hold together
    for lit, i in atoms.items():
        if lit.negated:
            twin = Literal(lit.predicate, lit.args)
            if twin in atoms:
                constraints.append(((1 << i) | (1 << atoms[twin]), 0))

    head_bits = sorted({h.bit_length() - 1 for h, _, _ in compiled})
    count = 1 << len(head_bits)
    idx = np.arange(count, dtype=np.uint64)
    cand = np.zeros(count, dtype=np.uint64)
    for j, b in enumerate(head_bits):
        cand |= ((idx >> np.uint64(j)) & np.uint64(1)) << np.uint64(b)

    least = np.zeros(count, dtype=np.uint64)
    arrays = [(np.uint64(h), np.uint64(pos), np.uint64(neg)) for h, pos, neg in compiled]
    zero = np.uint64(0)
    while True:
        nxt = least.copy()
        for h, pos, neg in arrays:
            fires = ((cand & neg) == zero) & ((nxt & pos) == pos)
            nxt[fires] |= h
        if np.array_equal(nxt, least):
            break
        least = nxt
    ok = least == cand
    for pos, neg in constraints:
        pos_, neg_ = np.uint64(pos), np.uint64(neg)
        ok &= ~(((cand & pos_) == pos_) & ((cand & neg_) == zero))

    by_bit = {i: lit for lit, i in atoms.items()}
    models = set()
    for m in cand[ok]:
        m = int(m)
        models.add(frozenset(by_bit[i] for i in range(len(atoms)) if m >> i & 1))
    return models


# ---------------------------------------------------------------- random programs

_PREDICATES = ("p", "q", "r", "s", "t", "u", "v", "w")
_CONSTANTS = ("a", "b")


def random_stratified_program(rng, max_atoms: int = 12, max_rules: int = 20) -> Program:
    """A random ground stratified program drawn from ``rng`` (a ``random.Random``).

    Every predicate gets a stratum; positive body atoms come from the same or
    a lower stratum (so positive loops occur), negated ones from strictly
    lower strata.  Predicates are a mix of propositional and unary over two
    constants, so the atom base never exceeds ``max_atoms``.
    """
    atoms: List[Literal] = []
    for name in rng.sample(_PREDICATES, len(_PREDICATES)):
        arity = rng.choice((0, 0, 1))
        new = [Literal(name)] if arity == 0 else [Literal(name, (Atom(c),)) for c in _CONSTANTS]
        if len(atoms) + len(new) > max_atoms:
            break
        atoms.extend(new)
    preds = sorted({a.predicate for a in atoms})
    level = {p: rng.randrange(0, 3) for p in preds}
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(atoms)
        lv = level[head.predicate]
        same_or_lower = [a for a in atoms if level[a.predicate] <= lv]
        lower = [a for a in atoms if level[a.predicate] < lv]
        body: List = []
        for _ in range(rng.choice((0, 0, 1, 1, 2, 3))):
            body.append(rng.choice(same_or_lower))
        if lower:
            for _ in range(rng.choice((0, 0, 1, 2))):
                body.append(Naf(rng.choice(lower)))
        rules.append(Rule(head, tuple(dict.fromkeys(body))))
    return Program(tuple(rules))


def engine_discrepancies(p: Program) -> List[Tuple[Literal, bool, bool]]:
    """Ground atoms on which the goal-directed engine and the oracle disagree.

    ``p`` must be stratified, so the oracle yields exactly one model.  Each
    entry is ``(atom, derivable_by_engine, in_oracle_model)``.
    """
    from .engine import solve

    models = brute_force_stable_models(p)
    if len(models) != 1:
        raise ValueError(f"expected one stable model, found {len(models)}")
    (model,) = models
    atoms: Dict[Literal, None] = {}
    for r in ground_program(p):
        for el in ((r.head,) if r.head is not None else ()) + r.body:
            atoms.setdefault(el.literal if isinstance(el, Naf) else el, None)
    out = []
    for atom in atoms:
        derived = bool(solve(p, atom, max_answers=1))
        if derived != (atom in model):
            out.append((atom, derived, atom in model))
    return out
