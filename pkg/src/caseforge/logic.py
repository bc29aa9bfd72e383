"""Terms, literals, rules and first-order unification.

Everything here is an immutable value.  A substitution is a plain ``dict``
mapping :class:`Var` to :class:`Term`; the functions below never mutate the
dict they are given and always return idempotent substitutions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union

ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*\Z")

NEG_PREFIX = "neg$"


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return format_atom(self.name)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name.split("#", 1)[0]

    @property
    def is_local(self) -> bool:
        # `_` and `_Foo` style variables may stay unbound inside `not`.
        return self.name.startswith("_")


@dataclass(frozen=True)
class Int:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Compound:
    functor: str
    args: Tuple["Term", ...]

    def __str__(self):
        return f"{format_atom(self.functor)}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class ListTerm:
    elements: Tuple["Term", ...]

    def __str__(self):
        return "[" + ", ".join(map(str, self.elements)) + "]"


Term = Union[Atom, Var, Int, Compound, ListTerm]
Substitution = Dict[Var, Term]


def format_atom(name: str) -> str:
    if ATOM_RE.match(name) and name != "not":
        return name
    return "'" + name.replace("'", "''") + "'"


@dataclass(frozen=True)
class Literal:
    """``p(t1, ..., tn)`` or, with ``negated=True``, its classical negation ``-p(...)``."""

    predicate: str
    args: Tuple[Term, ...] = ()
    negated: bool = False

    def __post_init__(self):
        if not ATOM_RE.match(self.predicate) or self.predicate == "not":
            raise ValueError(f"bad predicate name {self.predicate!r}")

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> Tuple[str, int]:
        """Predicate signature used for indexing; ``-p/n`` is renamed to ``neg$p/n``."""
        name = NEG_PREFIX + self.predicate if self.negated else self.predicate
        return name, len(self.args)

    @property
    def indicator(self) -> str:
        return "%s/%d" % self.key

    def __str__(self):
        sign = "-" if self.negated else ""
        if not self.args:
            return sign + self.predicate
        return f"{sign}{self.predicate}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Naf:
    """Default negation ``not L`` of a body literal."""

    literal: Literal

    def __str__(self):
        return f"not {self.literal}"


BodyElement = Union[Literal, Naf]


@dataclass(frozen=True)
class Rule:
    head: Optional[Literal]
    body: Tuple[BodyElement, ...] = ()

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body


@dataclass(frozen=True)
class Query:
    body: Tuple[BodyElement, ...]

    def __str__(self):
        return "?- " + ", ".join(map(str, self.body)) + "."


@dataclass(frozen=True)
class Program:
    rules: Tuple[Rule, ...] = ()
    queries: Tuple[Query, ...] = ()

    def __add__(self, other: "Program") -> "Program":
        return Program(self.rules + other.rules, self.queries + other.queries)

    @property
    def constraints(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.head is None)

    def facts(self) -> Iterator[Literal]:
        for r in self.rules:
            if r.is_fact:
                yield r.head


class SafetyError(ValueError):
    def __init__(self, rule: Rule, variable: Var):
        self.rule = rule
        self.variable = variable
        super().__init__(f"unsafe variable {variable} in rule: {render_rule_inline(rule)}")


def render_rule_inline(rule: Rule) -> str:
    head = str(rule.head) if rule.head is not None else ""
    if not rule.body:
        return head + "."
    lead = f"{head} :-" if head else ":-"
    return f"{lead} {', '.join(map(str, rule.body))}."


# ---------------------------------------------------------------- conversions


def literal_to_term(lit: Literal) -> Term:
    """Literals used as arguments (e.g. a claim predicate inside ``claimStmt``)."""
    name = NEG_PREFIX + lit.predicate if lit.negated else lit.predicate
    if not lit.args:
        return Atom(name)
    return Compound(name, lit.args)


def term_to_literal(term: Term) -> Literal:
    if isinstance(term, Atom):
        name, args = term.name, ()
    elif isinstance(term, Compound):
        name, args = term.functor, term.args
    else:
        raise TypeError(f"{term} cannot be used as a literal")
    if name.startswith(NEG_PREFIX):
        return Literal(name[len(NEG_PREFIX):], args, negated=True)
    return Literal(name, args)


# ---------------------------------------------------------------- variables


def term_vars(term: Term) -> Iterator[Var]:
    """Variables of a term, left to right, with repetitions."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))
        elif isinstance(t, ListTerm):
            stack.extend(reversed(t.elements))


def literal_vars(lit: Union[Literal, Naf]) -> Iterator[Var]:
    if isinstance(lit, Naf):
        lit = lit.literal
    for a in lit.args:
        yield from term_vars(a)


def unique_vars(items: Iterable[Union[Literal, Naf]]) -> Tuple[Var, ...]:
    seen = {}
    for it in items:
        for v in literal_vars(it):
            seen.setdefault(v, None)
    return tuple(seen)


def is_ground(x: Union[Term, Literal, Naf]) -> bool:
    if isinstance(x, (Literal, Naf)):
        return next(literal_vars(x), None) is None
    return next(term_vars(x), None) is None


def check_safety(rule: Rule) -> None:
    """Raise :class:`SafetyError` unless every head/NAF variable has a positive binder."""
    bound = set()
    for el in rule.body:
        if isinstance(el, Literal):
            bound.update(literal_vars(el))
    if rule.head is not None:
        for v in literal_vars(rule.head):
            if v not in bound:
                raise SafetyError(rule, v)
    for el in rule.body:
        if isinstance(el, Naf):
            for v in literal_vars(el):
                if v not in bound and not v.is_local:
                    raise SafetyError(rule, v)


# ---------------------------------------------------------------- substitution


def apply_subst(s: Substitution, t: Term) -> Term:
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(apply_subst(s, a) for a in t.args))
    if isinstance(t, ListTerm):
        return ListTerm(tuple(apply_subst(s, a) for a in t.elements))
    return t


def apply_literal(s: Substitution, lit):
    if isinstance(lit, Naf):
        return Naf(apply_literal(s, lit.literal))
    if not s or not lit.args:
        return lit
    return Literal(lit.predicate, tuple(apply_subst(s, a) for a in lit.args), lit.negated)


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """Substitution equivalent to applying ``s1`` first, then ``s2``."""
    out = {}
    for v, t in s1.items():
        t2 = apply_subst(s2, t)
        if t2 != v:
            out[v] = t2
    for v, t in s2.items():
        if v not in s1 and t != v:
            out[v] = t
    return out


def occurs(v: Var, t: Term) -> bool:
    return any(x == v for x in term_vars(t))


def unify(a: Term, b: Term, s: Optional[Substitution] = None) -> Optional[Substitution]:
    """Most general unifier of ``a`` and ``b`` extending ``s``, or ``None``.

    The occurs check is always on.  ``s`` must be idempotent; so is the result.
    """
    s = dict(s) if s else {}
    pending = [(a, b)]
    while pending:
        x, y = pending.pop()
        while isinstance(x, Var) and x in s:
            x = s[x]
        while isinstance(y, Var) and y in s:
            y = s[y]
        if x == y:
            continue
        if isinstance(x, Var) or isinstance(y, Var):
            if not isinstance(x, Var):
                x, y = y, x
            y = apply_subst(s, y)
            if occurs(x, y):
                return None
            step = {x: y}
            s = {k: apply_subst(step, t) for k, t in s.items()}
            s[x] = y
        elif isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            pending.extend(zip(x.args, y.args))
        elif isinstance(x, ListTerm) and isinstance(y, ListTerm):
            if len(x.elements) != len(y.elements):
                return None
            pending.extend(zip(x.elements, y.elements))
        else:
            return None
    return s


def unify_literals(a: Literal, b: Literal, s: Optional[Substitution] = None) -> Optional[Substitution]:
    if a.key != b.key:
        return None
    return unify(ListTerm(a.args), ListTerm(b.args), s)


def is_variant(a, b) -> bool:
    """True iff ``a`` and ``b`` are equal up to a bijective renaming of variables."""
    if isinstance(a, Literal):
        if not isinstance(b, Literal) or a.key != b.key:
            return False
        a, b = ListTerm(a.args), ListTerm(b.args)
    fwd: Dict[Var, Var] = {}
    back: Dict[Var, Var] = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if isinstance(x, Var):
            if not isinstance(y, Var):
                return False
            if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
                return False
        elif isinstance(x, Compound):
            if not isinstance(y, Compound) or x.functor != y.functor or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
        elif isinstance(x, ListTerm):
            if not isinstance(y, ListTerm) or len(x.elements) != len(y.elements):
                return False
            stack.extend(zip(x.elements, y.elements))
        elif x != y:
            return False
    return True
