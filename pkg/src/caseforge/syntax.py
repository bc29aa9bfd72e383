"""Reading and writing the ``.lp`` program text format.

Grammar (informal)::

    program  := (clause | query)*
    clause   := literal "."  |  literal ":-" body "."  |  ":-" body "."
    query    := "?-" body "."
    body     := element ("," element)*
    element  := "not" literal | literal
    literal  := ["-"] name ["(" term ("," term)* ")"]
    term     := atom | 'quoted atom' | Variable | integer
              | functor "(" term ("," term)* ")" | "[" [term ("," term)*] "]"

``%`` starts a comment running to the end of the line.  Inside quoted atoms a
single quote is written twice.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .logic import (
    Atom,
    Compound,
    Int,
    ListTerm,
    Literal,
    Naf,
    Program,
    Query,
    Rule,
    Term,
    Var,
    check_safety,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<quoted>'(?:[^']|'')*')
  | (?P<int>\d+)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>:-|\?-|[()\[\],.\-])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == "'":
                raise ParseError("unterminated quoted atom", line, pos - line_start + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{msg} (found {found!r})", tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "punct" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(f"expected {text!r}")

    # -- terms

    def name_token(self) -> Optional[str]:
        tok = self.tok
        if tok.kind == "name":
            self.i += 1
            return tok.text
        if tok.kind == "quoted":
            self.i += 1
            return tok.text[1:-1].replace("''", "'")
        return None

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            self.i += 1
            return Var(tok.text)
        if tok.kind == "int":
            self.i += 1
            return Int(int(tok.text))
        if tok.kind == "punct" and tok.text == "-" and self.toks[self.i + 1].kind == "int":
            self.i += 2
            return Int(-int(self.toks[self.i - 1].text))
        if self.accept("["):
            elems = []
            if not self.accept("]"):
                elems.append(self.term())
                while self.accept(","):
                    elems.append(self.term())
                self.expect("]")
            return ListTerm(tuple(elems))
        name = self.name_token()
        if name is None:
            self.error("expected a term")
        if self.accept("("):
            return Compound(name, self.args())
        return Atom(name)

    def args(self) -> Tuple[Term, ...]:
        out = [self.term()]
        while self.accept(","):
            out.append(self.term())
        self.expect(")")
        return tuple(out)

    # -- literals and clauses

    def literal(self) -> Literal:
        negated = self.accept("-")
        tok = self.tok
        if tok.kind != "name" or tok.text == "not":
            self.error("expected a predicate name")
        self.i += 1
        args = self.args() if self.accept("(") else ()
        return Literal(tok.text, args, negated)

    def element(self):
        tok = self.tok
        nxt = self.toks[self.i + 1]
        if tok.kind == "name" and tok.text == "not" and not (nxt.kind == "punct" and nxt.text in "(.,"):
            self.i += 1
            return Naf(self.literal())
        return self.literal()

    def body(self):
        out = [self.element()]
        while self.accept(","):
            out.append(self.element())
        return tuple(out)

    def program(self) -> Program:
        rules, queries = [], []
        while self.tok.kind != "eof":
            start = self.tok
            if self.accept("?-"):
                queries.append(Query(self.body()))
                self.expect(".")
                continue
            if self.accept(":-"):
                rule = Rule(None, self.body())
            else:
                head = self.literal()
                body = self.body() if self.accept(":-") else ()
                rule = Rule(head, body)
            self.expect(".")
            try:
                check_safety(rule)
            except Exception as exc:
                exc.line, exc.column = start.line, start.col
                raise
            rules.append(rule)
        return Program(tuple(rules), tuple(queries))


def parse_program(text: str) -> Program:
    """Parse program text; raises :class:`ParseError` or ``SafetyError``."""
    return _Parser(text).program()


def parse_query(text: str) -> Query:
    """Parse a query with or without the leading ``?-`` and trailing ``.``."""
    text = text.strip()
    if not text.startswith("?-"):
        text = "?- " + text
    if not text.endswith("."):
        text += "."
    prog = parse_program(text)
    if prog.rules or len(prog.queries) != 1:
        raise ParseError("expected exactly one query", 1, 1)
    return prog.queries[0]


def parse_literal(text: str) -> Literal:
    (el,) = parse_query(text).body
    if not isinstance(el, Literal):
        raise ParseError("expected a positive literal", 1, 1)
    return el


# ---------------------------------------------------------------- printing


def render_rule(rule: Rule) -> str:
    head = str(rule.head) if rule.head is not None else ""
    if not rule.body:
        return head + "."
    lead = f"{head} :-" if head else ":-"
    return lead + "\n" + ",\n".join("    " + str(el) for el in rule.body) + "."


def render_program(p: Program) -> str:
    lines = [render_rule(r) for r in p.rules]
    lines.extend(str(q) for q in p.queries)
    return "".join(line + "\n" for line in lines)
