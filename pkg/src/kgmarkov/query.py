"""A small SELECT query language over the triple store.

Grammar: ``SELECT ?v ... WHERE { pattern ... } [ORDER BY ?v]`` where each
pattern is three terms (variable, IRI, prefixed name, or literal in object
position) ended by ``.``.  Keywords are case-insensitive.  Evaluation uses
bag semantics: every join solution appears, duplicates included.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Optional, Union

from .errors import ToolkitError
from .rdf import (
    DATETIME,
    IRI_DATATYPES,
    Graph,
    Iri,
    Literal,
    Term,
    TermError,
    Triple,
    term_to_ntriples,
    unescape_lexical,
)
from .vocab import PrefixError, PrefixTable


class QueryError(ToolkitError):
    """Syntax or validity error in a query, with line:column position."""


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return f"Var(?{self.name})"


PatternTerm = Union[Var, Iri, Literal]


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> set[Var]:
        return {t for t in (self.subject, self.predicate, self.object) if isinstance(t, Var)}


@dataclass(frozen=True)
class Query:
    projection: tuple[Var, ...]
    patterns: tuple[TriplePattern, ...]
    order_by: Optional[Var] = None


@dataclass
class SolutionTable:
    """Query results: a projected variable header plus value rows."""

    variables: tuple[Var, ...]
    rows: list[tuple[Term, ...]]

    def __len__(self):
        return len(self.rows)

    def as_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([v.name for v in self.variables])
        for row in self.rows:
            writer.writerow([display_value(t) for t in row])
        return buf.getvalue()

    def as_table(self) -> str:
        header = [v.name for v in self.variables]
        body = [[display_value(t) for t in row] for row in self.rows]
        widths = [len(h) for h in header]
        for row in body:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], len(cell))
        lines = [
            "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
            "  ".join("-" * w for w in widths),
        ]
        for row in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        return "\n".join(lines) + "\n"


def display_value(term: Term) -> str:
    """Human-oriented rendering: IRIs by local name, dateTimes with a space."""
    if isinstance(term, Iri):
        return term.local_name()
    if term.datatype == DATETIME:
        return term.lexical.replace("T", " ")
    return term.lexical


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<lbrace>\{)
      | (?P<rbrace>\})
      | (?P<dot>\.)
      | (?P<dtsep>\^\^)
      | (?P<iriref><[^<>\s]*>)
      | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<literal>"(?:[^"\\\n]|\\.)*")
      | (?P<pname>[A-Za-z_][A-Za-z0-9_.\-]*:[A-Za-z_][A-Za-z0-9_.\-]*)
      | (?P<word>[A-Za-z]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int

    def place(self) -> str:
        return f"line {self.line}:{self.col}"


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise QueryError(f"line {line}:{col}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        tok_text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok_text, line, pos - line_start + 1))
        newlines = tok_text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok_text.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Stream:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self) -> _Token:
        return self._tokens[self._pos]

    def next(self) -> _Token:
        tok = self._tokens[self._pos]
        if tok.kind != "eof":
            self._pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise QueryError(f"{tok.place()}: expected {what}, found {tok.text!r}")
        return tok

    def expect_word(self, word: str) -> None:
        tok = self.next()
        if tok.kind != "word" or tok.text.upper() != word:
            raise QueryError(f"{tok.place()}: expected {word}, found {tok.text!r}")


def _resolve_pname(tok: _Token, prefixes: PrefixTable) -> Iri:
    try:
        return prefixes.resolve(tok.text)
    except PrefixError as exc:
        raise QueryError(f"{tok.place()}: {exc}") from None


def _parse_literal(stream: _Stream, tok: _Token, prefixes: PrefixTable) -> Literal:
    try:
        lexical = unescape_lexical(tok.text[1:-1])
    except TermError as exc:
        raise QueryError(f"{tok.place()}: {exc}") from None
    datatype = "string"
    if stream.peek().kind == "dtsep":
        stream.next()
        dt_tok = stream.next()
        if dt_tok.kind == "iriref":
            dt_iri = dt_tok.text[1:-1]
        elif dt_tok.kind == "pname":
            dt_iri = _resolve_pname(dt_tok, prefixes).value
        else:
            raise QueryError(f"{dt_tok.place()}: expected a datatype after ^^")
        if dt_iri not in IRI_DATATYPES:
            raise QueryError(f"{dt_tok.place()}: unsupported datatype IRI: {dt_iri}")
        datatype = IRI_DATATYPES[dt_iri]
    try:
        return Literal(lexical, datatype)
    except TermError as exc:
        raise QueryError(f"{tok.place()}: {exc}") from None


def _parse_pattern_term(stream: _Stream, prefixes: PrefixTable,
                        position: str) -> PatternTerm:
    tok = stream.next()
    if tok.kind == "var":
        return Var(tok.text[1:])
    if tok.kind == "iriref":
        try:
            return Iri(tok.text[1:-1])
        except TermError as exc:
            raise QueryError(f"{tok.place()}: {exc}") from None
    if tok.kind == "pname":
        return _resolve_pname(tok, prefixes)
    if tok.kind == "literal":
        if position != "object":
            raise QueryError(f"{tok.place()}: literals may only appear in object position")
        return _parse_literal(stream, tok, prefixes)
    raise QueryError(f"{tok.place()}: expected a {position} term, found {tok.text!r}")


def parse_query(text: str, prefixes: Optional[PrefixTable] = None) -> Query:
    """Parse query text into an AST, resolving prefixed names as it goes."""
    if prefixes is None:
        prefixes = PrefixTable()
    stream = _Stream(_tokenize(text))
    stream.expect_word("SELECT")
    projection: list[Var] = []
    while stream.peek().kind == "var":
        projection.append(Var(stream.next().text[1:]))
    if not projection:
        tok = stream.peek()
        raise QueryError(f"{tok.place()}: SELECT requires at least one variable")
    stream.expect_word("WHERE")
    stream.expect("lbrace", "'{'")
    patterns: list[TriplePattern] = []
    while stream.peek().kind != "rbrace":
        if stream.peek().kind == "eof":
            raise QueryError(f"{stream.peek().place()}: unterminated pattern block")
        subject = _parse_pattern_term(stream, prefixes, "subject")
        predicate = _parse_pattern_term(stream, prefixes, "predicate")
        obj = _parse_pattern_term(stream, prefixes, "object")
        patterns.append(TriplePattern(subject, predicate, obj))
        if stream.peek().kind == "dot":
            stream.next()
        elif stream.peek().kind != "rbrace":
            tok = stream.peek()
            raise QueryError(f"{tok.place()}: expected '.' between patterns")
    brace = stream.next()
    if not patterns:
        raise QueryError(f"{brace.place()}: pattern block must not be empty")
    order_by = None
    if stream.peek().kind == "word" and stream.peek().text.upper() == "ORDER":
        stream.next()
        stream.expect_word("BY")
        order_tok = stream.expect("var", "a variable after ORDER BY")
        order_by = Var(order_tok.text[1:])
    trailing = stream.peek()
    if trailing.kind != "eof":
        raise QueryError(f"{trailing.place()}: unexpected content after query: {trailing.text!r}")
    pattern_vars = set()
    for p in patterns:
        pattern_vars |= p.variables()
    for var in projection:
        if var not in pattern_vars:
            raise QueryError(f"projected variable ?{var.name} never occurs in a pattern")
    if order_by is not None and order_by not in pattern_vars:
        raise QueryError(f"ORDER BY variable ?{order_by.name} never occurs in a pattern")
    return Query(tuple(projection), tuple(patterns), order_by)


def _substitute(term: PatternTerm, binding: dict[Var, Term]) -> Optional[Term]:
    if isinstance(term, Var):
        return binding.get(term)
    return term


def _extend(binding: dict[Var, Term], pattern: TriplePattern,
            triple: Triple) -> Optional[dict[Var, Term]]:
    out = binding
    for term, value in (
        (pattern.subject, triple.subject),
        (pattern.predicate, triple.predicate),
        (pattern.object, triple.object),
    ):
        if isinstance(term, Var):
            bound = out.get(term)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[term] = value
            elif bound != value:
                return None
    return out


def evaluate(query: Query, graph: Graph) -> SolutionTable:
    """Join the patterns left to right against the graph and project.

    Output order is deterministic: rows sort by the ORDER BY variable's
    serialization when one is given (remaining ties by the projected row),
    otherwise by the serialization of the projected row itself.
    """
    bindings: list[dict[Var, Term]] = [{}]
    for pattern in query.patterns:
        grown: list[dict[Var, Term]] = []
        for binding in bindings:
            matches = graph.match(
                _substitute(pattern.subject, binding),
                _substitute(pattern.predicate, binding),
                _substitute(pattern.object, binding),
            )
            for triple in matches:
                extended = _extend(binding, pattern, triple)
                if extended is not None:
                    grown.append(extended)
        bindings = grown
        if not bindings:
            break

    def row_key(row: tuple[Term, ...]):
        return tuple(term_to_ntriples(t) for t in row)

    if query.order_by is not None:
        order_var = query.order_by
        bindings.sort(
            key=lambda b: (
                term_to_ntriples(b[order_var]),
                row_key(tuple(b[v] for v in query.projection)),
            )
        )
        rows = [tuple(b[v] for v in query.projection) for b in bindings]
    else:
        rows = sorted(
            (tuple(b[v] for v in query.projection) for b in bindings), key=row_key
        )
    return SolutionTable(query.projection, rows)
