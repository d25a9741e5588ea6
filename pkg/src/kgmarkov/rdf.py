"""In-memory RDF triple store with a small N-Triples reader and writer.

The store covers exactly what the rest of the package needs: IRI nodes,
typed literals in four XSD datatypes (string, integer, decimal, dateTime),
triple insertion with set semantics, and indexed pattern matching.  Blank
nodes, language tags, and named graphs are out of scope and rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal
from typing import Iterable, Iterator, Optional, Union

from .errors import ToolkitError

XSD_NS = "http://www.w3.org/2001/XMLSchema#"

STRING = "string"
INTEGER = "integer"
DECIMAL = "decimal"
DATETIME = "dateTime"

DATATYPES = (STRING, INTEGER, DECIMAL, DATETIME)

DATATYPE_IRIS = {name: XSD_NS + name for name in DATATYPES}
IRI_DATATYPES = {iri: name for name, iri in DATATYPE_IRIS.items()}

_INTEGER_RE = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_RE = re.compile(r"^[+-]?([0-9]+\.?[0-9]*|\.[0-9]+)$")
_DATETIME_RE = re.compile(r"^[0-9]{4}-[0-9]{2}-[0-9]{2}T[0-9]{2}:[0-9]{2}:[0-9]{2}$")
# characters an IRIREF may not contain per the N-Triples grammar
_IRI_BAD_RE = re.compile(r'[\x00-\x20<>"{}|^`\\]')


class TermError(ToolkitError):
    """A node or literal failed validation."""


class NTriplesError(ToolkitError):
    """Malformed N-Triples input.  Carries the 1-based line number."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class Iri:
    """An absolute IRI node."""

    value: str

    def __post_init__(self):
        if not self.value:
            raise TermError("IRI must be non-empty")
        if _IRI_BAD_RE.search(self.value):
            raise TermError(f"IRI contains a forbidden character: {self.value!r}")
        if ":" not in self.value:
            raise TermError(f"IRI must contain a scheme separator: {self.value!r}")

    def local_name(self) -> str:
        """Text after the last '#' or '/', used for display and state labels."""
        return re.split(r"[#/]", self.value)[-1]

    def __repr__(self):
        return f"Iri({self.value!r})"


@dataclass(frozen=True)
class Literal:
    """A typed literal.  The lexical form must be valid for the datatype."""

    lexical: str
    datatype: str = STRING

    def __post_init__(self):
        if self.datatype not in DATATYPES:
            raise TermError(f"unsupported datatype: {self.datatype!r}")
        if self.datatype == INTEGER and not _INTEGER_RE.match(self.lexical):
            raise TermError(f"bad integer lexical form: {self.lexical!r}")
        if self.datatype == DECIMAL and not _DECIMAL_RE.match(self.lexical):
            raise TermError(f"bad decimal lexical form: {self.lexical!r}")
        if self.datatype == DATETIME:
            if not _DATETIME_RE.match(self.lexical):
                raise TermError(f"bad dateTime lexical form: {self.lexical!r}")
            try:
                datetime.strptime(self.lexical, "%Y-%m-%dT%H:%M:%S")
            except ValueError:
                raise TermError(f"bad dateTime value: {self.lexical!r}") from None

    def to_python(self) -> Union[str, int, float, datetime]:
        if self.datatype == INTEGER:
            return int(self.lexical)
        if self.datatype == DECIMAL:
            return float(self.lexical)
        if self.datatype == DATETIME:
            return datetime.strptime(self.lexical, "%Y-%m-%dT%H:%M:%S")
        return self.lexical

    def __repr__(self):
        return f"Literal({self.lexical!r}, {self.datatype})"


Term = Union[Iri, Literal]


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, Iri):
            raise TermError("triple subject must be an IRI")
        if not isinstance(self.predicate, Iri):
            raise TermError("triple predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal)):
            raise TermError("triple object must be an IRI or literal")


def string_literal(value: str) -> Literal:
    return Literal(value, STRING)


def integer_literal(value: int) -> Literal:
    return Literal(str(int(value)), INTEGER)


def decimal_literal(value) -> Literal:
    """Build an xsd:decimal literal from a float or Decimal.

    Floats go through repr() so the lexical form round-trips to the exact
    same float, then through Decimal to force plain (non-exponent) notation,
    which xsd:decimal requires.
    """
    if isinstance(value, Decimal):
        dec = value
    else:
        dec = Decimal(repr(float(value)))
    return Literal(format(dec, "f"), DECIMAL)


def datetime_literal(value: datetime) -> Literal:
    return Literal(value.strftime("%Y-%m-%dT%H:%M:%S"), DATETIME)


_ESCAPE_MAP = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPE_MAP = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def escape_lexical(text: str) -> str:
    return "".join(_ESCAPE_MAP.get(ch, ch) for ch in text)


def unescape_lexical(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text):
                raise TermError("dangling backslash in literal")
            nxt = text[i + 1]
            if nxt not in _UNESCAPE_MAP:
                raise TermError(f"unknown escape sequence: \\{nxt}")
            out.append(_UNESCAPE_MAP[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def term_to_ntriples(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    body = f'"{escape_lexical(term.lexical)}"'
    return f"{body}^^<{DATATYPE_IRIS[term.datatype]}>"


def triple_to_ntriples(triple: Triple) -> str:
    return (
        f"{term_to_ntriples(triple.subject)} "
        f"{term_to_ntriples(triple.predicate)} "
        f"{term_to_ntriples(triple.object)} ."
    )


def _sort_key(triple: Triple):
    return (
        term_to_ntriples(triple.subject),
        term_to_ntriples(triple.predicate),
        term_to_ntriples(triple.object),
    )


class Graph:
    """A set of triples with subject, predicate, and object indexes."""

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set()
        self._by_subject: dict[Iri, set[Triple]] = {}
        self._by_predicate: dict[Iri, set[Triple]] = {}
        self._by_object: dict[Term, set[Triple]] = {}
        for t in triples:
            self.insert(t)

    def insert(self, triple: Triple) -> bool:
        """Add a triple.  Returns False if it was already present."""
        if not isinstance(triple, Triple):
            raise TermError("can only insert Triple instances")
        if triple in self._triples:
            return False
        self._triples.add(triple)
        self._by_subject.setdefault(triple.subject, set()).add(triple)
        self._by_predicate.setdefault(triple.predicate, set()).add(triple)
        self._by_object.setdefault(triple.object, set()).add(triple)
        return True

    def update(self, triples: Iterable[Triple]) -> int:
        """Insert many triples; returns how many were new."""
        return sum(1 for t in triples if self.insert(t))

    def match(
        self,
        subject: Optional[Iri] = None,
        predicate: Optional[Iri] = None,
        object: Optional[Term] = None,
    ) -> list[Triple]:
        """All triples matching the given terms (None is a wildcard).

        Results come back in a deterministic order, sorted by the N-Triples
        serialization of subject, then predicate, then object.
        """
        smallest: Optional[set[Triple]] = None
        for key, index in (
            (subject, self._by_subject),
            (predicate, self._by_predicate),
            (object, self._by_object),
        ):
            if key is not None:
                bucket = index.get(key, set())
                if smallest is None or len(bucket) < len(smallest):
                    smallest = bucket
        candidates = self._triples if smallest is None else smallest
        found = [
            t
            for t in candidates
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
            and (object is None or t.object == object)
        ]
        found.sort(key=_sort_key)
        return found

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def copy(self) -> "Graph":
        return Graph(self._triples)


def serialize_ntriples(graph: Graph) -> str:
    """Render a graph as N-Triples text, one sorted line per triple."""
    lines = [triple_to_ntriples(t) for t in sorted(graph, key=_sort_key)]
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def _parse_iriref(text: str, pos: int, line_no: int) -> tuple[Iri, int]:
    if pos >= len(text) or text[pos] != "<":
        raise NTriplesError(line_no, f"expected '<' at column {pos + 1}")
    end = text.find(">", pos + 1)
    if end == -1:
        raise NTriplesError(line_no, "unterminated IRI")
    raw = text[pos + 1 : end]
    try:
        iri = Iri(raw)
    except TermError as exc:
        raise NTriplesError(line_no, str(exc)) from None
    return iri, end + 1


def _parse_literal(text: str, pos: int, line_no: int) -> tuple[Literal, int]:
    # scan for the closing quote, honoring backslash escapes
    i = pos + 1
    while i < len(text):
        if text[i] == "\\":
            i += 2
            continue
        if text[i] == '"':
            break
        i += 1
    else:
        raise NTriplesError(line_no, "unterminated literal")
    if i >= len(text):
        raise NTriplesError(line_no, "unterminated literal")
    try:
        lexical = unescape_lexical(text[pos + 1 : i])
    except TermError as exc:
        raise NTriplesError(line_no, str(exc)) from None
    i += 1
    datatype = STRING
    if text.startswith("^^", i):
        dt_iri, i = _parse_iriref(text, i + 2, line_no)
        if dt_iri.value not in IRI_DATATYPES:
            raise NTriplesError(line_no, f"unsupported datatype IRI: {dt_iri.value}")
        datatype = IRI_DATATYPES[dt_iri.value]
    try:
        lit = Literal(lexical, datatype)
    except TermError as exc:
        raise NTriplesError(line_no, str(exc)) from None
    return lit, i


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in " \t":
        pos += 1
    return pos


def parse_ntriples(text: str) -> Graph:
    """Parse N-Triples text into a Graph.

    Accepts blank lines and '#' comment lines.  The first malformed line
    aborts the parse with an NTriplesError naming that line.
    """
    graph = Graph()
    for line_no, raw_line in enumerate(text.split("\n"), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        pos = 0
        subject, pos = _parse_iriref(line, pos, line_no)
        pos = _skip_ws(line, pos)
        predicate, pos = _parse_iriref(line, pos, line_no)
        pos = _skip_ws(line, pos)
        if pos < len(line) and line[pos] == '"':
            obj, pos = _parse_literal(line, pos, line_no)
        elif pos < len(line) and line[pos] == "<":
            obj, pos = _parse_iriref(line, pos, line_no)
        elif pos < len(line) and line[pos] == "_":
            raise NTriplesError(line_no, "blank nodes are not supported")
        else:
            raise NTriplesError(line_no, "expected an IRI or literal object")
        pos = _skip_ws(line, pos)
        if pos >= len(line) or line[pos] != ".":
            raise NTriplesError(line_no, "expected terminating '.'")
        pos = _skip_ws(line, pos + 1)
        if pos != len(line):
            raise NTriplesError(line_no, "trailing content after '.'")
        graph.insert(Triple(subject, predicate, obj))
    return graph
