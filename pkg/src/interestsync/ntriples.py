"""N-Triples parsing and canonical serialization.

Covers the W3C grammar subset needed for changeset files: IRIs, blank
nodes, plain/typed/language-tagged literals, full-line comments. Blank
node labels are skolemized at parse time into ``urn:skolem:<doc>:<label>``
IRIs so that every parsed graph is ground and document-scoped labels can
never collide across files.

Serialization is canonical: one line per triple, lines sorted
lexicographically, so equal graphs always serialize to identical bytes.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .terms import BlankNode, Graph, Iri, Literal, Term, Triple, iri

SKOLEM_PREFIX = "urn:skolem:"


class NTriplesSyntaxError(ValueError):
    """Malformed N-Triples input. Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class ParseReport:
    """Outcome of a lenient parse: how many lines were dropped and why."""

    total_lines: int = 0
    triple_lines: int = 0
    skipped_lines: int = 0
    errors: List[NTriplesSyntaxError] = field(default_factory=list)


_ESCAPES = {
    "t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
    '"': '"', "'": "'", "\\": "\\",
}

_PN_CHARS = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-."
)


class _LineScanner:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> NTriplesSyntaxError:
        return NTriplesSyntaxError(message, self.lineno, self.pos + 1)

    def skip_ws(self):
        text, n = self.text, len(self.text)
        while self.pos < n and text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def _unescape(self, raw: str, what: str) -> str:
        if "\\" not in raw:
            return raw
        out = []
        i, n = 0, len(raw)
        while i < n:
            c = raw[i]
            if c != "\\":
                out.append(c)
                i += 1
                continue
            if i + 1 >= n:
                raise self.error(f"dangling escape in {what}")
            e = raw[i + 1]
            if e in _ESCAPES:
                out.append(_ESCAPES[e])
                i += 2
            elif e == "u" or e == "U":
                width = 4 if e == "u" else 8
                hexpart = raw[i + 2 : i + 2 + width]
                if len(hexpart) != width:
                    raise self.error(f"truncated \\{e} escape in {what}")
                try:
                    out.append(chr(int(hexpart, 16)))
                except ValueError:
                    raise self.error(f"invalid \\{e} escape in {what}") from None
                i += 2 + width
            else:
                raise self.error(f"unknown escape \\{e} in {what}")
        return "".join(out)

    def read_iri(self) -> Iri:
        self.expect("<")
        start = self.pos
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c == ">":
                raw = text[start : self.pos]
                self.pos += 1
                return iri(self._unescape(raw, "IRI"))
            if c in ' "{}|^`' or ord(c) <= 0x20:
                raise self.error(f"character {c!r} not allowed inside IRI")
            self.pos += 1
        raise self.error("unterminated IRI")

    def read_blank_label(self) -> str:
        self.expect("_")
        self.expect(":")
        start = self.pos
        text = self.text
        while self.pos < len(text) and text[self.pos] in _PN_CHARS:
            self.pos += 1
        if self.pos == start:
            raise self.error("empty blank node label")
        label = text[start : self.pos]
        if label.endswith("."):
            # The terminating dot of the statement is not part of the label.
            label = label.rstrip(".")
            self.pos -= len(text[start : self.pos]) - len(label)
        return label

    def read_literal(self) -> Literal:
        self.expect('"')
        start = self.pos
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c == "\\":
                self.pos += 2
                continue
            if c == '"':
                raw = text[start : self.pos]
                self.pos += 1
                lexical = self._unescape(raw, "literal")
                if self.peek() == "@":
                    self.pos += 1
                    tstart = self.pos
                    while self.pos < len(text) and (text[self.pos].isalnum() or text[self.pos] == "-"):
                        self.pos += 1
                    if self.pos == tstart:
                        raise self.error("empty language tag")
                    return Literal(lexical, language=text[tstart : self.pos])
                if text.startswith("^^", self.pos):
                    self.pos += 2
                    return Literal(lexical, datatype=self.read_iri())
                return Literal(lexical)
            self.pos += 1
        raise self.error("unterminated literal")


def _parse_line(scanner: _LineScanner, skolem: dict, doc_id: str) -> Optional[Triple]:
    scanner.skip_ws()
    c = scanner.peek()
    if c == "" or c == "#":
        return None

    def term(position: str) -> Term:
        ch = scanner.peek()
        if ch == "<":
            return scanner.read_iri()
        if ch == "_":
            label = scanner.read_blank_label()
            skolemized = skolem.get(label)
            if skolemized is None:
                skolemized = skolem[label] = iri(f"{SKOLEM_PREFIX}{doc_id}:{label}")
            return skolemized
        if ch == '"':
            if position != "object":
                raise scanner.error(f"literal not allowed as {position}")
            return scanner.read_literal()
        raise scanner.error(f"expected a term as {position}")

    subject = term("subject")
    scanner.skip_ws()
    predicate = term("predicate")
    if not isinstance(predicate, Iri):
        raise scanner.error("predicate must be an IRI")
    scanner.skip_ws()
    obj = term("object")
    scanner.skip_ws()
    scanner.expect(".")
    scanner.skip_ws()
    if scanner.peek() not in ("", "#"):
        raise scanner.error("trailing content after statement")
    return Triple(subject, predicate, obj)


def parse_ntriples_report(
    data: Union[str, bytes],
    strict: bool = True,
    doc_id: Optional[str] = None,
) -> Tuple[Graph, ParseReport]:
    """Parse N-Triples text, returning the graph and a parse report.

    In strict mode the first malformed line raises. In lenient mode
    malformed lines are skipped and counted (real changeset feeds contain
    the occasional truncated statement).
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if doc_id is None:
        doc_id = uuid.uuid4().hex
    skolem: dict = {}
    report = ParseReport()
    triples = []
    # Split on newlines only: characters like U+0085 or U+2028 are legal
    # inside literals and must not be treated as statement terminators.
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        if line.endswith("\r"):
            line = line[:-1]
        report.total_lines += 1
        scanner = _LineScanner(line, lineno)
        try:
            t = _parse_line(scanner, skolem, doc_id)
        except NTriplesSyntaxError as exc:
            if strict:
                raise
            report.skipped_lines += 1
            report.errors.append(exc)
            continue
        if t is not None:
            report.triple_lines += 1
            triples.append(t)
    return Graph(triples), report


def parse_ntriples(
    data: Union[str, bytes],
    strict: bool = True,
    doc_id: Optional[str] = None,
) -> Graph:
    graph, _ = parse_ntriples_report(data, strict=strict, doc_id=doc_id)
    return graph


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def serialize_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        base = f'"{_escape_literal(term.lexical)}"'
        if term.datatype is not None:
            return f"{base}^^<{term.datatype.value}>"
        if term.language is not None:
            return f"{base}@{term.language}"
        return base
    raise TypeError(f"not a serializable term: {term!r}")


def serialize_triple(t: Triple) -> str:
    return f"{serialize_term(t.subject)} {serialize_term(t.predicate)} {serialize_term(t.object)} ."


def serialize_ntriples(graph: Graph) -> str:
    """Canonical serialization: sorted lines, one triple per line."""
    lines = sorted(serialize_triple(t) for t in graph)
    if not lines:
        return ""
    return "\n".join(lines) + "\n"
