"""Interest expressions: triple patterns, filters, BGP/OGP validation and
the textual interest-file grammar.

An interest file is a SPARQL-shaped subset:

    PREFIX dbo: <http://dbpedia.org/ontology/>
    INTEREST athletes
    SOURCE <http://live.dbpedia.org/changesets>
    TARGET <http://localhost:3030/target/sparql>
    SELECT * WHERE {
      ?a a dbo:Athlete .
      ?a dbo:goals ?goals .
      FILTER(?goals > 100)
      OPTIONAL { ?a foaf:homepage ?page . }
    }

Exactly one OPTIONAL block is permitted, with no nesting; UNION and
property paths are rejected with a named error. ``CONSTRUCT WHERE`` is
accepted as a synonym for ``SELECT * WHERE``. The INTEREST / SOURCE /
TARGET headers are optional; callers may supply defaults.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from .terms import (
    BlankNode,
    Iri,
    Literal,
    RDF_TYPE,
    Term,
    Variable,
    XSD_DECIMAL,
    XSD_INTEGER,
    numeric_value,
    is_plain_string,
    iri,
)

#: A solution mapping: each variable binds at most one term.
Binding = Mapping[Variable, Term]

PatternTerm = Union[Term, Variable]


class InterestSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnsupportedConstructError(InterestSyntaxError):
    """A recognizable SPARQL construct outside the supported subset."""


class InterestValidationError(ValueError):
    pass


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, BlankNode, Variable)):
            raise InterestValidationError(
                f"pattern subject must be IRI, blank node or variable: {self.subject!r}")
        if not isinstance(self.predicate, (Iri, Variable)):
            raise InterestValidationError(
                f"pattern predicate must be IRI or variable: {self.predicate!r}")
        if not isinstance(self.object, (Term, Variable)):
            raise InterestValidationError(
                f"pattern object must be a term or variable: {self.object!r}")

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def variables(self) -> FrozenSet[Variable]:
        return frozenset(x for x in self if isinstance(x, Variable))


# --------------------------------------------------------------------------
# Filter expressions
# --------------------------------------------------------------------------
#
# Evaluation is three-valued internally (True / False / error); errors
# coerce to False at the boundary, SPARQL-style. || is true if either
# branch is true even when the other errors; && is false if either branch
# is false even when the other errors.

class FilterExpr:
    __slots__ = ()

    def variables(self) -> FrozenSet[Variable]:
        raise NotImplementedError


@dataclass(frozen=True)
class Comparison(FilterExpr):
    op: str  # one of = != < <= > >=
    left: Union[Variable, Term]
    right: Union[Variable, Term]

    def variables(self):
        return frozenset(x for x in (self.left, self.right) if isinstance(x, Variable))


@dataclass(frozen=True)
class StringTest(FilterExpr):
    name: str  # STRSTARTS or CONTAINS
    left: Union[Variable, Term]
    right: Union[Variable, Term]

    def variables(self):
        return frozenset(x for x in (self.left, self.right) if isinstance(x, Variable))


@dataclass(frozen=True)
class And(FilterExpr):
    left: FilterExpr
    right: FilterExpr

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Or(FilterExpr):
    left: FilterExpr
    right: FilterExpr

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Not(FilterExpr):
    operand: FilterExpr

    def variables(self):
        return self.operand.variables()


def _operand_value(x, mu: Binding):
    if isinstance(x, Variable):
        return mu.get(x)  # None means unbound -> error
    return x


def _eval3(f: FilterExpr, mu: Binding) -> Optional[bool]:
    if isinstance(f, And):
        left = _eval3(f.left, mu)
        right = _eval3(f.right, mu)
        if left is False or right is False:
            return False
        if left is None or right is None:
            return None
        return True
    if isinstance(f, Or):
        left = _eval3(f.left, mu)
        right = _eval3(f.right, mu)
        if left is True or right is True:
            return True
        if left is None or right is None:
            return None
        return False
    if isinstance(f, Not):
        inner = _eval3(f.operand, mu)
        return None if inner is None else not inner
    if isinstance(f, Comparison):
        left = _operand_value(f.left, mu)
        right = _operand_value(f.right, mu)
        if left is None or right is None:
            return None
        return _compare(f.op, left, right)
    if isinstance(f, StringTest):
        left = _operand_value(f.left, mu)
        right = _operand_value(f.right, mu)
        if not isinstance(left, Literal) or not isinstance(right, Literal):
            return None
        if f.name == "STRSTARTS":
            return left.lexical.startswith(right.lexical)
        return right.lexical in left.lexical
    raise TypeError(f"unknown filter node: {f!r}")


def _compare(op: str, left: Term, right: Term) -> Optional[bool]:
    if isinstance(left, Literal) and isinstance(right, Literal):
        ln, rn = numeric_value(left), numeric_value(right)
        if ln is not None and rn is not None:
            return _apply_op(op, ln, rn)
        if op in ("=", "!="):
            return _apply_op(op, left, right)
        if is_plain_string(left) and is_plain_string(right):
            return _apply_op(op, left.lexical, right.lexical)
        return None
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    return None  # ordering is undefined across non-literals


def _apply_op(op, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ValueError(op)


def eval_filter(f: FilterExpr, mu: Binding) -> bool:
    """Evaluate a filter over a binding; unbound variables and type
    mismatches are errors and coerce to False."""
    return _eval3(f, mu) is True


def eval_filters(filters: Sequence[FilterExpr], mu: Binding) -> bool:
    return all(eval_filter(f, mu) for f in filters)


# --------------------------------------------------------------------------
# BGP / OGP / interest expression
# --------------------------------------------------------------------------

def _pattern_elements(tp: TriplePattern) -> FrozenSet:
    """Variables and ground terms of a pattern; shared elements connect
    patterns in the non-disjointness graph."""
    return frozenset(tp)


def check_non_disjoint(bgp: "Bgp") -> bool:
    """True iff the pattern-connectivity graph is connected. Patterns are
    connected when they share a variable or a ground term."""
    patterns = bgp.patterns
    if len(patterns) <= 1:
        return True
    elements = [_pattern_elements(tp) for tp in patterns]
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(len(patterns)):
            if j not in seen and elements[i] & elements[j]:
                seen.add(j)
                frontier.append(j)
    return len(seen) == len(patterns)


@dataclass(frozen=True)
class Bgp:
    patterns: Tuple[TriplePattern, ...]
    filters: Tuple[FilterExpr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "filters", tuple(self.filters))
        if not self.patterns:
            raise InterestValidationError("a BGP needs at least one triple pattern")

    def variables(self) -> FrozenSet[Variable]:
        out = frozenset()
        for tp in self.patterns:
            out |= tp.variables()
        return out


@dataclass(frozen=True)
class Ogp:
    patterns: Tuple[TriplePattern, ...] = ()
    filters: Tuple[FilterExpr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "filters", tuple(self.filters))

    def variables(self) -> FrozenSet[Variable]:
        out = frozenset()
        for tp in self.patterns:
            out |= tp.variables()
        return out

    def is_empty(self) -> bool:
        return not self.patterns


EMPTY_OGP = Ogp()


def _connected_components(bgp: Bgp) -> List[List[int]]:
    elements = [_pattern_elements(tp) for tp in bgp.patterns]
    unassigned = set(range(len(bgp.patterns)))
    components = []
    while unassigned:
        start = min(unassigned)
        comp = {start}
        frontier = [start]
        while frontier:
            i = frontier.pop()
            for j in list(unassigned):
                if j not in comp and elements[i] & elements[j]:
                    comp.add(j)
                    frontier.append(j)
        unassigned -= comp
        components.append(sorted(comp))
    return components


@dataclass(frozen=True)
class InterestExpression:
    """⟨source g, target τ, BGP b, OGP op⟩ plus a registry identifier."""

    id: str
    bgp: Bgp
    ogp: Ogp = EMPTY_OGP
    source: Optional[Iri] = None
    target: Optional[str] = None  # filesystem path or IRI, recorded as-is

    def __post_init__(self):
        if not check_non_disjoint(self.bgp):
            comps = _connected_components(self.bgp)
            raise InterestValidationError(
                "disjoint BGP: pattern groups "
                + "; ".join("{" + ", ".join(map(str, c)) + "}" for c in comps)
                + " share no variable or term"
            )
        bgp_vars = self.bgp.variables()
        for tp in self.ogp.patterns:
            if not (tp.variables() & bgp_vars):
                raise InterestValidationError(
                    f"OPTIONAL pattern {format_pattern(tp)} shares no variable with the BGP"
                )


# --------------------------------------------------------------------------
# Grammar
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+)
    | (?P<COMMENT>\#[^\n]*)
    | (?P<IRIREF><[^<>"{}|^`\\\x00-\x20]*>)
    | (?P<VAR>\?[A-Za-z_][A-Za-z0-9_]*)
    | (?P<STRING>"(?:[^"\\\n]|\\.)*"(?:@[A-Za-z]+(?:-[A-Za-z0-9]+)*)?)
    | (?P<NUMBER>[+-]?[0-9]+(?:\.[0-9]+)?)
    | (?P<PNAME>[A-Za-z][A-Za-z0-9_.-]*?:[A-Za-z0-9_][A-Za-z0-9_.-]*|[A-Za-z][A-Za-z0-9_.-]*?:)
    | (?P<IDENT>[A-Za-z][A-Za-z0-9_-]*)
    | (?P<OP>\^\^|<=|>=|!=|&&|\|\||[=<>!{}().,*/;@])
    """,
    re.VERBOSE,
)

_STRING_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\", "'": "'"}


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> List[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise InterestSyntaxError(
                f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.prefixes: Dict[str, str] = {}

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, message: str, cls=InterestSyntaxError):
        tok = self.cur
        raise cls(message, tok.line, tok.column)

    def advance(self) -> _Token:
        tok = self.cur
        self.pos += 1
        return tok

    def at_keyword(self, *names: str) -> bool:
        return self.cur.kind == "IDENT" and self.cur.text.upper() in names

    def expect_keyword(self, name: str):
        if not self.at_keyword(name):
            self.error(f"expected {name}")
        self.advance()

    def expect_op(self, text: str):
        if self.cur.kind != "OP" or self.cur.text != text:
            self.error(f"expected {text!r}")
        self.advance()

    # ---- terms ----

    def _expand_pname(self, text: str) -> Iri:
        prefix, _, local = text.partition(":")
        if prefix not in self.prefixes:
            self.error(f"undeclared prefix {prefix!r}")
        return iri(self.prefixes[prefix] + local)

    def parse_iri(self) -> Iri:
        tok = self.cur
        if tok.kind == "IRIREF":
            self.advance()
            return iri(tok.text[1:-1])
        if tok.kind == "PNAME":
            self.advance()
            return self._expand_pname(tok.text)
        self.error("expected an IRI")

    def _string_literal(self, text: str) -> Literal:
        body, lang = text, None
        if not body.endswith('"'):
            body, _, lang = body.rpartition("@")
        raw = body[1:-1]
        out = []
        i = 0
        while i < len(raw):
            c = raw[i]
            if c == "\\" and i + 1 < len(raw):
                e = raw[i + 1]
                if e in _STRING_ESCAPES:
                    out.append(_STRING_ESCAPES[e])
                    i += 2
                    continue
            out.append(c)
            i += 1
        lexical = "".join(out)
        if lang:
            return Literal(lexical, language=lang)
        return Literal(lexical)

    def parse_term(self, allow_var=True) -> PatternTerm:
        tok = self.cur
        if tok.kind == "VAR":
            if not allow_var:
                self.error("variable not allowed here")
            self.advance()
            return Variable(tok.text[1:])
        if tok.kind in ("IRIREF", "PNAME"):
            return self.parse_iri()
        if tok.kind == "STRING":
            self.advance()
            lit = self._string_literal(tok.text)
            if self.cur.kind == "OP" and self.cur.text == "^^":
                if lit.language is not None:
                    self.error("literal cannot carry both language tag and datatype")
                self.advance()
                return Literal(lit.lexical, datatype=self.parse_iri())
            return lit
        if tok.kind == "NUMBER":
            self.advance()
            datatype = XSD_DECIMAL if "." in tok.text else XSD_INTEGER
            return Literal(tok.text, datatype=datatype)
        if tok.kind == "IDENT" and tok.text == "a":
            self.advance()
            return RDF_TYPE
        self.error("expected a term")

    # ---- filters ----

    def parse_filter(self) -> FilterExpr:
        self.expect_op("(")
        expr = self.parse_or()
        self.expect_op(")")
        return expr

    def parse_or(self) -> FilterExpr:
        left = self.parse_and()
        while self.cur.kind == "OP" and self.cur.text == "||":
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> FilterExpr:
        left = self.parse_unary()
        while self.cur.kind == "OP" and self.cur.text == "&&":
            self.advance()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> FilterExpr:
        if self.cur.kind == "OP" and self.cur.text == "!":
            self.advance()
            return Not(self.parse_unary())
        if self.cur.kind == "OP" and self.cur.text == "(":
            self.advance()
            expr = self.parse_or()
            self.expect_op(")")
            return expr
        if self.at_keyword("STRSTARTS", "CONTAINS"):
            name = self.advance().text.upper()
            self.expect_op("(")
            left = self.parse_term()
            self.expect_op(",")
            right = self.parse_term()
            self.expect_op(")")
            return StringTest(name, left, right)
        left = self.parse_term()
        if self.cur.kind != "OP" or self.cur.text not in ("=", "!=", "<", "<=", ">", ">="):
            self.error("expected a comparison operator")
        op = self.advance().text
        right = self.parse_term()
        return Comparison(op, left, right)

    # ---- patterns ----

    def parse_triple_pattern(self) -> TriplePattern:
        subject = self.parse_term()
        predicate = self.parse_term()
        if self.cur.kind == "OP" and self.cur.text in ("/", "*"):
            self.error("property paths are not supported", UnsupportedConstructError)
        obj = self.parse_term()
        try:
            return TriplePattern(subject, predicate, obj)
        except InterestValidationError as exc:
            self.error(str(exc))

    def parse_group(self, inside_optional: bool):
        patterns: List[TriplePattern] = []
        filters: List[FilterExpr] = []
        optional: Optional[Ogp] = None
        self.expect_op("{")
        while True:
            if self.cur.kind == "OP" and self.cur.text == "}":
                self.advance()
                return patterns, filters, optional
            if self.at_keyword("UNION"):
                self.error("UNION is not supported", UnsupportedConstructError)
            if self.cur.kind == "OP" and self.cur.text == "{":
                self.error("nested group patterns (as in UNION) are not "
                           "supported", UnsupportedConstructError)
            if self.at_keyword("FILTER"):
                self.advance()
                filters.append(self.parse_filter())
                if self.cur.kind == "OP" and self.cur.text == ".":
                    self.advance()
                continue
            if self.at_keyword("OPTIONAL"):
                if inside_optional:
                    self.error("nested OPTIONAL is not supported", UnsupportedConstructError)
                if optional is not None:
                    self.error("at most one OPTIONAL block is supported",
                               UnsupportedConstructError)
                self.advance()
                opt_patterns, opt_filters, _ = self.parse_group(inside_optional=True)
                optional = Ogp(tuple(opt_patterns), tuple(opt_filters))
                if self.cur.kind == "OP" and self.cur.text == ".":
                    self.advance()
                continue
            patterns.append(self.parse_triple_pattern())
            if self.cur.kind == "OP" and self.cur.text == ".":
                self.advance()
            elif not (self.cur.kind == "OP" and self.cur.text == "}"):
                self.error("expected '.' or '}' after triple pattern")

    # ---- top level ----

    def parse_interest(self, default_id: Optional[str]) -> InterestExpression:
        interest_id = default_id
        source: Optional[Iri] = None
        target: Optional[str] = None
        while True:
            if self.at_keyword("PREFIX"):
                self.advance()
                if self.cur.kind != "PNAME":
                    self.error("expected prefix name after PREFIX")
                prefix = self.advance().text.rstrip(":")
                if self.cur.kind != "IRIREF":
                    self.error("expected IRI after prefix name")
                self.prefixes[prefix] = self.advance().text[1:-1]
            elif self.at_keyword("INTEREST"):
                self.advance()
                if self.cur.kind not in ("IDENT", "PNAME", "STRING"):
                    self.error("expected an identifier after INTEREST")
                tok = self.advance()
                interest_id = self._string_literal(tok.text).lexical if tok.kind == "STRING" else tok.text
            elif self.at_keyword("SOURCE"):
                self.advance()
                source = self.parse_iri()
            elif self.at_keyword("TARGET"):
                self.advance()
                if self.cur.kind == "STRING":
                    target = self._string_literal(self.advance().text).lexical
                else:
                    target = self.parse_iri().value
            else:
                break
        if self.at_keyword("SELECT"):
            self.advance()
            if not (self.cur.kind == "OP" and self.cur.text == "*"):
                self.error("only SELECT * queries are supported")
            self.advance()
            self.expect_keyword("WHERE")
        elif self.at_keyword("CONSTRUCT"):
            self.advance()
            self.expect_keyword("WHERE")
        else:
            self.error("expected SELECT or CONSTRUCT query")
        patterns, filters, optional = self.parse_group(inside_optional=False)
        if self.cur.kind != "EOF":
            self.error("trailing content after query")
        if not patterns:
            self.error("interest query has no BGP triple patterns")
        if interest_id is None:
            self.error("no interest id: add an INTEREST header or pass a default id")
        try:
            return InterestExpression(
                id=interest_id,
                bgp=Bgp(tuple(patterns), tuple(filters)),
                ogp=optional if optional is not None else EMPTY_OGP,
                source=source,
                target=target,
            )
        except InterestValidationError:
            raise


def parse_interest(source: str, default_id: Optional[str] = None) -> InterestExpression:
    """Parse and validate an interest file.

    Raises InterestSyntaxError (with position), UnsupportedConstructError
    for recognizable SPARQL outside the subset, and InterestValidationError
    for a disjoint BGP or an OPTIONAL that shares no variable with it.
    """
    return _Parser(source).parse_interest(default_id)


# --------------------------------------------------------------------------
# Pretty-printing (stable round-trip through parse_interest)
# --------------------------------------------------------------------------

def _format_term(x: PatternTerm) -> str:
    if isinstance(x, Variable):
        return f"?{x.name}"
    from .ntriples import serialize_term

    return serialize_term(x)


def format_pattern(tp: TriplePattern) -> str:
    return f"{_format_term(tp.subject)} {_format_term(tp.predicate)} {_format_term(tp.object)}"


def format_filter(f: FilterExpr) -> str:
    if isinstance(f, Comparison):
        return f"{_format_term(f.left)} {f.op} {_format_term(f.right)}"
    if isinstance(f, StringTest):
        return f"{f.name}({_format_term(f.left)}, {_format_term(f.right)})"
    if isinstance(f, And):
        return f"({format_filter(f.left)}) && ({format_filter(f.right)})"
    if isinstance(f, Or):
        return f"({format_filter(f.left)}) || ({format_filter(f.right)})"
    if isinstance(f, Not):
        return f"!({format_filter(f.operand)})"
    raise TypeError(f"unknown filter node: {f!r}")


def format_interest(i: InterestExpression) -> str:
    lines = [f"INTEREST {i.id}"]
    if i.source is not None:
        lines.append(f"SOURCE <{i.source.value}>")
    if i.target is not None:
        lines.append(f'TARGET "{i.target}"')
    lines.append("SELECT * WHERE {")
    for tp in i.bgp.patterns:
        lines.append(f"  {format_pattern(tp)} .")
    for f in i.bgp.filters:
        lines.append(f"  FILTER({format_filter(f)})")
    if not i.ogp.is_empty():
        lines.append("  OPTIONAL {")
        for tp in i.ogp.patterns:
            lines.append(f"    {format_pattern(tp)} .")
        for f in i.ogp.filters:
            lines.append(f"    FILTER({format_filter(f)})")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
