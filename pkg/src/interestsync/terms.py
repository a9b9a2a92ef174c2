"""Ground RDF data model: terms, triples, and set-algebraic graphs.

Terms are immutable value objects. Equality is structural and lexical:
``"1"`` and ``"01"`` are distinct, ``"1"^^xsd:int`` and ``"1"^^xsd:integer``
are distinct. No value-space entailment happens at this layer; numeric
interpretation is opt-in via :func:`numeric_value` (used by filter
evaluation only).

The classes are hand-rolled rather than dataclasses because term hashing is
the hottest operation in the whole engine (every index lookup goes through
it); each term caches its hash at construction.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

RDF_TYPE_IRI = RDF_NS + "type"

#: XSD datatypes whose literals compare numerically in filter expressions.
XSD_NUMERIC_DATATYPES = frozenset(
    XSD_NS + local
    for local in (
        "integer", "decimal", "double", "float",
        "long", "int", "short", "byte",
        "nonNegativeInteger", "nonPositiveInteger",
        "negativeInteger", "positiveInteger",
        "unsignedLong", "unsignedInt", "unsignedShort", "unsignedByte",
    )
)


class Term:
    """Base class for Iri, BlankNode and Literal."""

    __slots__ = ()


class Iri(Term):
    __slots__ = ("value", "_hash")

    def __init__(self, value: str):
        self.value = value
        self._hash = hash((Iri, value))

    def __eq__(self, other):
        return self is other or (type(other) is Iri and other.value == self.value)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Iri({self.value!r})"


class BlankNode(Term):
    """A raw (unskolemized) blank node.

    The N-Triples parser never produces these: parsed blank labels are
    skolemized into IRIs so that graphs stay sets of ground, globally
    comparable triples. The variant exists for programmatic construction
    and serialization tests.
    """

    __slots__ = ("label", "_hash")

    def __init__(self, label: str):
        self.label = label
        self._hash = hash((BlankNode, label))

    def __eq__(self, other):
        return self is other or (type(other) is BlankNode and other.label == self.label)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"BlankNode({self.label!r})"


class Literal(Term):
    __slots__ = ("lexical", "datatype", "language", "_hash")

    def __init__(self, lexical: str, datatype: Optional[Iri] = None,
                 language: Optional[str] = None):
        if datatype is not None and language is not None:
            raise ValueError("a literal has at most one of datatype and language tag")
        self.lexical = lexical
        self.datatype = datatype
        # Language tags compare case-insensitively; normalize once.
        self.language = language.lower() if language is not None else None
        self._hash = hash((Literal, lexical, datatype, self.language))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is Literal
            and other.lexical == self.lexical
            and other.datatype == self.datatype
            and other.language == self.language
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        extra = ""
        if self.datatype is not None:
            extra = f", datatype={self.datatype!r}"
        elif self.language is not None:
            extra = f", language={self.language!r}"
        return f"Literal({self.lexical!r}{extra})"


class Variable:
    """A SPARQL-style query variable. Not a Term: never appears in data."""

    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash((Variable, name))

    def __eq__(self, other):
        return self is other or (type(other) is Variable and other.name == self.name)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Variable({self.name!r})"


RDF_TYPE = Iri(RDF_TYPE_IRI)
XSD_INTEGER = Iri(XSD_NS + "integer")
XSD_DECIMAL = Iri(XSD_NS + "decimal")
XSD_DOUBLE = Iri(XSD_NS + "double")
XSD_STRING = Iri(XSD_NS + "string")

_iri_cache: dict = {}


def iri(value: str) -> Iri:
    """Interning Iri factory. Hot paths (parser, stores, generators) share
    one object per IRI string so hashing and equality stay cheap."""
    term = _iri_cache.get(value)
    if term is None:
        term = _iri_cache[value] = Iri(value)
    return term


def integer_literal(value: int) -> Literal:
    return Literal(str(value), datatype=XSD_INTEGER)


def string_literal(value: str) -> Literal:
    return Literal(value)


def numeric_value(lit: Term) -> Union[int, float, None]:
    """The numeric interpretation of a literal, or None if it has none."""
    if not isinstance(lit, Literal):
        return None
    if lit.datatype is None or lit.datatype.value not in XSD_NUMERIC_DATATYPES:
        return None
    text = lit.lexical.strip()
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return None


def is_plain_string(lit: Literal) -> bool:
    """True for literals that compare lexically as strings in filters."""
    return lit.datatype is None or lit.datatype == XSD_STRING


class Triple:
    __slots__ = ("subject", "predicate", "object", "_hash")

    def __init__(self, subject: Term, predicate: Term, object: Term):
        if not isinstance(subject, (Iri, BlankNode)):
            raise TypeError(f"triple subject must be an IRI or blank node, got {subject!r}")
        if not isinstance(predicate, Iri):
            raise TypeError(f"triple predicate must be an IRI, got {predicate!r}")
        if not isinstance(object, Term):
            raise TypeError(f"triple object must be a term, got {object!r}")
        self.subject = subject
        self.predicate = predicate
        self.object = object
        self._hash = hash((subject, predicate, object))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is Triple
            and other._hash == self._hash
            and other.subject == self.subject
            and other.predicate == self.predicate
            and other.object == self.object
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def __repr__(self):
        return f"Triple({self.subject!r}, {self.predicate!r}, {self.object!r})"


class Graph:
    """An immutable mathematical set of triples.

    Supports the usual set algebra (| - &) against other graphs or plain
    iterables of triples. Insertion order never matters: two graphs built
    from any permutations of the same triples are equal.
    """

    __slots__ = ("_triples",)

    def __init__(self, triples: Iterable[Triple] = ()):
        if isinstance(triples, Graph):
            self._triples = triples._triples
        else:
            self._triples = frozenset(triples)

    @property
    def triples(self) -> frozenset:
        return self._triples

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __bool__(self) -> bool:
        return bool(self._triples)

    @staticmethod
    def _coerce(other) -> frozenset:
        if isinstance(other, Graph):
            return other._triples
        return frozenset(other)

    def union(self, other) -> "Graph":
        return Graph(self._triples | self._coerce(other))

    def difference(self, other) -> "Graph":
        return Graph(self._triples - self._coerce(other))

    def intersection(self, other) -> "Graph":
        return Graph(self._triples & self._coerce(other))

    __or__ = union
    __sub__ = difference
    __and__ = intersection

    def add(self, t: Triple) -> "Graph":
        """A new graph with ``t`` inserted (no-op if already present)."""
        if t in self._triples:
            return self
        return Graph(self._triples | {t})

    def __eq__(self, other):
        if isinstance(other, Graph):
            return self._triples == other._triples
        return NotImplemented

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash(self._triples)

    def __repr__(self):
        return f"Graph(<{len(self._triples)} triples>)"


EMPTY_GRAPH = Graph()
