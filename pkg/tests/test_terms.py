"""Term and graph model: lexical equality, set algebra, numeric access."""

import pytest

from interestsync import (
    EMPTY_GRAPH,
    RDF_TYPE,
    XSD_INTEGER,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    Variable,
    integer_literal,
    iri,
    numeric_value,
    string_literal,
)

S = iri("http://example.org/s")
P = iri("http://example.org/p")
Q = iri("http://example.org/q")
O = iri("http://example.org/o")


def t(s=S, p=P, o=O) -> Triple:
    return Triple(s, p, o)


class TestTerms:
    def test_iri_equality_and_interning(self):
        assert Iri("http://x.org/a") == Iri("http://x.org/a")
        assert iri("http://x.org/a") is iri("http://x.org/a")
        assert Iri("http://x.org/a") != Iri("http://x.org/b")

    def test_literal_equality_is_lexical(self):
        # "1" and "01" denote the same integer value but are distinct terms.
        assert integer_literal(1) == Literal("1", datatype=XSD_INTEGER)
        assert Literal("01", datatype=XSD_INTEGER) != integer_literal(1)
        assert Literal("a") != Literal("a", datatype=XSD_INTEGER)

    def test_language_tag_case_insensitive(self):
        assert Literal("chat", language="EN") == Literal("chat", language="en")

    def test_terms_are_hashable_and_distinct_across_kinds(self):
        terms = {S, BlankNode("s"), Literal("http://example.org/s"),
                 Variable("s")}
        assert len(terms) == 4

    def test_numeric_value(self):
        assert numeric_value(integer_literal(216)) == 216
        assert numeric_value(Literal("2.5", datatype=iri(
            "http://www.w3.org/2001/XMLSchema#decimal"))) == 2.5
        assert numeric_value(string_literal("216")) is None
        assert numeric_value(Literal("not-a-number",
                                     datatype=XSD_INTEGER)) is None
        assert numeric_value(S) is None

    def test_triple_positions(self):
        tr = t()
        assert (tr.subject, tr.predicate, tr.object) == (S, P, O)
        assert tuple(tr) == (S, P, O)

    def test_rdf_type_constant(self):
        assert RDF_TYPE.value.endswith("22-rdf-syntax-ns#type")


class TestGraph:
    def test_set_algebra(self):
        a, b, c = t(o=iri("http://x/1")), t(o=iri("http://x/2")), t(p=Q)
        g1, g2 = Graph([a, b]), Graph([b, c])
        assert g1 | g2 == Graph([a, b, c])
        assert g1 - g2 == Graph([a])
        assert g1 & g2 == Graph([b])

    def test_membership_len_iter_bool(self):
        a, b = t(), t(p=Q)
        g = Graph([a, b, a])
        assert a in g and len(g) == 2 and set(g) == {a, b}
        assert g and not EMPTY_GRAPH

    def test_graph_equality_and_hash(self):
        a, b = t(), t(p=Q)
        assert Graph([a, b]) == Graph([b, a])
        assert hash(Graph([a, b])) == hash(Graph([b, a]))

    def test_add_is_persistent(self):
        g = Graph([t()])
        g2 = g.add(t(p=Q))
        assert len(g) == 1 and len(g2) == 2

    def test_duplicate_insertion_is_noop(self):
        g = Graph([t()])
        assert g | Graph([t()]) == g
