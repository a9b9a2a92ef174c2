"""N-Triples parsing and canonical serialization, including a
serialize/parse round-trip property over randomly generated graphs."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interestsync import (
    Graph,
    Iri,
    Literal,
    NTriplesSyntaxError,
    Triple,
    iri,
    parse_ntriples,
    parse_ntriples_report,
    serialize_ntriples,
    serialize_triple,
)
from interestsync.ntriples import SKOLEM_PREFIX

EX = "http://example.org/"


# -- strategies -------------------------------------------------------------

_iri_suffix = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyz0123456789-._~/?#%", min_size=1,
    max_size=12)
_iris = _iri_suffix.map(lambda s: iri(EX + s))
_lexicals = st.text(max_size=20)  # arbitrary unicode, exercises escaping
_langs = st.sampled_from(["en", "de", "en-gb", "fr"])

_literals = st.one_of(
    _lexicals.map(Literal),
    st.tuples(_lexicals, _langs).map(lambda p: Literal(p[0], language=p[1])),
    st.tuples(_lexicals, _iris).map(lambda p: Literal(p[0], datatype=p[1])),
)

_triples = st.builds(Triple, _iris, _iris, st.one_of(_iris, _literals))
_graphs = st.lists(_triples, max_size=15).map(Graph)


@settings(max_examples=200, deadline=None)
@given(_graphs)
def test_serialize_parse_round_trip(g):
    assert parse_ntriples(serialize_ntriples(g)) == g


@given(_graphs)
@settings(max_examples=50, deadline=None)
def test_serialization_is_canonical(g):
    text = serialize_ntriples(g)
    assert text == serialize_ntriples(parse_ntriples(text))
    lines = text.split("\n")[:-1]  # statements end with "\n"
    assert lines == sorted(lines)


# -- parsing specifics ------------------------------------------------------

def test_parse_basic_forms():
    text = """\
# a comment line
<http://e/s> <http://e/p> <http://e/o> .

<http://e/s> <http://e/p> "plain" .
<http://e/s> <http://e/p> "tagged"@EN-GB .
<http://e/s> <http://e/p> "42"^^<http://www.w3.org/2001/XMLSchema#integer> .
"""
    g = parse_ntriples(text)
    assert len(g) == 4
    objs = {t.object for t in g}
    assert Literal("tagged", language="en-gb") in objs
    assert Literal("42", datatype=iri(
        "http://www.w3.org/2001/XMLSchema#integer")) in objs


def test_escapes_decoded():
    text = r'<http://e/s> <http://e/p> "a\tb\nc\"d\\eA\U0001F600" .'
    g = parse_ntriples(text)
    lit = next(iter(g)).object
    assert lit.lexical == 'a\tb\nc"d\\eA\N{GRINNING FACE}'


def test_blank_nodes_skolemized_per_document():
    text = "_:x <http://e/p> _:x .\n_:y <http://e/p> _:x ."
    g1 = parse_ntriples(text, doc_id="doc1")
    g2 = parse_ntriples(text, doc_id="doc2")
    t1 = next(t for t in g1 if t.subject == t.object)
    assert isinstance(t1.subject, Iri)
    assert t1.subject.value.startswith(SKOLEM_PREFIX)
    # Same label, same document: one constant. Different documents: disjoint.
    assert not (g1 & g2)
    assert parse_ntriples(text, doc_id="doc1") == g1


@pytest.mark.parametrize("bad, line", [
    ("<http://e/s> <http://e/p> <http://e/o>", 1),       # missing dot
    ("<http://e/s> <http://e/p> .", 1),                  # missing object
    ('<http://e/s> <http://e/p> "unterminated .', 1),
    ("<http://e/s> <http://e/p> <http://e/o> . junk", 1),
    ("<http://e/s> <http://e/p> <bad iri> .", 1),
    ('ok line is below\n<http://e/s> <http://e/p> "x" .', 1),
    ('<http://e/s> <http://e/p> "x" .\n"lit" <http://e/p> "x" .', 2),
])
def test_strict_mode_raises_with_position(bad, line):
    with pytest.raises(NTriplesSyntaxError) as exc:
        parse_ntriples(bad)
    assert exc.value.line == line
    assert exc.value.column >= 1


def test_lenient_mode_skips_and_reports():
    text = ('<http://e/s> <http://e/p> "good" .\n'
            "this line is garbage\n"
            '<http://e/s> <http://e/q> "also good" .\n')
    g, report = parse_ntriples_report(text, strict=False)
    assert len(g) == 2
    assert report.total_lines == 3
    assert report.triple_lines == 2
    assert report.skipped_lines == 1
    assert report.errors[0].line == 2


def test_serialize_triple_escapes():
    t = Triple(iri("http://e/s"), iri("http://e/p"), Literal('a"b\nc'))
    assert serialize_triple(t) == '<http://e/s> <http://e/p> "a\\"b\\nc" .'


def test_empty_graph_serializes_empty():
    assert serialize_ntriples(Graph()) == ""
    assert parse_ntriples("") == Graph()
