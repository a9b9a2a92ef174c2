"""Changeset algebra: diff/apply inverses and delete-before-add order."""

from hypothesis import given, settings
from hypothesis import strategies as st

from interestsync import (
    Changeset,
    Graph,
    Triple,
    apply_changeset,
    graph_diff,
    iri,
)

EX = "http://example.org/"

_nodes = st.integers(min_value=0, max_value=6).map(lambda k: iri(f"{EX}n{k}"))
_triples = st.builds(Triple, _nodes, _nodes, _nodes)
_graphs = st.lists(_triples, max_size=20).map(Graph)


@settings(max_examples=300, deadline=None)
@given(_graphs, _graphs)
def test_diff_then_apply_recovers_target(a, b):
    assert apply_changeset(a, graph_diff(a, b)) == b


@settings(max_examples=100, deadline=None)
@given(_graphs)
def test_diff_with_self_is_empty(a):
    cs = graph_diff(a, a)
    assert cs.is_empty()
    assert apply_changeset(a, cs) == a


@settings(max_examples=100, deadline=None)
@given(_graphs, _graphs)
def test_diff_sides_are_disjoint(a, b):
    cs = graph_diff(a, b)
    assert not (cs.removed & cs.added)
    assert not (cs.removed - a) and not (cs.added - b)


@settings(max_examples=100, deadline=None)
@given(_graphs, _triples)
def test_delete_before_add_keeps_readded_triple(v, t):
    cs = Changeset(removed=Graph([t]), added=Graph([t]))
    out = apply_changeset(v, cs)
    assert t in out
    assert out == v | Graph([t])


def test_defaults_and_sequence_id():
    cs = Changeset()
    assert cs.is_empty() and cs.sequence_id is None
    cs2 = Changeset(sequence_id="2015-02-06-17-000001")
    assert cs2.sequence_id == "2015-02-06-17-000001"
