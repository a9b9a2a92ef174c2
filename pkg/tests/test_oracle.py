"""The test oracles themselves: determinism of the workload generator,
mirror folding, brute-force slicing, and store comparison."""

import pytest

from interestsync import (
    Changeset,
    Graph,
    RDF_TYPE,
    Triple,
    WorkloadParams,
    apply_changeset,
    compare,
    generate_workload,
    integer_literal,
    iri,
    mirror_apply,
    serialize_ntriples,
    slice_graph,
)
from interestsync.patterns import parse_interest


def test_same_seed_same_workload():
    a = generate_workload(11)
    b = generate_workload(11)
    assert serialize_ntriples(a.dump) == serialize_ntriples(b.dump)
    assert len(a.changesets) == len(b.changesets)
    for ca, cb in zip(a.changesets, b.changesets):
        assert ca.removed == cb.removed and ca.added == cb.added
        assert ca.sequence_id == cb.sequence_id
    from interestsync import format_interest

    assert format_interest(a.interest) == format_interest(b.interest)


def test_different_seeds_differ():
    a, b = generate_workload(1), generate_workload(2)
    assert serialize_ntriples(a.dump) != serialize_ntriples(b.dump)


def test_params_respected():
    params = WorkloadParams(n_changesets=7, ops_per_changeset=2)
    w = generate_workload(5, params)
    assert len(w.changesets) == 7
    assert w.changesets[0].sequence_id == "000001"


def test_removed_sides_exist_in_prior_state():
    w = generate_workload(9)
    state = w.dump
    for cs in w.changesets:
        assert not (cs.removed - state), "removal of a non-present triple"
        state = apply_changeset(state, cs)


def test_mirror_apply_equals_fold():
    w = generate_workload(4)
    state = w.dump
    for cs in w.changesets:
        state = apply_changeset(state, cs)
    assert mirror_apply(w.dump, w.changesets) == state
    assert mirror_apply(w.dump, []) == w.dump


def test_slice_graph_handcrafted():
    src = """\
PREFIX e: <http://e/>
INTEREST tiny
SELECT * WHERE {
  ?x a e:Widget .
  ?x e:size ?s .
  FILTER (?s > 10)
  OPTIONAL { ?x e:note ?n . }
}
"""
    i = parse_interest(src)
    e = "http://e/"
    big = iri(e + "big")
    small = iri(e + "small")
    lonely = iri(e + "lonely")
    g = Graph([
        Triple(big, RDF_TYPE, iri(e + "Widget")),
        Triple(big, iri(e + "size"), integer_literal(20)),
        Triple(big, iri(e + "note"), integer_literal(1)),
        Triple(small, RDF_TYPE, iri(e + "Widget")),
        Triple(small, iri(e + "size"), integer_literal(5)),   # fails filter
        Triple(small, iri(e + "note"), integer_literal(2)),   # no base match
        Triple(lonely, iri(e + "size"), integer_literal(99)),  # no type
    ])
    out = slice_graph(i, g)
    assert out == Graph([
        Triple(big, RDF_TYPE, iri(e + "Widget")),
        Triple(big, iri(e + "size"), integer_literal(20)),
        Triple(big, iri(e + "note"), integer_literal(1)),
    ])


def test_compare_report():
    a = Triple(iri("http://e/1"), iri("http://e/p"), iri("http://e/o"))
    b = Triple(iri("http://e/2"), iri("http://e/p"), iri("http://e/o"))
    rep = compare(Graph([a]), Graph([b]))
    assert not rep.equal
    assert rep.missing == Graph([b]) and rep.extra == Graph([a])
    assert compare(Graph([a]), Graph([a])).equal
