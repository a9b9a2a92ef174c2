"""Shared fixtures and brute-force helpers for the test suite.

The golden fixture is a small football-interest scenario: one interest
(athletes with goal counts, optional homepage), a 5-triple initial
target, and one changeset hour with a single serial.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Dict, List, Set, Tuple

import pytest

from interestsync import (
    Changeset,
    Graph,
    InterestExpression,
    MemoryPiStore,
    MemoryTripleStore,
    StorePair,
    Triple,
    Variable,
    Workload,
    init_slice,
    load_changeset,
    parse_interest,
    parse_ntriples,
    propagate,
    scan_changesets,
)

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture_graph(name: str) -> Graph:
    return parse_ntriples((FIXTURES / name).read_text(encoding="utf-8"),
                          doc_id=name)


@pytest.fixture(scope="session")
def golden_interest() -> InterestExpression:
    return parse_interest((FIXTURES / "football.interest").read_text())


@pytest.fixture(scope="session")
def target_t0() -> Graph:
    return load_fixture_graph("target_t0.nt")


@pytest.fixture(scope="session")
def changeset_t1() -> Changeset:
    refs = scan_changesets(FIXTURES / "changesets")
    assert len(refs) == 1
    return load_changeset(refs[0])


@pytest.fixture(scope="session")
def expected_target_t1() -> Graph:
    return load_fixture_graph("expected_target_t1.nt")


@pytest.fixture(scope="session")
def expected_pi_t1() -> Graph:
    return load_fixture_graph("expected_pi_t1.nt")


# --------------------------------------------------------------------------
# Workload execution helper
# --------------------------------------------------------------------------

def run_workload_memory(w: Workload, cap: int = 200_000) -> Tuple[Graph, Graph]:
    """Run a generated workload through in-memory stores: initialize the
    target from the dump slice, then propagate every changeset. Returns
    the final (target, side-store partition) graphs."""
    stores = StorePair(
        target=MemoryTripleStore(init_slice(w.interest, w.dump, cap)),
        pi=MemoryPiStore(),
    )
    for cs in w.changesets:
        propagate(w.interest, cs, stores, cap)
    return stores.target.snapshot(), stores.pi.partition_graph(w.interest.id)


# --------------------------------------------------------------------------
# Brute-force candidate classifier (oracle for generate_candidates)
# --------------------------------------------------------------------------

def _brute_match(tp, t: Triple, binding: Dict) -> Dict:
    out = dict(binding)
    for x, v in zip(tp, t):
        if isinstance(x, Variable):
            if x in out:
                if out[x] != v:
                    return None
            else:
                out[x] = v
        elif x != v:
            return None
    return out


def _subset_solutions(patterns, triples, binding, support):
    if not patterns:
        yield binding, support
        return
    tp = patterns[0]
    for t in triples:
        b2 = _brute_match(tp, t, binding)
        if b2 is not None:
            yield from _subset_solutions(patterns[1:], triples, b2,
                                         support + (t,))


def _connected_subset(patterns, subset) -> bool:
    """A pattern subset counts as one partial match only if its patterns
    form a single component under shared variables/terms; an unrelated
    pattern elsewhere must not raise a triple's coverage."""
    elements = [frozenset(patterns[k]) for k in subset]
    reached = {0}
    grew = True
    while grew:
        grew = False
        for j in range(len(subset)):
            if j in reached:
                continue
            if any(elements[j] & elements[k] for k in reached):
                reached.add(j)
                grew = True
    return len(reached) == len(subset)


def brute_candidate_classes(
    i: InterestExpression, m: Graph
) -> Tuple[Tuple[Graph, ...], Graph]:
    """Exhaustive classifier: for every non-empty connected subset of BGP
    patterns, enumerate all consistent embeddings into the graph; each
    supporting triple's coverage is the largest subset it embeds under.
    Triples that match only optional patterns form the optional class.
    Filters play no role at this stage (they demote at assertion time)."""
    n = len(i.bgp.patterns)
    triples = list(m)
    coverage: Dict[Triple, int] = {}
    for size in range(n, 0, -1):
        for subset in itertools.combinations(range(n), size):
            if not _connected_subset(i.bgp.patterns, subset):
                continue
            pats = [i.bgp.patterns[k] for k in subset]
            for _, support in _subset_solutions(pats, triples, {}, ()):
                for t in support:
                    if coverage.get(t, -1) < size:
                        coverage[t] = size
    classes: List[Set[Triple]] = [set() for _ in range(n)]
    for t, cov in coverage.items():
        classes[n - cov].add(t)
    op_only: Set[Triple] = set()
    for qp in i.ogp.patterns:
        for t in triples:
            if t not in coverage and _brute_match(qp, t, {}) is not None:
                op_only.add(t)
    return tuple(Graph(c) for c in classes), Graph(op_only)
