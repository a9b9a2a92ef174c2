"""Interest evaluation over a changeset and transactional propagation of
the results into the target and potentially-interesting stores.

Evaluation order within one changeset is delete-before-add: deletions are
evaluated against the target as of the previous changeset; additions then
see the target minus the just-deleted interesting triples, so context that
the deletion phase demoted is still visible for re-promotion.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Set, Tuple

from .changeset import Changeset
from .matching import (
    AssertionTuple,
    CandidateTuple,
    DEFAULT_MATCH_CAP,
    SubtractView,
    assert_candidates,
    full_match_parts,
    generate_candidates,
    participates_in_full_match,
)
from .patterns import InterestExpression
from .terms import EMPTY_GRAPH, Graph, Triple


@dataclass(frozen=True)
class DeletionResult:
    """Outcome of evaluating the removed side of a changeset.

    r: interesting removed triples (their full match was restorable with
    target context, so they really leave the replica).
    r_i: potentially interesting removed triples (no completing context;
    they only ever existed in changesets, so they leave the side store).
    r_prime: target residue of broken matches, demoted to potentially
    interesting. A completion triple is demoted only if it supports no
    remaining full match once r is gone (residue guard).
    """

    r: Graph
    r_i: Graph
    r_prime: Graph
    candidates: Optional[CandidateTuple] = None
    assertion: Optional[AssertionTuple] = None


@dataclass(frozen=True)
class AdditionResult:
    """Outcome of evaluating the added side (joined with the potentially
    interesting partition) of a changeset."""

    a: Graph  # interesting added: full matches incl. target completions
    a_i: Graph  # potentially interesting added
    a_prime: Graph  # target context related to uncompleted witnesses
    candidates: Optional[CandidateTuple] = None
    assertion: Optional[AssertionTuple] = None


@dataclass(frozen=True)
class InterestingChangeset:
    removed: Graph
    added: Graph

    def is_empty(self) -> bool:
        return not self.removed and not self.added


@dataclass(frozen=True)
class PIChangeset:
    removed: Graph
    added: Graph

    def is_empty(self) -> bool:
        return not self.removed and not self.added


@dataclass(frozen=True)
class PropagationReport:
    interest_id: str
    changeset_id: str
    removed_interesting: int
    added_interesting: int
    pi_removed: int
    pi_added: int
    wall_time_ms: float
    total_removed: int = 0  # raw changeset sizes, for reduction stats
    total_added: int = 0

    def format_line(self) -> str:
        return "\t".join((
            self.interest_id,
            self.changeset_id,
            str(self.removed_interesting),
            str(self.added_interesting),
            str(self.pi_removed),
            str(self.pi_added),
            f"{self.wall_time_ms:.1f}",
        ))


def evaluate_deletions(
    i: InterestExpression,
    d: Graph,
    target,
    cap: int = DEFAULT_MATCH_CAP,
) -> DeletionResult:
    ct = generate_candidates(i, d, cap)
    at = assert_candidates(i, ct, target, cap)

    # A removed triple is interesting iff it took part in a full,
    # filter-passing match of the pre-deletion state (target joined with
    # the removed side); each triple is asserted independently so one
    # failing join cannot shadow a passing one under another binding.
    r, context = full_match_parts(i, d, target, cap)
    r_i = ct.classified - r

    remaining = SubtractView(target, r)
    r_prime = Graph(
        t for t in context - r
        if not participates_in_full_match(i, t, remaining, cap)
    )
    return DeletionResult(r=r, r_i=r_i, r_prime=r_prime,
                          candidates=ct, assertion=at)


def evaluate_additions(
    i: InterestExpression,
    a_in: Graph,
    pi: Graph,
    target,
    cap: int = DEFAULT_MATCH_CAP,
) -> AdditionResult:
    pool = a_in | pi
    ct = generate_candidates(i, pool, cap)
    at = assert_candidates(i, ct, target, cap)

    pool_part, context = full_match_parts(i, pool, target, cap)
    a = pool_part | context
    a_i = ct.classified - a
    a_prime: Set[Triple] = set()
    for uw in at.uncompleted:
        a_prime |= uw.partial_context.triples
    a_prime -= a.triples
    return AdditionResult(a=a, a_i=a_i, a_prime=Graph(a_prime),
                          candidates=ct, assertion=at)


@dataclass(frozen=True)
class EvaluationResult:
    deletion: DeletionResult
    addition: AdditionResult
    interesting: InterestingChangeset
    potentially_interesting: PIChangeset


def evaluate_interest(
    i: InterestExpression,
    cs: Changeset,
    target,
    pi: Graph = EMPTY_GRAPH,
    cap: int = DEFAULT_MATCH_CAP,
) -> EvaluationResult:
    """Full evaluation of one changeset for one interest.

    Returns the interesting changeset for the target dataset and the
    potentially interesting changeset for the side store. Promoted triples
    never land in the side store, and target residue that the source
    itself deleted is dropped rather than demoted.
    """
    dres = evaluate_deletions(i, cs.removed, target, cap)
    addition_view = SubtractView(target, dres.r)
    # Side-store triples deleted by this changeset (delete-before-add)
    # cannot support new matches.
    gone = cs.removed - cs.added
    ares = evaluate_additions(i, cs.added, pi - gone, addition_view, cap)

    interesting = InterestingChangeset(
        removed=dres.r | dres.r_prime,
        added=ares.a,
    )
    # Triples the source deleted (and did not re-add) can never complete a
    # match later, so they must not linger in the side store.
    pi_added = ((ares.a_i | dres.r_prime) - gone) - ares.a
    potentially = PIChangeset(removed=dres.r_i, added=pi_added)
    return EvaluationResult(dres, ares, interesting, potentially)


def propagate(
    i: InterestExpression,
    cs: Changeset,
    stores,
    cap: int = DEFAULT_MATCH_CAP,
    on_evaluated=None,
) -> PropagationReport:
    """Evaluate a changeset and apply both resulting changesets atomically.

    The target loses the interesting-removed triples and residue, gains
    the interesting-added triples; the per-interest side partition loses
    its removed and promoted triples and gains the new potentially
    interesting ones. On store failure neither store changes.
    """
    started = time.perf_counter()
    pi_graph = stores.pi.partition_graph(i.id)
    result = evaluate_interest(i, cs, stores.target.view(), pi_graph, cap)
    ic = result.interesting
    pc = result.potentially_interesting
    if on_evaluated is not None:
        on_evaluated(result)
    with stores.transaction():
        stores.target.remove_all(ic.removed)
        stores.target.add_all(ic.added)
        stores.pi.remove_all(i.id, pc.removed | ic.added)
        stores.pi.add_all(i.id, pc.added)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return PropagationReport(
        interest_id=i.id,
        changeset_id=cs.sequence_id or "-",
        removed_interesting=len(ic.removed),
        added_interesting=len(ic.added),
        pi_removed=len(pc.removed),
        pi_added=len(pc.added),
        wall_time_ms=elapsed_ms,
        total_removed=len(cs.removed),
        total_added=len(cs.added),
    )
