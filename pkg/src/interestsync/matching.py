"""Partial-match enumeration, candidate generation, and candidate
assertion against a target store view.

Candidate generation classifies the triples of one changeset side by how
much of the interest's BGP their best partial match covers; assertion then
tries to complete each partial match from the target dataset. Target
triples enter only through assertion; enumeration joins changeset triples
exclusively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .index import TripleIndex
from .patterns import (
    Bgp,
    InterestExpression,
    Ogp,
    TriplePattern,
    eval_filters,
)
from .terms import Graph, Term, Triple, Variable

DEFAULT_MATCH_CAP = 10**6


class ResourceLimitError(RuntimeError):
    """Partial-match or join explosion beyond the configured cap."""


# --------------------------------------------------------------------------
# Store views
# --------------------------------------------------------------------------

class GraphView:
    """Read-only pattern-query view over an in-memory graph."""

    __slots__ = ("_index",)

    def __init__(self, source):
        if isinstance(source, TripleIndex):
            self._index = source
        else:
            self._index = TripleIndex(source)

    def match(self, s: Optional[Term], p: Optional[Term], o: Optional[Term]) -> List[Triple]:
        return self._index.match(s, p, o)

    def __contains__(self, t: Triple) -> bool:
        return t in self._index


class SubtractView:
    """A view minus a set of triples, without copying the underlying store."""

    __slots__ = ("_base", "_removed")

    def __init__(self, base, removed: Graph):
        self._base = base
        self._removed = removed

    def match(self, s, p, o) -> List[Triple]:
        removed = self._removed
        return [t for t in self._base.match(s, p, o) if t not in removed]

    def __contains__(self, t: Triple) -> bool:
        return t not in self._removed and t in self._base


class UnionView:
    """A view plus an extra triple set, without copying the store."""

    __slots__ = ("_base", "_extra")

    def __init__(self, base, extra):
        self._base = base
        self._extra = extra if isinstance(extra, TripleIndex) else TripleIndex(extra)

    def match(self, s, p, o) -> List[Triple]:
        base = self._base
        out = base.match(s, p, o)
        out.extend(t for t in self._extra.match(s, p, o) if t not in base)
        return out

    def __contains__(self, t: Triple) -> bool:
        return t in self._base or t in self._extra


# --------------------------------------------------------------------------
# Single-pattern matching
# --------------------------------------------------------------------------

def substitute(tp: TriplePattern, binding) -> Tuple[Optional[Term], Optional[Term], Optional[Term]]:
    """Ground positions of a pattern under a binding; None marks wildcards."""
    out = []
    for x in tp:
        if isinstance(x, Variable):
            out.append(binding.get(x))
        else:
            out.append(x)
    return tuple(out)


def match_triple(tp: TriplePattern, t: Triple, binding) -> Optional[Dict[Variable, Term]]:
    """Extend a binding so that the pattern matches the triple, or None."""
    new = None
    for x, v in zip(tp, t):
        if isinstance(x, Variable):
            bound = binding.get(x) if new is None or x not in new else new[x]
            if bound is None:
                if new is None:
                    new = dict(binding)
                new[x] = v
            elif bound != v:
                return None
        elif x != v:
            return None
    return dict(binding) if new is None else new


def _binding_key(binding) -> FrozenSet:
    return frozenset(binding.items())


# --------------------------------------------------------------------------
# Partial matches
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PartialMatch:
    """A maximal consistent match of a connected subset of BGP patterns
    (possibly empty, for pure-OGP matches) over one triple set."""

    binding: FrozenSet  # frozenset of (Variable, Term) pairs
    matched: FrozenSet[int]
    matched_op: FrozenSet[int]
    support: FrozenSet[Triple]
    op_matches: Tuple[Tuple[int, Triple], ...] = ()

    @property
    def binding_dict(self) -> Dict[Variable, Term]:
        return dict(self.binding)

    @property
    def op_support(self) -> FrozenSet[Triple]:
        return frozenset(t for _, t in self.op_matches)


def _pattern_adjacency(patterns: Sequence[TriplePattern]) -> List[Set[int]]:
    elements = [frozenset(tp) for tp in patterns]
    adj: List[Set[int]] = [set() for _ in patterns]
    for i in range(len(patterns)):
        for j in range(i + 1, len(patterns)):
            if elements[i] & elements[j]:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def enumerate_partial_matches(
    bgp: Bgp,
    ogp: Ogp,
    m: Graph,
    cap: int = DEFAULT_MATCH_CAP,
) -> List[PartialMatch]:
    """All maximal partial matches of the interest over the triple set ``m``.

    A match grows only along connected pattern subsets and joins triples of
    ``m`` exclusively. OGP patterns attach to each maximal match where
    their BGP-shared variables are bound consistently; every OGP-only
    triple is additionally reported as a pure-OGP match so its assertion
    against the target stays independent of the fate of any attachment.
    """
    idx = TripleIndex(m)
    patterns = bgp.patterns
    n = len(patterns)
    adj = _pattern_adjacency(patterns)
    bgp_vars = bgp.variables()

    # Every triple matching at least one BGP pattern (static, per-pattern).
    bgp_matching: Set[Triple] = set()
    seeds: List[Tuple[FrozenSet[int], Dict[Variable, Term]]] = []
    for i, tp in enumerate(patterns):
        for t in idx.match(*substitute(tp, {})):
            b = match_triple(tp, t, {})
            if b is not None:
                bgp_matching.add(t)
                seeds.append((frozenset((i,)), b))

    seen: Set[Tuple[FrozenSet[int], FrozenSet]] = set()
    maximal: List[Tuple[FrozenSet[int], Dict[Variable, Term]]] = []
    stack = seeds
    while stack:
        s_set, binding = stack.pop()
        key = (s_set, _binding_key(binding))
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > cap:
            raise ResourceLimitError(
                f"partial-match enumeration exceeded cap of {cap}")
        frontier: Set[int] = set()
        for i in s_set:
            frontier |= adj[i]
        frontier -= s_set
        can_extend = False
        for q in frontier:
            qp = patterns[q]
            for t in idx.match(*substitute(qp, binding)):
                b2 = match_triple(qp, t, binding)
                if b2 is not None:
                    can_extend = True
                    stack.append((s_set | {q}, b2))
        if not can_extend:
            maximal.append((s_set, binding))

    out: List[PartialMatch] = []
    for s_set, binding in maximal:
        support = frozenset(
            Triple(*substitute(patterns[i], binding)) for i in s_set)
        op_matches: List[Tuple[int, Triple]] = []
        matched_op: Set[int] = set()
        for qi, qp in enumerate(ogp.patterns):
            shared = qp.variables() & bgp_vars
            if not all(v in binding for v in shared):
                continue
            for t in idx.match(*substitute(qp, binding)):
                if match_triple(qp, t, binding) is not None:
                    op_matches.append((qi, t))
                    matched_op.add(qi)
        out.append(PartialMatch(
            binding=_binding_key(binding),
            matched=s_set,
            matched_op=frozenset(matched_op),
            support=support,
            op_matches=tuple(op_matches),
        ))

    # Pure-OGP matches: OGP-matching triples with no BGP pattern match.
    for qi, qp in enumerate(ogp.patterns):
        for t in idx.match(*substitute(qp, {})):
            if t in bgp_matching:
                continue
            b = match_triple(qp, t, {})
            if b is None:
                continue
            out.append(PartialMatch(
                binding=_binding_key(b),
                matched=frozenset(),
                matched_op=frozenset((qi,)),
                support=frozenset(),
                op_matches=((qi, t),),
            ))
    return out


# --------------------------------------------------------------------------
# Candidate generation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateTuple:
    """Changeset triples classified by decreasing BGP match coverage.

    ``c[k]`` holds triples whose best partial match covers n−k BGP
    patterns; ``c_op`` holds triples matching only OGP patterns. The
    classes are pairwise disjoint. Witnesses carry the matches themselves
    so assertion can complete each independently.
    """

    c: Tuple[Graph, ...]
    c_op: Graph
    witnesses: Tuple[PartialMatch, ...]

    @property
    def classified(self) -> Graph:
        out = self.c_op
        for g in self.c:
            out = out | g
        return out


def generate_candidates(
    i: InterestExpression,
    m: Graph,
    cap: int = DEFAULT_MATCH_CAP,
) -> CandidateTuple:
    n = len(i.bgp.patterns)
    witnesses = enumerate_partial_matches(i.bgp, i.ogp, m, cap)
    coverage: Dict[Triple, int] = {}
    op_only: Set[Triple] = set()
    for w in witnesses:
        size = len(w.matched)
        for t in w.support:
            if coverage.get(t, -1) < size:
                coverage[t] = size
        if not w.matched:
            op_only.update(w.op_support)
        else:
            for t in w.op_support:
                if t not in coverage:
                    op_only.add(t)
    classes: List[Set[Triple]] = [set() for _ in range(n)]
    for t, cov in coverage.items():
        classes[n - cov].add(t)
    return CandidateTuple(
        c=tuple(Graph(c) for c in classes),
        c_op=Graph(op_only),
        witnesses=tuple(witnesses),
    )


# --------------------------------------------------------------------------
# Joins against a view
# --------------------------------------------------------------------------

def join_patterns(
    view,
    patterns: Sequence[TriplePattern],
    binding: Dict[Variable, Term],
    cap: int = DEFAULT_MATCH_CAP,
    limit: Optional[int] = None,
) -> List[Tuple[Dict[Variable, Term], FrozenSet[Triple]]]:
    """All consistent solutions of the patterns over the view, extending
    the given binding. Most-bound-first pattern ordering."""
    solutions: List[Tuple[Dict[Variable, Term], FrozenSet[Triple]]] = []
    steps = 0

    def unbound(tp: TriplePattern, b) -> int:
        return sum(1 for x in tp if isinstance(x, Variable) and x not in b)

    def recurse(remaining: List[TriplePattern], b, support: Tuple[Triple, ...]):
        nonlocal steps
        if limit is not None and len(solutions) >= limit:
            return
        if not remaining:
            solutions.append((b, frozenset(support)))
            return
        best = min(range(len(remaining)), key=lambda k: unbound(remaining[k], b))
        tp = remaining[best]
        rest = remaining[:best] + remaining[best + 1:]
        for t in view.match(*substitute(tp, b)):
            b2 = match_triple(tp, t, b)
            if b2 is None:
                continue
            steps += 1
            if steps > cap:
                raise ResourceLimitError(f"join exceeded cap of {cap}")
            recurse(rest, b2, support + (t,))
            if limit is not None and len(solutions) >= limit:
                return

    recurse(list(patterns), dict(binding), ())
    return solutions


def match_pattern(view, tp: TriplePattern, mu) -> List[Tuple[Triple, Dict[Variable, Term]]]:
    """Every view triple matching the pattern under the binding, paired
    with the extended binding."""
    out = []
    for t in view.match(*substitute(tp, mu)):
        b2 = match_triple(tp, t, mu)
        if b2 is not None:
            out.append((t, b2))
    return out


def _op_completions(view, ogp: Ogp, full_binding) -> Set[Triple]:
    """View triples matching OGP patterns consistently with a full BGP
    solution, subject to the OGP filters."""
    out: Set[Triple] = set()
    for qp in ogp.patterns:
        for t in view.match(*substitute(qp, full_binding)):
            b2 = match_triple(qp, t, full_binding)
            if b2 is not None and eval_filters(ogp.filters, b2):
                out.add(t)
    return out


# --------------------------------------------------------------------------
# Candidate assertion
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CompletedWitness:
    """A partial match restored to a full, filter-passing BGP match using
    target context."""

    witness: PartialMatch
    completion: Graph  # target triples covering the missing BGP patterns
    op_completion: Graph  # target OGP triples consistent with the solutions
    op_support: Graph  # changeset OGP triples surviving the OGP filters

    def changeset_side(self) -> Graph:
        return Graph(self.witness.support) | self.op_support

    def target_side(self) -> Graph:
        return self.completion | self.op_completion


@dataclass(frozen=True)
class UncompletedWitness:
    witness: PartialMatch
    partial_context: Graph  # target triples matching some missing pattern

    def changeset_side(self) -> Graph:
        return Graph(self.witness.support) | Graph(self.witness.op_support)


@dataclass(frozen=True)
class AssertionTuple:
    """Missing-triple extraction from the target, aligned with the
    candidate classes: ``bgp_completions[k]`` completes ``c[k]``
    candidates, ``op_completions`` adds optional context for full matches,
    ``base_completions`` holds full-BGP context found for OGP-only
    candidates."""

    bgp_completions: Dict[int, Graph]
    op_completions: Graph
    base_completions: Graph
    completed: Tuple[CompletedWitness, ...]
    uncompleted: Tuple[UncompletedWitness, ...]


def assert_candidates(
    i: InterestExpression,
    ct: CandidateTuple,
    target,
    cap: int = DEFAULT_MATCH_CAP,
) -> AssertionTuple:
    """Try to complete every witness of the candidate tuple from the
    target view; filters demote structurally-complete witnesses whose
    bindings fail them."""
    bgp, ogp = i.bgp, i.ogp
    n = len(bgp.patterns)
    all_indices = frozenset(range(n))
    completed: List[CompletedWitness] = []
    uncompleted: List[UncompletedWitness] = []
    bgp_completions: Dict[int, Set[Triple]] = {}
    op_completions: Set[Triple] = set()
    base_completions: Set[Triple] = set()

    for w in ct.witnesses:
        binding = w.binding_dict
        missing = all_indices - w.matched
        if missing:
            solutions = join_patterns(
                target, [bgp.patterns[q] for q in sorted(missing)], binding, cap)
        else:
            solutions = [(binding, frozenset())]
        ok = [(b, sup) for b, sup in solutions if eval_filters(bgp.filters, b)]
        if not ok:
            partial: Set[Triple] = set()
            for q in missing:
                for t, _ in match_pattern(target, bgp.patterns[q], binding):
                    partial.add(t)
            uncompleted.append(UncompletedWitness(w, Graph(partial)))
            continue

        completion: Set[Triple] = set()
        opcomp: Set[Triple] = set()
        op_keep: Set[Triple] = set()
        for b, sup in ok:
            completion |= sup
            opcomp |= _op_completions(target, ogp, b)
            for qi, t in w.op_matches:
                b2 = match_triple(ogp.patterns[qi], t, b)
                if b2 is not None and eval_filters(ogp.filters, b2):
                    op_keep.add(t)
        cw = CompletedWitness(w, Graph(completion), Graph(opcomp), Graph(op_keep))
        completed.append(cw)

        if not w.matched:
            base_completions |= completion | opcomp
        else:
            k = n - len(w.matched)
            if k == 0:
                op_completions |= opcomp
            else:
                bgp_completions.setdefault(k, set()).update(completion | opcomp)

    return AssertionTuple(
        bgp_completions={k: Graph(v) for k, v in bgp_completions.items()},
        op_completions=Graph(op_completions),
        base_completions=Graph(base_completions),
        completed=tuple(completed),
        uncompleted=tuple(uncompleted),
    )


def full_match_parts(
    i: InterestExpression,
    pool: Graph,
    view,
    cap: int = DEFAULT_MATCH_CAP,
) -> Tuple[Graph, Graph]:
    """Split the full, filter-passing matches over view ∪ pool that touch
    the pool into (pool-side triples, view-side context triples).

    Each pool triple is asserted independently per pattern it matches, so
    a triple completable from the view is found even when joining it with
    other pool triples would fail the filters. Optional triples ride along
    full matches from both sides.
    """
    bgp, ogp = i.bgp, i.ogp
    pool_index = TripleIndex(pool)
    union = UnionView(view, pool_index)
    pool_part: Set[Triple] = set()
    context: Set[Triple] = set()

    def record(support: Iterable[Triple], binding):
        for t in support:
            (pool_part if t in pool else context).add(t)
        for t in _op_completions(union, ogp, binding):
            (pool_part if t in pool else context).add(t)

    seen_seeds: Set[Tuple[int, FrozenSet]] = set()
    for t in pool:
        for pi_, tp in enumerate(bgp.patterns):
            b = match_triple(tp, t, {})
            if b is None:
                continue
            seed = (pi_, _binding_key(b))
            if seed in seen_seeds:
                continue
            seen_seeds.add(seed)
            rest = [bgp.patterns[q] for q in range(len(bgp.patterns)) if q != pi_]
            for bb, sup in join_patterns(union, rest, b, cap):
                if eval_filters(bgp.filters, bb):
                    record(set(sup) | {t}, bb)
        for qi, qp in enumerate(ogp.patterns):
            b = match_triple(qp, t, {})
            if b is None:
                continue
            seed = (len(bgp.patterns) + qi, _binding_key(b))
            if seed in seen_seeds:
                continue
            seen_seeds.add(seed)
            for bb, sup in join_patterns(union, bgp.patterns, b, cap):
                if eval_filters(bgp.filters, bb) and eval_filters(ogp.filters, bb):
                    for ct in sup:
                        (pool_part if ct in pool else context).add(ct)
                    pool_part.add(t)
    return Graph(pool_part), Graph(context)


# --------------------------------------------------------------------------
# Full-match helpers shared by slicing and the deletion residue guard
# --------------------------------------------------------------------------

def full_match_slice(i: InterestExpression, view, cap: int = DEFAULT_MATCH_CAP) -> Graph:
    """All triples participating in full, filter-passing matches of the
    interest over the view: BGP support plus consistent OGP triples."""
    out: Set[Triple] = set()
    for b, support in join_patterns(view, i.bgp.patterns, {}, cap):
        if not eval_filters(i.bgp.filters, b):
            continue
        out |= support
        out |= _op_completions(view, i.ogp, b)
    return Graph(out)


def participates_in_full_match(
    i: InterestExpression,
    t: Triple,
    view,
    cap: int = DEFAULT_MATCH_CAP,
) -> bool:
    """Whether the triple is part of some full, filter-passing match over
    the view (as BGP support or as consistent optional context)."""
    bgp, ogp = i.bgp, i.ogp
    for pi, tp in enumerate(bgp.patterns):
        b = match_triple(tp, t, {})
        if b is None:
            continue
        rest = [bgp.patterns[q] for q in range(len(bgp.patterns)) if q != pi]
        for bb, _ in join_patterns(view, rest, b, cap):
            if eval_filters(bgp.filters, bb):
                return True
    for qi, qp in enumerate(ogp.patterns):
        b = match_triple(qp, t, {})
        if b is None:
            continue
        for bb, _ in join_patterns(view, bgp.patterns, b, cap):
            if eval_filters(bgp.filters, bb) and eval_filters(ogp.filters, bb):
                return True
    return False
