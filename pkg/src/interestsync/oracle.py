"""Desk-scale ground truth: full-mirror baseline, brute-force slice
computation, store comparison, and a deterministic synthetic workload
generator.

The slice here is computed by plain nested-loop enumeration over a list
of triples, deliberately independent of the indexed match engine, so the
two routes can check each other. Correctness of the whole pipeline is
judged on the target dataset alone; the potentially-interesting store is
an implementation device.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .changeset import Changeset, apply_changeset
from .patterns import (
    Bgp,
    Comparison,
    InterestExpression,
    Ogp,
    TriplePattern,
    eval_filters,
)
from .terms import (
    Graph,
    Iri,
    Literal,
    RDF_TYPE,
    Term,
    Triple,
    Variable,
    integer_literal,
    iri,
)


def _triple_key(t: Triple):
    from .ntriples import serialize_triple

    return serialize_triple(t)


def mirror_apply(dump: Graph, changesets: Sequence[Changeset]) -> Graph:
    """The live-mirror baseline: fold plain changeset application."""
    state = dump
    for cs in changesets:
        state = apply_changeset(state, cs)
    return state


# --------------------------------------------------------------------------
# Brute-force slice
# --------------------------------------------------------------------------

def _brute_match(tp: TriplePattern, t: Triple, binding: Dict) -> Optional[Dict]:
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


def _brute_solutions(patterns, triples: List[Triple], binding: Dict,
                     support: Tuple[Triple, ...]):
    if not patterns:
        yield binding, support
        return
    tp = patterns[0]
    for t in triples:
        b2 = _brute_match(tp, t, binding)
        if b2 is not None:
            yield from _brute_solutions(patterns[1:], triples, b2, support + (t,))


def slice_graph(i: InterestExpression, v: Graph) -> Graph:
    """All triples participating in full, filter-passing matches of the
    interest over the dataset, plus consistent optional triples."""
    triples = list(v)
    out: Set[Triple] = set()
    for binding, support in _brute_solutions(list(i.bgp.patterns), triples, {}, ()):
        if not eval_filters(i.bgp.filters, binding):
            continue
        out.update(support)
        for qp in i.ogp.patterns:
            for t in triples:
                b2 = _brute_match(qp, t, binding)
                if b2 is not None and eval_filters(i.ogp.filters, b2):
                    out.add(t)
    return Graph(out)


@dataclass(frozen=True)
class CompareReport:
    missing: Graph  # expected but absent
    extra: Graph  # present but unexpected

    @property
    def equal(self) -> bool:
        return not self.missing and not self.extra


def compare(target: Graph, expected: Graph) -> CompareReport:
    return CompareReport(missing=expected - target, extra=target - expected)


# --------------------------------------------------------------------------
# Workload generation
# --------------------------------------------------------------------------

NS = "http://workload.example.org/"
_TYPE = iri(NS + "Thing")
_REL = iri(NS + "rel")
_HUB_ATTR = iri(NS + "hubval")
_OPT = iri(NS + "note")
FILTER_THRESHOLD = 100


@dataclass
class WorkloadParams:
    """Knobs for the synthetic entity-centric workload.

    Sizes are kept small enough that the brute-force slice stays
    sub-second; the generator is fully determined by (seed, params).
    """

    n_entities: int = 25
    n_hubs: int = 4
    n_changesets: int = 20
    ops_per_changeset: int = 4
    noise_ratio: float = 0.4
    n_noise_dump: int = 30
    max_bgp_patterns: int = 4  # 2..4 chosen per seed
    allow_chain: bool = True
    allow_optional: bool = True
    allow_filter: bool = True
    max_split: int = 3  # chunks an entity add/delete may spread over


@dataclass
class Workload:
    seed: int
    params: WorkloadParams
    interest: InterestExpression
    dump: Graph
    changesets: List[Changeset]


@dataclass
class _Entity:
    node: Iri
    values: Dict[Iri, int]
    hub: Optional[Iri]
    opt_notes: Set[str] = field(default_factory=set)
    status: str = "complete"  # complete | adding | deleting | gone
    locked_failing: bool = False  # dump entity invisible since init; must stay so


class _Generator:
    def __init__(self, seed: int, params: WorkloadParams):
        self.rng = random.Random(seed)
        self.params = params
        self.seed = seed
        self.mirror: Set[Triple] = set()
        self.entities: Dict[Iri, _Entity] = {}
        self.hub_values: Dict[Iri, int] = {}
        self.noise: Set[Triple] = set()
        self.counter = 0
        self._pending_complete: List[Tuple[int, _Entity]] = []
        self.interest = self._make_interest()

    # -- interest shape --

    def _make_interest(self) -> InterestExpression:
        rng = self.rng
        p = self.params
        n = rng.randint(2, max(2, p.max_bgp_patterns))
        x = Variable("x")
        patterns: List[TriplePattern] = [TriplePattern(x, RDF_TYPE, _TYPE)]
        self.chain = bool(p.allow_chain and n >= 3 and rng.random() < 0.4)
        n_attrs = n - 1 - (2 if self.chain else 0)
        if self.chain:
            y, w = Variable("y"), Variable("w")
            patterns.append(TriplePattern(x, _REL, y))
            patterns.append(TriplePattern(y, _HUB_ATTR, w))
        self.attr_preds = [iri(NS + f"attr{j}") for j in range(n_attrs)]
        value_vars = [Variable(f"v{j}") for j in range(n_attrs)]
        for pred, var in zip(self.attr_preds, value_vars):
            patterns.append(TriplePattern(x, pred, var))
        filters = ()
        self.filtered = bool(p.allow_filter and n_attrs > 0 and rng.random() < 0.5)
        if self.filtered:
            filters = (Comparison(">", value_vars[0], integer_literal(FILTER_THRESHOLD)),)
        self.optional = bool(p.allow_optional and rng.random() < 0.5)
        ogp = Ogp((TriplePattern(x, _OPT, Variable("o")),)) if self.optional else Ogp()
        return InterestExpression(
            id=f"w{self.seed}",
            bgp=Bgp(tuple(patterns), filters),
            ogp=ogp,
            source=iri(NS + "changesets"),
        )

    # -- entity helpers --

    def _fresh(self, kind: str) -> Iri:
        self.counter += 1
        return iri(NS + f"{kind}{self.counter}")

    def _passing_value(self) -> int:
        return self.rng.randint(FILTER_THRESHOLD + 1, FILTER_THRESHOLD + 100)

    def _failing_value(self) -> int:
        return self.rng.randint(0, FILTER_THRESHOLD)

    def _value(self, locked_failing: bool) -> int:
        if not self.filtered:
            return self.rng.randint(0, 200)
        if locked_failing:
            return self._failing_value()
        return self.rng.randint(0, 200)

    def _new_entity(self, locked_failing: bool = False,
                    in_dump: bool = False) -> _Entity:
        node = self._fresh("e")
        hub = None
        if self.chain:
            if self.hub_values and self.rng.random() < 0.7:
                hub = self.rng.choice(sorted(self.hub_values, key=lambda h: h.value))
            else:
                hub = self._fresh("h")
                self.hub_values[hub] = self.rng.randint(0, 1000)
        values = {}
        for j, pred in enumerate(self.attr_preds):
            if self.filtered and j == 0:
                if locked_failing:
                    values[pred] = self._failing_value()
                elif in_dump:
                    # Dump entities invisible at init never reach the side
                    # store, so they must not become visible later; the
                    # locked ones stay failing, the rest start passing.
                    values[pred] = self._passing_value()
                else:
                    values[pred] = self._value(locked_failing)
            else:
                values[pred] = self.rng.randint(0, 200)
        entity = _Entity(node=node, values=values, hub=hub,
                         locked_failing=locked_failing)
        self.entities[node] = entity
        return entity

    def _entity_triples(self, e: _Entity, include_hub: bool = True) -> List[Triple]:
        out = [Triple(e.node, RDF_TYPE, _TYPE)]
        if e.hub is not None:
            out.append(Triple(e.node, _REL, e.hub))
            if include_hub:
                out.append(Triple(e.hub, _HUB_ATTR, integer_literal(self.hub_values[e.hub])))
        for pred, value in e.values.items():
            out.append(Triple(e.node, pred, integer_literal(value)))
        for note in sorted(e.opt_notes):
            out.append(Triple(e.node, _OPT, Literal(note)))
        return out

    def _noise_triple(self) -> Triple:
        subject = self._fresh("n")
        pred = iri(NS + f"noise{self.rng.randint(0, 4)}")
        return Triple(subject, pred, integer_literal(self.rng.randint(0, 10**6)))

    # -- dump --

    def build_dump(self) -> Graph:
        p = self.params
        for _ in range(p.n_entities):
            locked = self.filtered and self.rng.random() < 0.3
            e = self._new_entity(locked_failing=locked, in_dump=True)
            if self.optional and self.rng.random() < 0.4:
                e.opt_notes.add(f"note-{self.counter}")
            self.mirror.update(self._entity_triples(e))
        for _ in range(p.n_noise_dump):
            t = self._noise_triple()
            self.noise.add(t)
            self.mirror.add(t)
        return Graph(self.mirror)

    # -- changeset ops --

    def _op_noise(self, removed: Set[Triple], added: Set[Triple]):
        live = self.noise & self.mirror
        if live and self.rng.random() < 0.4:
            removed.add(self.rng.choice(sorted(live, key=_triple_key)))
        else:
            t = self._noise_triple()
            self.noise.add(t)
            added.add(t)

    def _op_interesting(self, step, pending, removed: Set[Triple], added: Set[Triple]):
        rng = self.rng
        complete = [e for e in self.entities.values() if e.status == "complete"]
        choice = rng.random()
        if choice < 0.35 and complete:
            self._op_update(rng.choice(complete), removed, added)
        elif choice < 0.55:
            self._op_add_entity(step, pending, added)
        elif choice < 0.75 and complete:
            self._op_delete_entity(rng.choice(complete), step, pending, removed)
        elif self.optional and complete:
            self._op_toggle_optional(rng.choice(complete), removed, added)
        else:
            self._op_add_entity(step, pending, added)

    def _op_update(self, e: _Entity, removed: Set[Triple], added: Set[Triple]):
        rng = self.rng
        if e.hub is not None and rng.random() < 0.3:
            old = Triple(e.hub, _HUB_ATTR, integer_literal(self.hub_values[e.hub]))
            self.hub_values[e.hub] = rng.randint(0, 1000)
            new = Triple(e.hub, _HUB_ATTR, integer_literal(self.hub_values[e.hub]))
            if old in self.mirror:
                removed.add(old)
            added.add(new)
            return
        if not e.values:
            return
        pred = rng.choice(sorted(e.values, key=lambda x: x.value))
        old = Triple(e.node, pred, integer_literal(e.values[pred]))
        is_filter_attr = self.filtered and self.attr_preds and pred == self.attr_preds[0]
        e.values[pred] = self._value(e.locked_failing) if is_filter_attr \
            else rng.randint(0, 200)
        new = Triple(e.node, pred, integer_literal(e.values[pred]))
        if old in self.mirror:
            removed.add(old)
        added.add(new)

    def _op_add_entity(self, step, pending, added: Set[Triple]):
        rng = self.rng
        e = self._new_entity()
        e.status = "adding"
        if self.optional and rng.random() < 0.4:
            e.opt_notes.add(f"note-{self.counter}")
        triples = self._entity_triples(e)
        rng.shuffle(triples)
        chunks = rng.randint(1, self.params.max_split)
        parts = [triples[k::chunks] for k in range(chunks)]
        added.update(parts[0])
        for offset, part in enumerate(parts[1:], start=1):
            when = step + offset
            if when < self.params.n_changesets:
                pending.setdefault(when, []).append((set(), set(part)))
            else:
                added.update(part)  # no room to split; ship now
        self._schedule_completion(e, step + chunks)

    def _schedule_completion(self, e: _Entity, when: int):
        # Later ops only touch entities whose chunks have all shipped.
        self._pending_complete.append((when, e))

    def _op_delete_entity(self, e: _Entity, step, pending, removed: Set[Triple]):
        rng = self.rng
        e.status = "deleting"
        triples = [t for t in self._entity_triples(e, include_hub=False)
                   if t in self.mirror]
        hub_shared = any(
            other.hub == e.hub and other is not e and other.status != "gone"
            for other in self.entities.values()) if e.hub else False
        if e.hub is not None and not hub_shared and rng.random() < 0.5:
            hub_triple = Triple(e.hub, _HUB_ATTR, integer_literal(self.hub_values[e.hub]))
            if hub_triple in self.mirror:
                triples.append(hub_triple)
        rng.shuffle(triples)
        chunks = rng.randint(1, self.params.max_split)
        parts = [triples[k::chunks] for k in range(chunks)]
        removed.update(parts[0])
        for offset, part in enumerate(parts[1:], start=1):
            when = step + offset
            if when < self.params.n_changesets:
                pending.setdefault(when, []).append((set(part), set()))
            else:
                removed.update(part)
        e.status = "gone"

    def _op_toggle_optional(self, e: _Entity, removed: Set[Triple], added: Set[Triple]):
        if e.opt_notes and self.rng.random() < 0.5:
            note = sorted(e.opt_notes)[0]
            e.opt_notes.discard(note)
            t = Triple(e.node, _OPT, Literal(note))
            if t in self.mirror:
                removed.add(t)
        else:
            note = f"note-{self.counter}-{len(e.opt_notes)}"
            e.opt_notes.add(note)
            added.add(Triple(e.node, _OPT, Literal(note)))

    def settle(self, step: int):
        for when, e in list(self._pending_complete):
            if when <= step and e.status == "adding":
                e.status = "complete"
                self._pending_complete.remove((when, e))


def generate_workload(seed: int, params: Optional[WorkloadParams] = None) -> Workload:
    """Deterministic workload: same seed and params, same workload."""
    params = params or WorkloadParams()
    gen = _Generator(seed, params)
    dump = gen.build_dump()

    p = params
    pending: Dict[int, List[Tuple[Set[Triple], Set[Triple]]]] = {}
    changesets: List[Changeset] = []
    for step in range(p.n_changesets):
        gen.settle(step)
        removed: Set[Triple] = set()
        added: Set[Triple] = set()
        for rem_chunk, add_chunk in pending.pop(step, []):
            removed |= rem_chunk
            added |= add_chunk
        for _ in range(p.ops_per_changeset):
            if gen.rng.random() < p.noise_ratio:
                gen._op_noise(removed, added)
            else:
                gen._op_interesting(step, pending, removed, added)
        # Overlap is allowed: delete-before-add keeps a re-added triple.
        removed &= gen.mirror
        cs = Changeset(removed=Graph(removed), added=Graph(added),
                       sequence_id=f"{step + 1:06d}")
        gen.mirror -= removed
        gen.mirror |= added
        changesets.append(cs)
    return Workload(seed=seed, params=params, interest=gen.interest,
                    dump=dump, changesets=changesets)


def write_changeset_tree(workload: Workload, root, compress: bool = False,
                         year: int = 2015, month: int = 1, day: int = 1,
                         hour: int = 0):
    """Export a workload's changesets as a publication folder tree, so the
    full discovery/ingestion path can be exercised end to end."""
    import gzip as _gzip
    from pathlib import Path

    from .ntriples import serialize_ntriples

    hour_dir = Path(root) / f"{year:04d}" / f"{month:02d}" / f"{day:02d}" / f"{hour:02d}"
    hour_dir.mkdir(parents=True, exist_ok=True)
    for serial, cs in enumerate(workload.changesets, start=1):
        for side, graph in (("removed", cs.removed), ("added", cs.added)):
            name = f"{serial:06d}.{side}.nt"
            payload = serialize_ntriples(graph)
            if compress:
                (hour_dir / (name + ".gz")).write_bytes(
                    _gzip.compress(payload.encode("utf-8")))
            else:
                (hour_dir / name).write_text(payload, encoding="utf-8")
