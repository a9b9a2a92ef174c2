"""A triple index with SPO, POS and OSP orderings.

Backs both the persistent stores and the ephemeral per-changeset match
indexes. All single-pattern lookups run off whichever index matches the
bound positions; `match` with three Nones walks the whole set.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Optional

from .terms import Graph, Term, Triple


class TripleIndex:
    __slots__ = ("_spo", "_pos", "_osp", "_count")

    def __init__(self, triples: Iterable[Triple] = ()):
        self._spo: Dict[Term, Dict[Term, Dict[Term, Triple]]] = {}
        self._pos: Dict[Term, Dict[Term, Dict[Term, Triple]]] = {}
        self._osp: Dict[Term, Dict[Term, Dict[Term, Triple]]] = {}
        self._count = 0
        for t in triples:
            self.add(t)

    @classmethod
    def from_graph(cls, g: Graph) -> "TripleIndex":
        return cls(g)

    def __len__(self) -> int:
        return self._count

    def __contains__(self, t: Triple) -> bool:
        leaf = self._spo.get(t.subject)
        if leaf is None:
            return False
        leaf = leaf.get(t.predicate)
        return leaf is not None and t.object in leaf

    def __iter__(self) -> Iterator[Triple]:
        for by_p in self._spo.values():
            for by_o in by_p.values():
                yield from by_o.values()

    def add(self, t: Triple) -> bool:
        """Insert; returns False if the triple was already present."""
        leaf = self._spo.setdefault(t.subject, {}).setdefault(t.predicate, {})
        if t.object in leaf:
            return False
        leaf[t.object] = t
        self._pos.setdefault(t.predicate, {}).setdefault(t.object, {})[t.subject] = t
        self._osp.setdefault(t.object, {}).setdefault(t.subject, {})[t.predicate] = t
        self._count += 1
        return True

    def remove(self, t: Triple) -> bool:
        """Delete; returns False if the triple was absent."""
        by_p = self._spo.get(t.subject)
        if by_p is None:
            return False
        by_o = by_p.get(t.predicate)
        if by_o is None or t.object not in by_o:
            return False
        del by_o[t.object]
        if not by_o:
            del by_p[t.predicate]
            if not by_p:
                del self._spo[t.subject]
        self._prune(self._pos, t.predicate, t.object, t.subject)
        self._prune(self._osp, t.object, t.subject, t.predicate)
        self._count -= 1
        return True

    @staticmethod
    def _prune(index, a, b, c):
        level1 = index[a]
        level2 = level1[b]
        del level2[c]
        if not level2:
            del level1[b]
            if not level1:
                del index[a]

    def match(
        self,
        s: Optional[Term],
        p: Optional[Term],
        o: Optional[Term],
        force_index: Optional[str] = None,
    ) -> List[Triple]:
        """All triples matching the partially-ground pattern (None = wildcard).

        force_index pins the traversal to "spo", "pos" or "osp"; the result
        must not depend on the choice (tested as an invariant).
        """
        if force_index is None:
            if s is not None:
                force_index = "spo"
            elif p is not None:
                force_index = "pos"
            elif o is not None:
                force_index = "osp"
            else:
                force_index = "spo"
        if force_index == "spo":
            return self._scan(self._spo, s, p, o, lambda a, b, c: (a, b, c))
        if force_index == "pos":
            return self._scan(self._pos, p, o, s, lambda a, b, c: (c, a, b))
        if force_index == "osp":
            return self._scan(self._osp, o, s, p, lambda a, b, c: (b, c, a))
        raise ValueError(f"unknown index: {force_index}")

    @staticmethod
    def _scan(index, k1, k2, k3, _order) -> List[Triple]:
        out: List[Triple] = []
        level1 = [index[k1]] if k1 is not None and k1 in index else (
            [] if k1 is not None else list(index.values()))
        for by2 in level1:
            level2 = [by2[k2]] if k2 is not None and k2 in by2 else (
                [] if k2 is not None else list(by2.values()))
            for by3 in level2:
                if k3 is not None:
                    t = by3.get(k3)
                    if t is not None:
                        out.append(t)
                else:
                    out.extend(by3.values())
        return out

    def to_graph(self) -> Graph:
        return Graph(self)
