"""Changesets: ordered ⟨removed, added⟩ pairs of graphs, plus the pure
set-algebraic diff/apply operations between dataset revisions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .terms import EMPTY_GRAPH, Graph


@dataclass(frozen=True)
class Changeset:
    """The transition between two revisions of an evolving dataset.

    Deletions apply before additions, so a triple present on both sides
    survives an application.
    """

    removed: Graph = field(default=EMPTY_GRAPH)
    added: Graph = field(default=EMPTY_GRAPH)
    sequence_id: Optional[str] = None

    def is_empty(self) -> bool:
        return not self.removed and not self.added


def graph_diff(v_old: Graph, v_new: Graph) -> Changeset:
    """The changeset taking ``v_old`` to ``v_new``: ⟨old∖new, new∖old⟩."""
    return Changeset(removed=v_old - v_new, added=v_new - v_old)


def apply_changeset(v: Graph, cs: Changeset) -> Graph:
    """Apply deletions first, then additions."""
    return (v - cs.removed) | cs.added
