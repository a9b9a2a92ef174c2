"""Target and potentially-interesting stores.

Two implementations share one contract: a pure in-memory store for tests
and evaluation, and a file-backed store whose commits are atomic snapshot
replacements (write-temp, fsync, rename) in canonical N-Triples, so a
crash leaves either the old or the new state, never a torn file.

Single-writer discipline: mutation happens only inside a transaction;
readers see the last committed snapshot (in-process, the live index).
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from .changeset import Changeset
from .evaluator import InterestingChangeset, PIChangeset
from .index import TripleIndex
from .matching import DEFAULT_MATCH_CAP, GraphView, full_match_slice
from .ntriples import parse_ntriples, serialize_ntriples, serialize_triple
from .patterns import InterestExpression
from .terms import Graph, Triple


class StoreError(RuntimeError):
    """I/O failure while persisting or loading a store."""


def _atomic_write(path: Path, data: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise StoreError(f"failed to persist {path}: {exc}") from exc


class MemoryTripleStore:
    """Indexed triple set with rollback-capable transactions."""

    def __init__(self, triples: Iterable[Triple] = ()):
        self._index = TripleIndex(triples)
        self._undo: Optional[List[Tuple[str, Triple]]] = None

    # -- read surface --

    def view(self) -> GraphView:
        return GraphView(self._index)

    def match(self, s, p, o, force_index: Optional[str] = None) -> List[Triple]:
        return self._index.match(s, p, o, force_index)

    def __contains__(self, t: Triple) -> bool:
        return t in self._index

    def __len__(self) -> int:
        return len(self._index)

    def __iter__(self):
        return iter(self._index)

    def snapshot(self) -> Graph:
        return Graph(self._index)

    # -- write surface --

    @contextmanager
    def transaction(self):
        if self._undo is not None:
            # Nested transaction joins the outer one.
            yield self
            return
        self._undo = []
        try:
            yield self
        except BaseException:
            self._rollback()
            raise
        else:
            undo = self._undo
            self._undo = None
            try:
                self._commit()
            except BaseException:
                self._undo = undo
                self._rollback()
                raise

    def _rollback(self):
        assert self._undo is not None
        for op, t in reversed(self._undo):
            if op == "add":
                self._index.remove(t)
            else:
                self._index.add(t)
        self._undo = None

    def _commit(self):
        pass

    def _require_txn(self):
        if self._undo is None:
            raise StoreError("mutation outside a transaction")

    def add(self, t: Triple) -> bool:
        self._require_txn()
        if self._index.add(t):
            self._undo.append(("add", t))
            return True
        return False

    def remove(self, t: Triple) -> bool:
        self._require_txn()
        if self._index.remove(t):
            self._undo.append(("remove", t))
            return True
        return False

    def add_all(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.add(t))

    def remove_all(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.remove(t))


class FileTripleStore(MemoryTripleStore):
    """Memory store persisted as one canonical N-Triples snapshot file."""

    def __init__(self, path):
        self.path = Path(path)
        triples: Iterable[Triple] = ()
        if self.path.exists():
            try:
                triples = parse_ntriples(self.path.read_text(encoding="utf-8"))
            except OSError as exc:
                raise StoreError(f"cannot read store {self.path}: {exc}") from exc
        super().__init__(triples)

    def _commit(self):
        _atomic_write(self.path, serialize_ntriples(self.snapshot()))


class MemoryPiStore:
    """Potentially-interesting triples, one named partition per interest."""

    def __init__(self):
        self._partitions: Dict[str, MemoryTripleStore] = {}
        self._txn_stack = None

    def partition(self, interest_id: str) -> MemoryTripleStore:
        store = self._partitions.get(interest_id)
        if store is None:
            store = self._partitions[interest_id] = self._new_partition(interest_id)
            # A partition created while a transaction is open joins it.
            if self._txn_stack is not None:
                self._txn_stack.enter_context(store.transaction())
        return store

    def _new_partition(self, interest_id: str) -> MemoryTripleStore:
        return MemoryTripleStore()

    def partition_ids(self) -> List[str]:
        return sorted(self._partitions)

    def partition_graph(self, interest_id: str) -> Graph:
        return self.partition(interest_id).snapshot()

    @contextmanager
    def transaction(self):
        from contextlib import ExitStack

        with ExitStack() as stack:
            for store in self._partitions.values():
                stack.enter_context(store.transaction())
            self._txn_stack = stack
            try:
                yield self
            finally:
                self._txn_stack = None

    def add_all(self, interest_id: str, triples: Iterable[Triple]) -> int:
        return self.partition(interest_id).add_all(triples)

    def remove_all(self, interest_id: str, triples: Iterable[Triple]) -> int:
        return self.partition(interest_id).remove_all(triples)


class FilePiStore(MemoryPiStore):
    """Partitioned side store: directory with one snapshot file per interest."""

    def __init__(self, root):
        super().__init__()
        self.root = Path(root)
        if self.root.exists():
            for path in sorted(self.root.glob("*.nt")):
                self._partitions[path.stem] = FileTripleStore(path)

    def _new_partition(self, interest_id: str) -> MemoryTripleStore:
        return FileTripleStore(self.root / f"{interest_id}.nt")


@dataclass
class StorePair:
    """Target dataset plus the potentially-interesting side store."""

    target: MemoryTripleStore
    pi: MemoryPiStore

    @contextmanager
    def transaction(self):
        with self.target.transaction():
            with self.pi.transaction():
                yield self

    @classmethod
    def in_memory(cls) -> "StorePair":
        return cls(target=MemoryTripleStore(), pi=MemoryPiStore())

    @classmethod
    def at_paths(cls, target_path, pi_root) -> "StorePair":
        return cls(target=FileTripleStore(target_path), pi=FilePiStore(pi_root))


def match_pattern(store, tp, mu):
    """Every stored triple matching the pattern under the binding, with
    the extended binding."""
    from .matching import match_pattern as _mp

    view = store.view() if hasattr(store, "view") else store
    return _mp(view, tp, mu)


def apply_interesting(store: MemoryTripleStore, ic: InterestingChangeset) -> Tuple[int, int]:
    """Apply an interesting changeset inside a transaction: deletions
    first, then insertions. Returns (actually-removed, actually-inserted);
    re-application is a zero-effect no-op."""
    with store.transaction():
        removed = store.remove_all(ic.removed)
        added = store.add_all(ic.added)
    return removed, added


def apply_pi(store: MemoryPiStore, interest_id: str, pc: PIChangeset) -> Tuple[int, int]:
    """Apply a potentially-interesting changeset to one partition."""
    partition = store.partition(interest_id)
    with partition.transaction():
        removed = partition.remove_all(pc.removed)
        added = partition.add_all(pc.added)
    return removed, added


def init_slice(i: InterestExpression, dump: Graph, cap: int = DEFAULT_MATCH_CAP) -> Graph:
    """Extract the initial target contents from a source dump: all triples
    of full, filter-passing BGP matches plus their consistent optional
    triples. Optional triples never appear without a base match."""
    return full_match_slice(i, GraphView(dump), cap)


# --------------------------------------------------------------------------
# Update-stream export (file-based stand-in for a remote update endpoint)
# --------------------------------------------------------------------------

def export_update_stream(ic: InterestingChangeset) -> str:
    """Canonical two-block update document: DELETE DATA then INSERT DATA,
    each block holding sorted N-Triples lines."""
    lines = ["DELETE DATA {"]
    lines.extend(sorted(serialize_triple(t) for t in ic.removed))
    lines.append("}")
    lines.append("INSERT DATA {")
    lines.extend(sorted(serialize_triple(t) for t in ic.added))
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_update_stream(text: str) -> InterestingChangeset:
    """Inverse of export_update_stream, for replaying exported documents."""
    sections: Dict[str, List[str]] = {"DELETE": [], "INSERT": []}
    current: Optional[str] = None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped == "DELETE DATA {":
            current = "DELETE"
        elif stripped == "INSERT DATA {":
            current = "INSERT"
        elif stripped == "}":
            current = None
        elif stripped:
            if current is None:
                raise ValueError(f"content outside update blocks: {line!r}")
            sections[current].append(line)
    return InterestingChangeset(
        removed=parse_ntriples("\n".join(sections["DELETE"])),
        added=parse_ntriples("\n".join(sections["INSERT"])),
    )


def replay_update_stream(store: MemoryTripleStore, text: str) -> Tuple[int, int]:
    return apply_interesting(store, parse_update_stream(text))
