"""Discovery, ordering, loading and checkpointing of published changeset
files.

Folder layout (the DBpedia-Live publication scheme):

    ROOT/YYYY/MM/DD/HH/NNNNNN.removed.nt[.gz]
    ROOT/YYYY/MM/DD/HH/NNNNNN.added.nt[.gz]

A changeset is the pair of files sharing one serial; a missing side means
an empty graph. Sequence keys order changesets totally. The checkpoint is
a single human-inspectable text file with one ``<interest-id> <key>`` line
per interest, replaced atomically on every advance.
"""

from __future__ import annotations

import gzip
import logging
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple

from .changeset import Changeset
from .ntriples import ParseReport, parse_ntriples_report
from .terms import EMPTY_GRAPH, Graph

log = logging.getLogger(__name__)

_FILE_RE = re.compile(r"^(\d{6})\.(removed|added)\.nt(\.gz)?$")
_KEY_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})-(\d{2})-(\d{6})$")


class ChangesetIOError(RuntimeError):
    """Retryable I/O failure while reading changeset files."""


class CheckpointError(RuntimeError):
    pass


class SequenceKey(NamedTuple):
    year: int
    month: int
    day: int
    hour: int
    serial: int

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}-{self.hour:02d}-{self.serial:06d}"

    @classmethod
    def parse(cls, text: str) -> "SequenceKey":
        m = _KEY_RE.match(text)
        if m is None:
            raise ValueError(f"not a sequence key: {text!r}")
        return cls(*(int(g) for g in m.groups()))


ZERO_KEY = SequenceKey(0, 0, 0, 0, 0)


@dataclass(frozen=True)
class ChangesetRef:
    key: SequenceKey
    removed_path: Optional[Path] = None
    added_path: Optional[Path] = None

    def __post_init__(self):
        if self.removed_path is None and self.added_path is None:
            raise ValueError("a changeset ref needs at least one side")


def _int_dirs(parent: Path, width: int) -> List[Tuple[int, Path]]:
    out = []
    try:
        entries = sorted(parent.iterdir())
    except OSError as exc:
        raise ChangesetIOError(f"cannot list {parent}: {exc}") from exc
    for entry in entries:
        if entry.is_dir() and len(entry.name) == width and entry.name.isdigit():
            out.append((int(entry.name), entry))
        else:
            log.warning("ignoring unexpected entry %s", entry)
    return out


def scan_changesets(root, after: Optional[SequenceKey] = None) -> List[ChangesetRef]:
    """All changesets under the root with key > after, ascending.

    Files with unrecognized names are skipped with a warning. A serial gap
    is tolerated (the publisher skipped a number) and logged.
    """
    root = Path(root)
    if not root.is_dir():
        raise ChangesetIOError(f"changeset root {root} is not a readable directory")
    refs: List[ChangesetRef] = []
    for year, ydir in _int_dirs(root, 4):
        for month, mdir in _int_dirs(ydir, 2):
            for day, ddir in _int_dirs(mdir, 2):
                for hour, hdir in _int_dirs(ddir, 2):
                    sides: Dict[int, Dict[str, Path]] = {}
                    try:
                        entries = sorted(hdir.iterdir())
                    except OSError as exc:
                        raise ChangesetIOError(f"cannot list {hdir}: {exc}") from exc
                    for entry in entries:
                        m = _FILE_RE.match(entry.name)
                        if m is None:
                            log.warning("ignoring unexpected file %s", entry)
                            continue
                        serial, side = int(m.group(1)), m.group(2)
                        sides.setdefault(serial, {})[side] = entry
                    serials = sorted(sides)
                    for prev, cur in zip(serials, serials[1:]):
                        if cur != prev + 1:
                            log.warning("serial gap in %s: %06d -> %06d", hdir, prev, cur)
                    for serial in serials:
                        key = SequenceKey(year, month, day, hour, serial)
                        if after is not None and key <= after:
                            continue
                        refs.append(ChangesetRef(
                            key=key,
                            removed_path=sides[serial].get("removed"),
                            added_path=sides[serial].get("added"),
                        ))
    refs.sort(key=lambda ref: ref.key)
    return refs


def _load_side(path: Optional[Path], doc_id: str) -> Tuple[Graph, Optional[ParseReport]]:
    if path is None:
        return EMPTY_GRAPH, None
    try:
        raw = path.read_bytes()
        if path.name.endswith(".gz"):
            raw = gzip.decompress(raw)
    except (OSError, gzip.BadGzipFile, EOFError) as exc:
        raise ChangesetIOError(f"cannot read changeset file {path}: {exc}") from exc
    graph, report = parse_ntriples_report(raw, strict=False, doc_id=doc_id)
    if report.skipped_lines:
        log.warning("%s: skipped %d malformed line(s)", path, report.skipped_lines)
    return graph, report


def load_changeset(ref: ChangesetRef) -> Changeset:
    """Load (and gunzip) both sides of a changeset, leniently."""
    key = str(ref.key)
    removed, _ = _load_side(ref.removed_path, f"{key}-removed")
    added, _ = _load_side(ref.added_path, f"{key}-added")
    return Changeset(removed=removed, added=added, sequence_id=key)


# --------------------------------------------------------------------------
# Checkpoints
# --------------------------------------------------------------------------

class Checkpoint:
    """Last applied sequence key per interest, monotonically advancing."""

    def __init__(self, keys: Optional[Dict[str, SequenceKey]] = None):
        self._keys: Dict[str, SequenceKey] = dict(keys or {})

    def get(self, interest_id: str) -> Optional[SequenceKey]:
        return self._keys.get(interest_id)

    def as_dict(self) -> Dict[str, SequenceKey]:
        return dict(self._keys)

    def advance(self, interest_id: str, key: SequenceKey):
        current = self._keys.get(interest_id)
        if current is not None and key < current:
            raise CheckpointError(
                f"checkpoint regression for {interest_id}: {key} < {current}")
        self._keys[interest_id] = key

    def serialize(self) -> str:
        return "".join(
            f"{interest_id} {key}\n"
            for interest_id, key in sorted(self._keys.items())
        )


def read_checkpoint(path) -> Checkpoint:
    """Read the last durable checkpoint; a fresh path yields an empty one."""
    path = Path(path)
    if not path.exists():
        return Checkpoint()
    keys: Dict[str, SequenceKey] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CheckpointError(
                f"corrupt checkpoint {path} at line {lineno}; "
                "re-initialize the target from a fresh slice")
        try:
            keys[parts[0]] = SequenceKey.parse(parts[1])
        except ValueError:
            raise CheckpointError(
                f"corrupt checkpoint {path} at line {lineno}; "
                "re-initialize the target from a fresh slice") from None
    return Checkpoint(keys)


def write_checkpoint(path, cp: Checkpoint):
    """Durable write: temp file, fsync, atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(cp.serialize())
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise CheckpointError(f"failed to persist checkpoint {path}: {exc}") from exc


def advance_checkpoint(path, cp: Checkpoint, interest_id: str, key: SequenceKey) -> Checkpoint:
    """Advance one interest's key and persist durably before returning."""
    cp.advance(interest_id, key)
    write_checkpoint(path, cp)
    return cp
