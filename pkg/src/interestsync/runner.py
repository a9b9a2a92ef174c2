"""Configuration, interest registry, and the incremental run loop.

Configuration is an INI file; every value can be overridden with an
environment variable named ``INTERESTSYNC_<SECTION>_<KEY>`` (upper case,
``:`` and ``-`` in section names become ``_``). Registered interests live
as plain text files in a registry directory next to the checkpoint, one
``<id>.interest`` file each, so the registry survives restarts and can be
inspected with a pager.
"""

from __future__ import annotations

import configparser
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .changeset_io import (
    Checkpoint,
    SequenceKey,
    advance_checkpoint,
    load_changeset,
    read_checkpoint,
    scan_changesets,
)
from .evaluator import PropagationReport, propagate
from .matching import DEFAULT_MATCH_CAP
from .patterns import InterestExpression, format_interest, parse_interest
from .store import StorePair, export_update_stream, init_slice
from .terms import Graph

log = logging.getLogger(__name__)

ENV_PREFIX = "INTERESTSYNC"


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    """Resolved runtime configuration."""

    changesets_root: Path
    target_path: Path
    pi_root: Path
    checkpoint_path: Path
    registry_dir: Path
    poll_interval_seconds: float = 5.0
    match_cap: int = DEFAULT_MATCH_CAP
    updates_out: Optional[Path] = None
    cleanup: bool = False
    # Interests declared directly in the config, id -> interest file.
    interest_files: Dict[str, Path] = field(default_factory=dict)


def _env_key(section: str, key: str) -> str:
    clean = section.replace(":", "_").replace("-", "_")
    return f"{ENV_PREFIX}_{clean}_{key}".upper()


def _lookup(parser: configparser.ConfigParser, section: str, key: str,
            default: Optional[str] = None) -> Optional[str]:
    env = os.environ.get(_env_key(section, key))
    if env is not None:
        return env
    if parser.has_option(section, key):
        return parser.get(section, key)
    return default


def load_config(path) -> Config:
    """Read and validate a configuration file, applying env overrides."""
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc

    def require(section: str, key: str) -> str:
        value = _lookup(parser, section, key)
        if value is None:
            raise ConfigError(f"config {path} is missing [{section}] {key}")
        return value

    base = path.parent

    def respath(raw: str) -> Path:
        p = Path(raw)
        return p if p.is_absolute() else base / p

    checkpoint = respath(require("stores", "checkpoint_path"))
    registry_raw = _lookup(parser, "stores", "registry_dir")
    registry = respath(registry_raw) if registry_raw else checkpoint.parent / "interests"
    poll = _lookup(parser, "source", "poll_interval_seconds", "5")
    cap = _lookup(parser, "source", "match_cap", str(DEFAULT_MATCH_CAP))
    updates_raw = _lookup(parser, "stores", "updates_out")
    try:
        poll_value = float(poll)
        cap_value = int(cap)
    except ValueError as exc:
        raise ConfigError(f"config {path}: bad numeric value: {exc}") from exc
    cleanup_raw = (_lookup(parser, "source", "cleanup", "false") or "false").lower()
    if cleanup_raw not in ("true", "false", "yes", "no", "1", "0"):
        raise ConfigError(f"config {path}: bad boolean for [source] cleanup")
    interest_files: Dict[str, Path] = {}
    for section in parser.sections():
        if section.startswith("interest:"):
            interest_id = section.split(":", 1)[1]
            file_raw = _lookup(parser, section, "file")
            if file_raw is None:
                raise ConfigError(f"config {path}: [{section}] is missing file")
            interest_files[interest_id] = respath(file_raw)
    return Config(
        changesets_root=respath(require("source", "changesets_root")),
        target_path=respath(require("stores", "target_path")),
        pi_root=respath(require("stores", "pi_path")),
        checkpoint_path=checkpoint,
        registry_dir=registry,
        poll_interval_seconds=poll_value,
        match_cap=cap_value,
        updates_out=respath(updates_raw) if updates_raw else None,
        cleanup=cleanup_raw in ("true", "yes", "1"),
        interest_files=interest_files,
    )


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------

def register_interest(registry_dir, i: InterestExpression,
                      overwrite: bool = False) -> Path:
    """Persist an interest under its id; duplicate ids are an error unless
    overwrite is requested."""
    registry_dir = Path(registry_dir)
    registry_dir.mkdir(parents=True, exist_ok=True)
    path = registry_dir / f"{i.id}.interest"
    if path.exists() and not overwrite:
        raise ConfigError(f"interest {i.id!r} is already registered ({path})")
    path.write_text(format_interest(i), encoding="utf-8")
    return path


def load_registry(registry_dir) -> List[InterestExpression]:
    registry_dir = Path(registry_dir)
    if not registry_dir.is_dir():
        return []
    interests = []
    for path in sorted(registry_dir.glob("*.interest")):
        i = parse_interest(path.read_text(encoding="utf-8"), default_id=path.stem)
        if i.id != path.stem:
            raise ConfigError(
                f"registry file {path} declares interest id {i.id!r}")
        interests.append(i)
    return interests


# --------------------------------------------------------------------------
# Run loop
# --------------------------------------------------------------------------

@dataclass
class Runner:
    """Applies pending changesets to every registered interest, in order,
    checkpointing after each (interest, changeset) step so a crash resumes
    exactly where it stopped."""

    config: Config
    stores: StorePair = None
    interests: List[InterestExpression] = field(default_factory=list)
    # Called after each successful propagation; tests use it to inject
    # crashes between the store commit and the checkpoint write.
    after_propagate: Optional[Callable[[PropagationReport], None]] = None

    def __post_init__(self):
        if self.stores is None:
            self.stores = StorePair.at_paths(self.config.target_path,
                                             self.config.pi_root)
        if not self.interests:
            self.interests = load_registry(self.config.registry_dir)
            seen = {i.id for i in self.interests}
            for interest_id, file in sorted(self.config.interest_files.items()):
                if interest_id in seen:
                    continue
                i = parse_interest(file.read_text(encoding="utf-8"),
                                   default_id=interest_id)
                self.interests.append(i)
            self.interests.sort(key=lambda i: i.id)

    def run_once(self) -> List[PropagationReport]:
        """One pass: apply everything new since each interest's checkpoint."""
        cp = read_checkpoint(self.config.checkpoint_path)
        reports: List[PropagationReport] = []
        for i in self.interests:
            reports.extend(self._catch_up(i, cp))
        if self.config.cleanup and self.interests:
            self._cleanup(cp)
        return reports

    def _cleanup(self, cp: Checkpoint):
        """Delete changeset files every registered interest has consumed."""
        keys = [cp.get(i.id) for i in self.interests]
        if any(key is None for key in keys):
            return
        floor = min(keys)
        for ref in scan_changesets(self.config.changesets_root):
            if ref.key > floor:
                break
            for side in (ref.removed_path, ref.added_path):
                if side is not None:
                    try:
                        side.unlink()
                    except OSError as exc:
                        log.warning("cleanup failed for %s: %s", side, exc)

    def _catch_up(self, i: InterestExpression, cp: Checkpoint) -> List[PropagationReport]:
        reports = []
        refs = scan_changesets(self.config.changesets_root, after=cp.get(i.id))
        for ref in refs:
            cs = load_changeset(ref)
            sink = None
            if self.config.updates_out is not None:
                sink = self._update_doc_writer(i, ref.key)
            report = propagate(i, cs, self.stores, self.config.match_cap,
                               on_evaluated=sink)
            advance_checkpoint(self.config.checkpoint_path, cp, i.id, ref.key)
            self._log_report(report)
            reports.append(report)
            if self.after_propagate is not None:
                self.after_propagate(report)
        return reports

    @property
    def report_log_path(self) -> Path:
        return self.config.checkpoint_path.parent / "reports.tsv"

    def _log_report(self, report: PropagationReport):
        # Report line plus the raw changeset sizes, for reduction stats.
        line = "\t".join((report.format_line(),
                          str(report.total_removed), str(report.total_added)))
        with open(self.report_log_path, "a", encoding="utf-8") as handle:
            handle.write(line + "\n")

    def _update_doc_writer(self, i: InterestExpression, key: SequenceKey):
        out_dir = self.config.updates_out / i.id
        out_dir.mkdir(parents=True, exist_ok=True)

        def sink(result):
            doc = export_update_stream(result.interesting)
            (out_dir / f"{key}.ru").write_text(doc, encoding="utf-8")

        return sink

    def run_daemon(self, max_polls: Optional[int] = None) -> int:
        """Poll until interrupted (or for max_polls passes, for tests)."""
        polls = 0
        total = 0
        while max_polls is None or polls < max_polls:
            reports = self.run_once()
            total += len(reports)
            polls += 1
            if max_polls is None or polls < max_polls:
                time.sleep(self.config.poll_interval_seconds)
        return total


def initialize_target(config: Config, dump: Graph,
                      interests: Optional[List[InterestExpression]] = None,
                      dump_key: Optional[SequenceKey] = None) -> int:
    """Build the initial target from a source dump: the union of every
    selected interest's full-match slice. Side partitions start empty. The
    checkpoint is set to the dump's sequence key so already-folded
    changesets are not replayed. Returns the target's triple count."""
    interests = interests if interests is not None else load_registry(config.registry_dir)
    stores = StorePair.at_paths(config.target_path, config.pi_root)
    with stores.transaction():
        for i in interests:
            stores.target.add_all(init_slice(i, dump, config.match_cap))
            stores.pi.partition_graph(i.id)
    if dump_key is not None:
        cp = read_checkpoint(config.checkpoint_path)
        for i in interests:
            advance_checkpoint(config.checkpoint_path, cp, i.id, dump_key)
    return len(stores.target)
