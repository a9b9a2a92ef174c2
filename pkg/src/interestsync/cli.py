"""Command line front end.

Verbs: register, init-slice, run, stats, export-updates. Reports go to
stdout; diagnostics go to stderr; the exit status is 0 exactly when no
error occurred.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .changeset_io import ChangesetIOError, CheckpointError, SequenceKey
from .matching import ResourceLimitError
from .ntriples import NTriplesSyntaxError, parse_ntriples
from .patterns import (
    InterestSyntaxError,
    InterestValidationError,
    UnsupportedConstructError,
    parse_interest,
)
from .runner import (
    Config,
    ConfigError,
    Runner,
    initialize_target,
    load_config,
    load_registry,
    register_interest,
)
from .store import StoreError, StorePair

log = logging.getLogger(__name__)

_KNOWN_ERRORS = (
    ConfigError,
    ChangesetIOError,
    CheckpointError,
    InterestSyntaxError,
    InterestValidationError,
    UnsupportedConstructError,
    NTriplesSyntaxError,
    ResourceLimitError,
    StoreError,
    OSError,
)

STATS_HEADER = "\t".join((
    "interest", "changesets",
    "total_removed", "interesting_removed", "pi_removed",
    "total_added", "interesting_added", "pi_added",
    "elapsed_ms", "target_size", "pi_size",
))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interestsync",
        description="Filter RDF changeset streams through graph-pattern "
                    "interests and maintain a partial local replica.")
    parser.add_argument("--config", required=True, help="path to the INI config")
    parser.add_argument("--verbose", action="store_true",
                        help="log debug detail to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_reg = sub.add_parser("register", help="validate and register an interest")
    p_reg.add_argument("--file", required=True, help="interest expression file")
    p_reg.add_argument("--id", help="interest id (default: declared or file stem)")
    p_reg.add_argument("--overwrite", action="store_true",
                       help="replace an existing registration")

    p_init = sub.add_parser("init-slice",
                            help="build the initial target from a source dump")
    p_init.add_argument("--dump", required=True, help="N-Triples dump file")
    p_init.add_argument("--interest", action="append", default=[],
                        help="interest id (repeatable; default: all registered)")
    p_init.add_argument("--sequence-key",
                        help="dump's sequence key YYYY-MM-DD-HH-NNNNNN; "
                             "sets the checkpoint")

    p_run = sub.add_parser("run", help="apply pending changesets")
    mode = p_run.add_mutually_exclusive_group()
    mode.add_argument("--once", action="store_true",
                      help="single pass (default)")
    mode.add_argument("--daemon", action="store_true",
                      help="poll until interrupted")
    p_run.add_argument("--max-polls", type=int,
                       help="stop the daemon after this many passes")

    sub.add_parser("stats", help="per-interest cumulative counts and store sizes")

    p_exp = sub.add_parser("export-updates",
                           help="run one pass and write update documents")
    p_exp.add_argument("--out", required=True,
                       help="directory for per-interest update documents")
    return parser


def cmd_register(config: Config, args) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    i = parse_interest(text, default_id=args.id or Path(args.file).stem)
    if args.id and i.id != args.id:
        i = dataclasses.replace(i, id=args.id)
    register_interest(config.registry_dir, i, overwrite=args.overwrite)
    stores = StorePair.at_paths(config.target_path, config.pi_root)
    with stores.transaction():
        stores.pi.partition_graph(i.id)
    print(f"registered {i.id}")
    return 0


def cmd_init_slice(config: Config, args) -> int:
    dump = parse_ntriples(Path(args.dump).read_text(encoding="utf-8"),
                          strict=False, doc_id=Path(args.dump).stem)
    interests = load_registry(config.registry_dir)
    if args.interest:
        wanted = set(args.interest)
        known = {i.id for i in interests}
        missing = wanted - known
        if missing:
            raise ConfigError(f"unknown interest id(s): {', '.join(sorted(missing))}")
        interests = [i for i in interests if i.id in wanted]
    key = SequenceKey.parse(args.sequence_key) if args.sequence_key else None
    size = initialize_target(config, dump, interests, dump_key=key)
    print(f"target initialized with {size} triple(s) "
          f"from {len(interests)} interest(s)")
    return 0


def cmd_run(config: Config, args) -> int:
    runner = Runner(config)
    if args.daemon:
        runner.run_daemon(max_polls=args.max_polls)
        return 0
    for report in runner.run_once():
        print(report.format_line())
    return 0


def cmd_stats(config: Config, args) -> int:
    runner = Runner(config)
    per_interest = {i.id: [0, 0, 0, 0, 0, 0, 0, 0.0] for i in runner.interests}
    log_path = runner.report_log_path
    if log_path.exists():
        for line in log_path.read_text(encoding="utf-8").splitlines():
            fields = line.split("\t")
            if len(fields) != 9:
                log.warning("skipping malformed stats line: %r", line)
                continue
            interest_id = fields[0]
            row = per_interest.setdefault(interest_id, [0, 0, 0, 0, 0, 0, 0, 0.0])
            rem_int, add_int, pi_rem, pi_add = (int(x) for x in fields[2:6])
            ms = float(fields[6])
            total_rem, total_add = int(fields[7]), int(fields[8])
            row[0] += 1
            row[1] += total_rem
            row[2] += rem_int
            row[3] += pi_rem
            row[4] += total_add
            row[5] += add_int
            row[6] += pi_add
            row[7] += ms
    print(STATS_HEADER)
    target_size = len(runner.stores.target)
    for interest_id in sorted(per_interest):
        row = per_interest[interest_id]
        pi_size = len(runner.stores.pi.partition(interest_id))
        print("\t".join((
            interest_id, str(row[0]),
            str(row[1]), str(row[2]), str(row[3]),
            str(row[4]), str(row[5]), str(row[6]),
            f"{row[7]:.1f}", str(target_size), str(pi_size),
        )))
    return 0


def cmd_export_updates(config: Config, args) -> int:
    config = dataclasses.replace(config, updates_out=Path(args.out))
    runner = Runner(config)
    for report in runner.run_once():
        print(report.format_line())
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    handlers = {
        "register": cmd_register,
        "init-slice": cmd_init_slice,
        "run": cmd_run,
        "stats": cmd_stats,
        "export-updates": cmd_export_updates,
    }
    try:
        config = load_config(args.config)
        return handlers[args.command](config, args)
    except _KNOWN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
