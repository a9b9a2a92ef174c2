"""Interest-based changeset propagation for RDF datasets.

Filters the removed/added triple streams of an evolving source dataset
through registered graph-pattern interests and maintains a partial local
replica plus, per interest, a store of potentially interesting triples
whose matches may still complete later.
"""

from .changeset import Changeset, apply_changeset, graph_diff
from .changeset_io import (
    ChangesetIOError,
    ChangesetRef,
    Checkpoint,
    CheckpointError,
    SequenceKey,
    advance_checkpoint,
    load_changeset,
    read_checkpoint,
    scan_changesets,
    write_checkpoint,
)
from .evaluator import (
    AdditionResult,
    DeletionResult,
    EvaluationResult,
    InterestingChangeset,
    PIChangeset,
    PropagationReport,
    evaluate_additions,
    evaluate_deletions,
    evaluate_interest,
    propagate,
)
from .matching import (
    DEFAULT_MATCH_CAP,
    AssertionTuple,
    CandidateTuple,
    GraphView,
    ResourceLimitError,
    SubtractView,
    assert_candidates,
    enumerate_partial_matches,
    full_match_slice,
    generate_candidates,
)
from .index import TripleIndex
from .ntriples import (
    NTriplesSyntaxError,
    ParseReport,
    parse_ntriples,
    parse_ntriples_report,
    serialize_ntriples,
    serialize_triple,
)
from .patterns import (
    Bgp,
    Comparison,
    FilterExpr,
    InterestExpression,
    InterestSyntaxError,
    InterestValidationError,
    Ogp,
    StringTest,
    TriplePattern,
    UnsupportedConstructError,
    eval_filter,
    eval_filters,
    format_interest,
    parse_interest,
)
from .oracle import (
    CompareReport,
    Workload,
    WorkloadParams,
    compare,
    generate_workload,
    mirror_apply,
    slice_graph,
    write_changeset_tree,
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
from .store import (
    FilePiStore,
    FileTripleStore,
    MemoryPiStore,
    MemoryTripleStore,
    StoreError,
    StorePair,
    apply_interesting,
    apply_pi,
    export_update_stream,
    init_slice,
    parse_update_stream,
    replay_update_stream,
)
from .terms import (
    EMPTY_GRAPH,
    RDF_TYPE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    Variable,
    integer_literal,
    iri,
    numeric_value,
    string_literal,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
