"""Acceptance gate: one test per release criterion.

Each test is self-contained and checks the engine against an independent
ground truth (hand-computed golden sets, the brute-force slice of a full
mirror, an exhaustive classifier, or pure set algebra) at the stated
scale and time budget. Run with ``pytest -v tests/test_acceptance.py``
for one pass/fail line per criterion.
"""

import random
import time

import pytest

from interestsync import (
    Changeset,
    Graph,
    MemoryPiStore,
    MemoryTripleStore,
    RDF_TYPE,
    Runner,
    StorePair,
    Triple,
    WorkloadParams,
    apply_changeset,
    compare,
    generate_candidates,
    generate_workload,
    graph_diff,
    init_slice,
    integer_literal,
    iri,
    mirror_apply,
    parse_interest,
    propagate,
    serialize_ntriples,
    slice_graph,
    write_changeset_tree,
)
from interestsync.cli import main as cli_main
from interestsync.ntriples import serialize_triple
from interestsync.runner import Config, initialize_target

from conftest import (
    FIXTURES,
    brute_candidate_classes,
    load_fixture_graph,
    run_workload_memory,
)


# --------------------------------------------------------------------------
# Criterion 1: golden running example, exact sets, < 1 s
# --------------------------------------------------------------------------

def test_criterion_1_golden_example_exact(golden_interest, changeset_t1,
                                          target_t0, expected_target_t1,
                                          expected_pi_t1):
    from test_matching import (
        ARVID_TYPE, MARCEL_GOALS_1, MARCEL_TYPE, OBAMA_PAGE, RIO_GOALS_2,
        RIO_TYPE, RONALDO_GOALS_96, RONALDO_GOALS_216, RONALDO_PAGE,
        RONALDO_TYPE,
    )
    from interestsync import evaluate_interest
    from interestsync.matching import GraphView

    started = time.perf_counter()
    result = evaluate_interest(golden_interest, changeset_t1,
                               GraphView(target_t0))
    dres, ares = result.deletion, result.addition
    assert dres.r == Graph([MARCEL_GOALS_1, RONALDO_GOALS_96])
    assert dres.r_prime == Graph([MARCEL_TYPE, RONALDO_TYPE, RONALDO_PAGE])
    assert ares.a == Graph([RONALDO_GOALS_216, RONALDO_TYPE, RONALDO_PAGE,
                            RIO_TYPE, RIO_GOALS_2])
    assert ares.a_i == Graph([ARVID_TYPE, OBAMA_PAGE])
    ic = result.interesting
    assert len(ic.removed) == 5 and len(ic.added) == 5
    pc = result.potentially_interesting
    assert pc.removed == Graph()
    assert pc.added == Graph([ARVID_TYPE, OBAMA_PAGE, MARCEL_TYPE])

    stores = StorePair(target=MemoryTripleStore(target_t0),
                       pi=MemoryPiStore())
    propagate(golden_interest, changeset_t1, stores)
    assert stores.target.snapshot() == expected_target_t1
    assert stores.pi.partition_graph("football") == expected_pi_t1
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"golden cycle took {elapsed:.2f} s"


# --------------------------------------------------------------------------
# Criterion 2: target equals brute-force slice on >= 500 workloads, < 5 min
# --------------------------------------------------------------------------

def test_criterion_2_slice_consistency_500_workloads():
    started = time.perf_counter()
    for seed in range(500):
        w = generate_workload(seed)
        target, _ = run_workload_memory(w)
        mirror = mirror_apply(w.dump, w.changesets)
        report = compare(target, slice_graph(w.interest, mirror))
        assert report.equal, (
            f"seed {seed}: missing={len(report.missing)} "
            f"extra={len(report.extra)}\n"
            + "\n".join(serialize_triple(t)
                        for t in list(report.missing | report.extra)[:10]))
    elapsed = time.perf_counter() - started
    assert elapsed < 300.0, f"500 workloads took {elapsed:.0f} s"


# --------------------------------------------------------------------------
# Criterion 3: candidate classification equals the exhaustive classifier
# on >= 1,000 random instances
# --------------------------------------------------------------------------

def test_criterion_3_candidate_oracle_1000_instances():
    instances = 0
    for seed in range(250):
        w = generate_workload(seed)
        universe = sorted(
            w.dump | w.changesets[0].added | w.changesets[0].removed
            | w.changesets[-1].added,
            key=serialize_triple)
        rng = random.Random(seed * 31 + 1)
        for trial in range(4):
            size = rng.randint(1, min(50, len(universe)))
            sample = Graph(rng.sample(universe, size))
            ct = generate_candidates(w.interest, sample)
            classes, op_only = brute_candidate_classes(w.interest, sample)
            assert ct.c == classes, f"seed {seed} trial {trial}"
            assert ct.c_op == op_only, f"seed {seed} trial {trial}"
            instances += 1
    assert instances >= 1000


# --------------------------------------------------------------------------
# Criterion 4: changeset algebra on >= 1,000 random graph pairs
# --------------------------------------------------------------------------

def test_criterion_4_changeset_algebra_1000_pairs():
    rng = random.Random(42)
    nodes = [iri(f"http://e/n{k}") for k in range(8)]

    def random_graph():
        return Graph(
            Triple(rng.choice(nodes), rng.choice(nodes), rng.choice(nodes))
            for _ in range(rng.randint(0, 25)))

    for _ in range(1000):
        a, b = random_graph(), random_graph()
        assert apply_changeset(a, graph_diff(a, b)) == b

    t = Triple(nodes[0], nodes[1], nodes[2])
    for base in (Graph(), Graph([t])):
        out = apply_changeset(base, Changeset(removed=Graph([t]),
                                              added=Graph([t])))
        assert t in out


# --------------------------------------------------------------------------
# Criterion 5: idempotency and crash-safety on >= 50 workloads
# --------------------------------------------------------------------------

class _Crash(Exception):
    pass


def _config_for(workdir) -> Config:
    return Config(
        changesets_root=workdir / "changesets",
        target_path=workdir / "target.nt",
        pi_root=workdir / "pi",
        checkpoint_path=workdir / "checkpoint",
        registry_dir=workdir / "interests",
    )


def _final_state(config: Config, interest_id: str):
    stores = StorePair.at_paths(config.target_path, config.pi_root)
    return stores.target.snapshot(), stores.pi.partition_graph(interest_id)


def _run_to_completion(workdir, w) -> Config:
    config = _config_for(workdir)
    write_changeset_tree(w, config.changesets_root)
    initialize_target(config, w.dump, [w.interest])
    Runner(config, interests=[w.interest]).run_once()
    return config


def test_criterion_5_idempotency_and_crash_safety(tmp_path, monkeypatch):
    import interestsync.runner as runner_mod

    real_advance = runner_mod.advance_checkpoint
    for seed in range(50):
        w = generate_workload(seed)

        # Reference: uninterrupted run, then prove re-running changes nothing.
        ref_config = _run_to_completion(tmp_path / f"ref{seed}", w)
        ref_state = _final_state(ref_config, w.interest.id)
        reports = Runner(ref_config, interests=[w.interest]).run_once()
        assert reports == []
        assert _final_state(ref_config, w.interest.id) == ref_state

        # Crashed run: die mid-stream, restart, finish.
        crash_after = seed % (len(w.changesets) - 1) + 1
        workdir = tmp_path / f"crash{seed}"
        config = _config_for(workdir)
        write_changeset_tree(w, config.changesets_root)
        initialize_target(config, w.dump, [w.interest])

        if seed % 2 == 0:
            # Crash between the store commit and the checkpoint write: the
            # restart must replay the last changeset and still converge.
            calls = {"n": 0}

            def advance_then_crash(path, cp, interest_id, key):
                calls["n"] += 1
                if calls["n"] == crash_after:
                    raise _Crash()
                return real_advance(path, cp, interest_id, key)

            monkeypatch.setattr(runner_mod, "advance_checkpoint",
                                advance_then_crash)
            runner = Runner(config, interests=[w.interest])
        else:
            # Crash after a fully committed and checkpointed step.
            def crash_late(report, _n=[0]):
                _n[0] += 1
                if _n[0] == crash_after:
                    raise _Crash()

            runner = Runner(config, interests=[w.interest],
                            after_propagate=crash_late)
        with pytest.raises(_Crash):
            runner.run_once()
        monkeypatch.setattr(runner_mod, "advance_checkpoint", real_advance)

        # Restart from disk with a fresh runner and finish the stream.
        Runner(config, interests=[w.interest]).run_once()
        crashed_state = _final_state(config, w.interest.id)
        assert crashed_state[0] == ref_state[0], f"seed {seed}: target differs"
        assert crashed_state[1] == ref_state[1], f"seed {seed}: side store differs"


# --------------------------------------------------------------------------
# Criterion 6: reduction on a 95%-noise workload, via the stats command
# --------------------------------------------------------------------------

def test_criterion_6_reduction_on_noisy_workload(tmp_path, capsys):
    params = WorkloadParams(noise_ratio=0.95, n_changesets=30,
                            ops_per_changeset=20)
    total_added = 0
    interesting_added = 0
    target_growth = 0
    mirror_growth = 0
    for seed in (0, 1, 2):
        w = generate_workload(seed, params)
        workdir = tmp_path / f"w{seed}"
        config_path = workdir / "config.ini"
        workdir.mkdir()
        config_path.write_text("""\
[source]
changesets_root = changesets

[stores]
target_path = store/target.nt
pi_path = store/pi
checkpoint_path = store/checkpoint
""")
        from interestsync import format_interest

        (workdir / "interest.txt").write_text(format_interest(w.interest))
        (workdir / "dump.nt").write_text(serialize_ntriples(w.dump))
        write_changeset_tree(w, workdir / "changesets")

        argv = ["--config", str(config_path)]
        assert cli_main(argv + ["register", "--file",
                                str(workdir / "interest.txt")]) == 0
        assert cli_main(argv + ["init-slice", "--dump",
                                str(workdir / "dump.nt")]) == 0
        assert cli_main(argv + ["run", "--once"]) == 0
        capsys.readouterr()
        assert cli_main(argv + ["stats"]) == 0
        header, row = capsys.readouterr().out.strip().split("\n")
        stats = dict(zip(header.split("\t"), row.split("\t")))

        total_added += int(stats["total_added"])
        interesting_added += int(stats["interesting_added"])
        init_size = len(init_slice(w.interest, w.dump))
        target_growth += int(stats["target_size"]) - init_size
        mirror = mirror_apply(w.dump, w.changesets)
        mirror_growth += len(mirror) - len(w.dump)

    fraction = interesting_added / total_added
    assert fraction <= 0.10, f"interesting-added fraction {fraction:.3f}"
    assert target_growth * 5 <= mirror_growth, (
        f"target grew by {target_growth}, mirror by {mirror_growth}")


# --------------------------------------------------------------------------
# Criterion 7: 10k-triple changeset against a 1M-triple target in < 5 s
# --------------------------------------------------------------------------

def test_criterion_7_throughput_10k_changeset_1m_target():
    e = "http://bench.example.org/"
    interest = parse_interest(f"""\
PREFIX b: <{e}>
INTEREST bench
SELECT * WHERE {{
  ?x a b:Player .
  ?x b:score ?s .
  FILTER (?s > 100)
}}
""")
    player = iri(e + "Player")
    score = iri(e + "score")
    noise_pred = [iri(e + f"p{k}") for k in range(10)]

    # Setup (untimed): 1,000,000-triple target store.
    triples = []
    for k in range(400_000):
        node = iri(e + f"e{k}")
        triples.append(Triple(node, RDF_TYPE, player))
        triples.append(Triple(node, score, integer_literal(101 + k % 500)))
    for k in range(200_000):
        triples.append(Triple(iri(e + f"n{k}"), noise_pred[k % 10],
                              iri(e + f"n{k + 1}")))
    assert len(triples) == 1_000_000
    stores = StorePair(target=MemoryTripleStore(triples), pi=MemoryPiStore())
    assert len(stores.target) == 1_000_000

    removed = []
    added = []
    for k in range(2_500):
        node = iri(e + f"e{k}")
        removed.append(Triple(node, score, integer_literal(101 + k % 500)))
        added.append(Triple(node, score, integer_literal(300 + k)))
    for k in range(1_500):
        node = iri(e + f"new{k}")
        added.append(Triple(node, RDF_TYPE, player))
        added.append(Triple(node, score, integer_literal(150 + k)))
    for k in range(2_000):
        added.append(Triple(iri(e + f"fresh{k}"), noise_pred[k % 10],
                            iri(e + f"fresh{k + 1}")))
    cs = Changeset(removed=Graph(removed), added=Graph(added))
    assert len(cs.removed) + len(cs.added) == 10_000

    started = time.perf_counter()
    report = propagate(interest, cs, stores)
    elapsed = time.perf_counter() - started
    assert report.added_interesting >= 5_500
    assert elapsed < 5.0, f"10k changeset took {elapsed:.2f} s"
