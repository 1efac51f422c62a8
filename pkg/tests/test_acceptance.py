"""Acceptance suite for the whole pipeline.

One test per acceptance property. Every assertion is either exact, carries
an inline tolerance, or checks a trend at frozen seeds; each test ends with
a single PASS line summarizing what was measured.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

import numpy as np
from oracles import recount_weights, transport_oracle
from synth import (
    cluster_corpus_paths,
    cluster_depth1_groups,
    drift_corpus,
    make_path,
    random_corpus_paths,
)

from convograph.activation import ActivationParams, spread
from convograph.cli import main as cli_main
from convograph.export import export_bundle, validate_bundle
from convograph.graph import (
    build_graph,
    merge_corpora,
    paths_by_thread,
    set_vertex,
    star_expand,
)
from convograph.layout import LayoutConfig, compute_layout
from convograph.linking import EmbeddingTable, EntitySet
from convograph.prediction import (
    evaluate_prediction,
    generalization,
    kfold_split,
    wmd,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "demos" / "data"


def test_transition_weights_match_brute_force_recount():
    """Every transition weight and occurrence count equals an independent
    recount of distinct (thread, edge) pairs. Exact; 100 corpora in < 10 s."""
    rng = random.Random(90210)
    t0 = time.monotonic()
    checked = 0
    for _ in range(100):
        corpus_paths = random_corpus_paths(
            rng,
            n_threads=rng.randint(1, 50),
            max_depth=rng.randint(1, 6),
            alphabet=rng.randint(1, 20),
        )
        if not corpus_paths:
            continue
        graph = build_graph(corpus_paths, "r")
        want_trans, want_occ = recount_weights(corpus_paths)
        got_trans = {
            ((s.payload, s.depth), (d.payload, d.depth)): w["r"]
            for (s, d), w in graph.transitions.items()
        }
        assert got_trans == want_trans
        got_occ = {(v.payload, v.depth): c["r"] for v, c in graph.occurrence.items()}
        assert got_occ == want_occ
        checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    print(f"PASS: weights equal brute-force recount on {checked} corpora ({elapsed:.1f}s)")


def test_star_expansion_counts_are_exact():
    """Entity-vertex count equals distinct (entity, depth) pairs; membership
    weights equal set occurrence counts; transitions unchanged. Exact."""
    rng = random.Random(777)
    for _ in range(25):
        corpus_paths = random_corpus_paths(rng, n_threads=rng.randint(1, 30))
        if not corpus_paths:
            continue
        raw = build_graph(corpus_paths, "r")
        expanded = star_expand(raw)

        want_pairs = {
            (e, v.depth) for v in raw.set_vertices for e in v.payload.entities
        }
        got_pairs = {(v.payload, v.depth) for v in expanded.entity_vertices}
        assert got_pairs == want_pairs
        assert len(expanded.entity_vertices) == len(want_pairs)

        for (ent, dst), weights in expanded.memberships.items():
            assert ent.depth == dst.depth
            assert ent.payload in dst.payload
            assert weights == expanded.occurrence[dst]
        membership_dsts = {dst for _, dst in expanded.memberships}
        assert membership_dsts == set(raw.set_vertices)

        assert expanded.transitions == raw.transitions
    print("PASS: star expansion vertex, membership, and transition counts exact")


def test_generalization_fixtures_and_train_shrinking():
    """Hand fixture {A,B}/{C} held out against train {A} gives 0.5 exactly;
    train=test gives 1.0 at all depths; 50 random train deletions never
    increase coverage at any depth."""
    train = star_expand(build_graph({"t0": [make_path([["R"], ["A"]])]}, "m"))
    test = star_expand(
        build_graph(
            {
                "t1": [make_path([["R"], ["A", "B"]])],
                "t2": [make_path([["R"], ["C"]])],
            },
            "m",
        )
    )
    cov = generalization(train, test)
    assert cov[1].overlap == 0.5
    assert cov[1].exact == 0.0

    rng = random.Random(4242)
    corpus_paths = random_corpus_paths(rng, n_threads=40, max_depth=5, alphabet=12)
    whole = star_expand(build_graph(corpus_paths, "m"))
    self_cov = generalization(whole, whole)
    assert self_cov and all(
        row.overlap == 1.0 and row.exact == 1.0 for row in self_cov.values()
    )

    prev = None
    deletions = 0
    big_rng = random.Random(11)
    corpus_paths_big = random_corpus_paths(big_rng, n_threads=140, max_depth=5, alphabet=12)
    ids = sorted(corpus_paths_big)
    test_ids, train_ids = ids[:20], list(ids[20:])
    assert len(train_ids) >= 51
    held_out = star_expand(build_graph({t: corpus_paths_big[t] for t in test_ids}, "m"))
    while deletions < 50 and len(train_ids) > 1:
        graph = star_expand(build_graph({t: corpus_paths_big[t] for t in train_ids}, "m"))
        cov = generalization(graph, held_out)
        if prev is not None:
            assert set(cov) == set(prev)
            for depth in cov:
                assert cov[depth].overlap <= prev[depth].overlap
                assert cov[depth].exact <= prev[depth].exact
        prev = cov
        train_ids.pop(big_rng.randrange(len(train_ids)))
        deletions += 1
    assert deletions == 50
    print("PASS: coverage fixtures exact; 50 train deletions never raised coverage")


def test_coverage_declines_with_depth_on_drifting_topics():
    """On the drifting-topic corpus, per-depth overlap coverage is
    non-increasing from depth 1 to max depth in at least 4 of 5 folds."""
    corpus, entity_sets, _ = drift_corpus(150)
    paths = paths_by_thread(corpus, entity_sets, min_len=2)
    folds = kfold_split(corpus, k=5, seed=0)
    good = 0
    for fold in folds:
        train = star_expand(build_graph({t: paths[t] for t in fold.train_ids}, "drift"))
        test = star_expand(build_graph({t: paths[t] for t in fold.test_ids}, "drift"))
        cov = generalization(train, test)
        seq = [cov[d].overlap for d in sorted(cov) if d >= 1]
        good += all(a >= b for a, b in zip(seq, seq[1:]))
    assert good >= 4
    print(f"PASS: coverage non-increasing with depth in {good}/5 folds")


def test_wmd_matches_exhaustive_transport_oracle():
    """200 random fixtures with |a|,|b| <= 4 agree with exhaustive transport
    enumeration to 1e-6; wmd(a,a) is 0.0 exactly; symmetry holds to 1e-12;
    drift-corpus per-depth medians are non-decreasing."""
    rng = random.Random(60622)
    worst = 0.0
    for trial in range(200):
        dim = rng.randint(1, 4)
        ids = [f"e{i}" for i in range(10)]
        table = EmbeddingTable(
            dim,
            {i: np.array([rng.gauss(0, 3) for _ in range(dim)]) for i in ids},
        )
        a = EntitySet.of(rng.sample(ids, rng.randint(1, 4)))
        b = EntitySet.of(rng.sample(ids, rng.randint(1, 4)))
        got = wmd(a, b, table)
        want = transport_oracle(
            np.array([table.vectors[e] for e in a.entities]),
            np.array([table.vectors[e] for e in b.entities]),
        )
        worst = max(worst, abs(got - want))
        assert abs(got - want) <= 1e-6
        assert got == wmd(b, a, table)  # canonical ordering makes this bitwise
        assert abs(got - wmd(b, a, table)) <= 1e-12
        assert wmd(a, a, table) == 0.0

    corpus, entity_sets, table = drift_corpus(150)
    paths = paths_by_thread(corpus, entity_sets, min_len=2)
    report = evaluate_prediction(kfold_split(corpus, k=5, seed=0), paths, table, "drift")
    medians = [row.median for row in report.rows]
    assert len(medians) >= 4
    assert all(a <= b for a, b in zip(medians, medians[1:]))
    print(f"PASS: wmd within {worst:.2e} of oracle; medians rise {medians}")


def test_layout_columns_determinism_and_cluster_separation():
    """Column x exact for every vertex; repeated payloads bitwise-equal in y;
    fixed seed byte-identical; 3-cluster fixture separates (mean intra-cluster
    y-distance < mean inter-cluster) in at least 27 of 30 seeds."""
    rng = random.Random(31415)
    corpus_paths = random_corpus_paths(rng, n_threads=25, max_depth=4, alphabet=10)
    graph = star_expand(build_graph(corpus_paths, "m"))
    config = LayoutConfig(iterations_per_depth=40, seed=5)
    layout = compute_layout(graph, config)
    for vertex, (x, _) in layout.positions.items():
        if vertex.kind == "set":
            assert x == vertex.depth * config.column_spacing
        else:
            assert x == (vertex.depth - config.entity_column_offset) * config.column_spacing

    echo = star_expand(
        build_graph({"t0": [make_path([["R"], ["A"], ["B"], ["A"]])]}, "m")
    )
    pos = compute_layout(echo, LayoutConfig(iterations_per_depth=30, seed=2)).positions
    y_by_depth = {v.depth: pos[v][1] for v in echo.set_vertices if v.payload == EntitySet.of(["A"])}
    assert y_by_depth[1] == y_by_depth[3]

    assert (
        compute_layout(graph, config).to_json().encode()
        == compute_layout(graph, config).to_json().encode()
    )

    clusters = star_expand(build_graph(cluster_corpus_paths(3), "m"))
    groups = cluster_depth1_groups()
    wins = 0
    for seed in range(30):
        result = compute_layout(clusters, LayoutConfig(seed=seed))
        ys = [
            [result.positions[v][1] for v in clusters.set_vertices
             if v.depth == 1 and v.payload in group]
            for group in groups
        ]
        intra = [abs(g[0] - g[1]) for g in ys]
        inter = [
            abs(a - b)
            for i in range(3) for j in range(i + 1, 3)
            for a in ys[i] for b in ys[j]
        ]
        wins += float(np.mean(intra)) < float(np.mean(inter))
    assert wins >= 27
    print(f"PASS: layout x exact, y bitwise on repeats, clusters split {wins}/30 seeds")


def test_spreading_activation_fixtures_and_invariants():
    """Chain fixture yields activations (1, 0.5, 0.25) to 1e-12 with D=0.5;
    100 random layered graphs terminate with unique firings; D=0 isolates the
    source; the convergent fixture fires its child at 0.4 > F=0.3."""
    chain = star_expand(
        build_graph({"t0": [make_path([["A"], ["B"], ["C"], ["D"]])]}, "m")
    )
    src = set_vertex(EntitySet.of(["A"]), 0)
    state = spread(chain, src, ActivationParams(firing_threshold=0.3, decay=0.5))
    want = {
        set_vertex(EntitySet.of(["A"]), 0): 1.0,
        set_vertex(EntitySet.of(["B"]), 1): 0.5,
        set_vertex(EntitySet.of(["C"]), 2): 0.25,
    }
    assert set(state.activation) == set(want)
    for vertex, expected in want.items():
        assert abs(state.activation[vertex] - expected) <= 1e-12

    rng = random.Random(271828)
    for _ in range(100):
        corpus_paths = random_corpus_paths(rng, n_threads=rng.randint(1, 20))
        if not corpus_paths:
            continue
        graph = star_expand(build_graph(corpus_paths, "m"))
        roots = sorted(
            (v for v in graph.set_vertices if v.depth == 0),
            key=lambda v: v.sort_key(),
        )
        source = roots[rng.randrange(len(roots))]
        run = spread(graph, source, ActivationParams(firing_threshold=0.1, decay=0.9))
        assert len(run.edges) == len(set(run.edges))
        assert all(dst.depth == s.depth + 1 for s, dst in run.edges)
        assert run.fired <= set(run.activation)
        again = spread(graph, source, ActivationParams(firing_threshold=0.1, decay=0.9))
        assert again.activation == run.activation and again.edges == run.edges

    frozen = spread(chain, src, ActivationParams(decay=0.0))
    assert frozen.activation == {src: 1.0}
    assert frozen.fired == {src}
    assert frozen.edges == ()

    paths = {}
    for i in range(5):
        paths[f"p{i}"] = [make_path([["R"], ["P1"], ["C" if i < 2 else "X"]])]
        paths[f"q{i}"] = [make_path([["R"], ["P2"], ["C" if i < 2 else "Y"]])]
    convergent = star_expand(build_graph(paths, "m"))
    state = spread(
        convergent,
        set_vertex(EntitySet.of(["R"]), 0),
        ActivationParams(firing_threshold=0.3, decay=1.0),
    )
    child = set_vertex(EntitySet.of(["C"]), 2)
    assert abs(state.activation[child] - 0.4) <= 1e-12
    assert child in state.fired
    print("PASS: activation chain exact, 100 random graphs clean, convergence fires at 0.4")


def test_sample_corpus_end_to_end_export(tmp_path):
    """The bundled 200-thread sample runs ingest through export in under 60 s,
    yielding a schema-valid, byte-deterministic bundle; and a two-label
    fixture's blend values equal hand arithmetic (0.75 and 0.25) exactly."""
    t0 = time.monotonic()
    bundles = []
    for attempt in ("one", "two"):
        out = tmp_path / attempt
        out.mkdir()
        steps = [
            ["ingest", "--input", str(DATA_DIR / "sample_dump.jsonl"),
             "--format", "reddit-jsonl", "--label", "sample",
             "--botlist", str(DATA_DIR / "bots.txt"),
             "--output", str(out / "corpus.jsonl")],
            ["link", "--corpus", str(out / "corpus.jsonl"),
             "--gazetteer", str(DATA_DIR / "gazetteer.tsv"),
             "--output", str(out / "entities.jsonl")],
            ["build", "--corpus", str(out / "corpus.jsonl"),
             "--entities", str(out / "entities.jsonl"), "--label", "sample",
             "--output", str(out / "graph.json")],
            ["layout", "--graph", str(out / "graph.json"),
             "--output", str(out / "layout.json")],
            ["activate", "--graph", str(out / "graph.json"),
             "--source", "s0:Donald_Trump", "--firing-threshold", "0.05",
             "--output", str(out / "activation.json")],
            ["export", "--graph", str(out / "graph.json"),
             "--layout", str(out / "layout.json"),
             "--activation", str(out / "activation.json"),
             "--output", str(out / "bundle.json")],
        ]
        for argv in steps:
            assert cli_main(argv) == 0, argv[0]
        bundles.append((out / "bundle.json").read_bytes())
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    assert bundles[0] == bundles[1]
    bundle = json.loads(bundles[0])
    validate_bundle(bundle)
    assert len(bundle["nodes"]) > 100

    def two_way(label, heavy, prefix):
        paths = {}
        for i in range(3):
            paths[f"{prefix}{i}"] = [make_path([["S"], [heavy]])]
        paths[f"{prefix}3"] = [make_path([["S"], ["F" if heavy == "E" else "E"]])]
        return build_graph(paths, label)

    merged = star_expand(merge_corpora(two_way("a", "E", "t"), two_way("b", "F", "u")))
    two_label = export_bundle(merged, compute_layout(merged, LayoutConfig(seed=0)))
    blends = {(l["src"], l["dst"]): l["blend"] for l in two_label["links"]}
    assert blends[("s0:S", "s1:E")] == 0.75
    assert blends[("s0:S", "s1:F")] == 0.25
    print(f"PASS: sample pipeline {elapsed:.1f}s, deterministic valid bundle, blend 0.75 exact")
