from __future__ import annotations

import random

import numpy as np
import pytest
from synth import make_path, random_corpus_paths

from convograph.graph import (
    EntityGraph,
    GraphVertex,
    build_graph,
    set_vertex,
    star_expand,
)
from convograph.layout import LayoutConfig, LayoutResult, compute_layout
from convograph.linking import EntitySet


def seeded_initial_y(graph: EntityGraph, config: LayoutConfig) -> dict[GraphVertex, float]:
    """Replay the documented seeding contract independently of the engine."""
    vertices = sorted(graph.vertices(), key=GraphVertex.sort_key)
    columns: dict[tuple[str, int], int] = {}
    for v in vertices:
        key = (v.kind, v.depth)
        columns[key] = columns.get(key, 0) + 1
    height = max(columns.values()) * config.column_spacing
    ys = np.random.default_rng(config.seed).uniform(0.0, height, size=len(vertices))
    return {v: float(ys[i]) for i, v in enumerate(vertices)}


def lone_vertex_graph(depth: int) -> EntityGraph:
    v = set_vertex(EntitySet.of(["A"]), depth)
    return EntityGraph(
        labels=("main",),
        set_vertices={v},
        transitions={},
        occurrence={v: {"main": 1}},
        memberships={},
        star_expanded=True,
    )


class TestConfig:
    def test_defaults_valid(self):
        cfg = LayoutConfig()
        assert cfg.iterations_per_depth == 100
        assert cfg.entity_column_offset == 0.5

    def test_validation(self):
        with pytest.raises(ValueError, match="iterations"):
            LayoutConfig(iterations_per_depth=0)
        with pytest.raises(ValueError, match="column_spacing"):
            LayoutConfig(column_spacing=0.0)
        for offset in (0.0, 1.0, -0.2):
            with pytest.raises(ValueError, match="offset"):
                LayoutConfig(entity_column_offset=offset)
        with pytest.raises(ValueError, match="positive"):
            LayoutConfig(repulsion=-1.0)
        with pytest.raises(ValueError, match="positive"):
            LayoutConfig(spring=0.0)
        with pytest.raises(ValueError, match="positive"):
            LayoutConfig(initial_temperature=0.0)


class TestColumns:
    def test_x_formula_exact_everywhere(self):
        rng = random.Random(67)
        graph = star_expand(build_graph(random_corpus_paths(rng, 15, max_depth=5, alphabet=6), "m"))
        cfg = LayoutConfig(iterations_per_depth=10, column_spacing=80.0, entity_column_offset=0.25)
        result = compute_layout(graph, cfg)
        for v, (x, y) in result.positions.items():
            if v.kind == "set":
                assert x == v.depth * 80.0
            else:
                assert x == (v.depth - 0.25) * 80.0
            assert np.isfinite(y)

    def test_entity_column_lies_left_of_its_set_column(self):
        graph = star_expand(build_graph({"t0": [make_path([["R"], ["A"]])]}, "m"))
        result = compute_layout(graph, LayoutConfig(iterations_per_depth=5))
        xs = {v.vertex_id: x for v, (x, _) in result.positions.items()}
        assert xs["s0:R"] < xs["e1:A"] < xs["s1:A"]


class TestLocking:
    def test_lone_depth1_vertex_keeps_seeded_y_and_locks_at_n(self):
        cfg = LayoutConfig(iterations_per_depth=100)
        graph = lone_vertex_graph(1)
        result = compute_layout(graph, cfg)
        v = set_vertex(EntitySet.of(["A"]), 1)
        x, y = result.positions[v]
        assert x == cfg.column_spacing
        assert y == seeded_initial_y(graph, cfg)[v]
        assert result.lock_iteration[v] == 100

    def test_lone_depth0_vertex_locks_immediately(self):
        cfg = LayoutConfig(iterations_per_depth=100)
        graph = lone_vertex_graph(0)
        result = compute_layout(graph, cfg)
        v = set_vertex(EntitySet.of(["A"]), 0)
        assert result.lock_iteration[v] == 0
        assert result.positions[v] == (0.0, seeded_initial_y(graph, cfg)[v])

    def test_depth0_vertices_keep_seeded_y(self):
        rng = random.Random(71)
        graph = star_expand(build_graph(random_corpus_paths(rng, 10, max_depth=4, alphabet=5), "m"))
        cfg = LayoutConfig(iterations_per_depth=20, seed=5)
        result = compute_layout(graph, cfg)
        initial = seeded_initial_y(graph, cfg)
        for v, (x, y) in result.positions.items():
            if v.depth == 0:
                assert y == initial[v]
                assert result.lock_iteration[v] == 0

    def test_repeated_payload_shares_y_exactly(self):
        # {A} appears at depths 1 and 3; both copies must sit on one line
        path = make_path([["R"], ["A"], ["B"], ["A"]])
        graph = star_expand(build_graph({"t0": [path]}, "m"))
        result = compute_layout(graph, LayoutConfig(iterations_per_depth=30))
        a1 = set_vertex(EntitySet.of(["A"]), 1)
        a3 = set_vertex(EntitySet.of(["A"]), 3)
        assert result.positions[a1][1] == result.positions[a3][1]
        assert result.positions[a1][0] != result.positions[a3][0]
        n = 30
        assert result.lock_iteration[a1] == n
        assert result.lock_iteration[a3] == n  # adopted at the first copy's lock

    def test_lock_iteration_is_first_depth_of_payload(self):
        rng = random.Random(73)
        graph = star_expand(build_graph(random_corpus_paths(rng, 12, max_depth=5, alphabet=4), "m"))
        n = 25
        result = compute_layout(graph, LayoutConfig(iterations_per_depth=n))
        groups: dict[tuple, list[GraphVertex]] = {}
        for v in graph.vertices():
            members = v.payload.entities if v.kind == "set" else (v.payload,)
            groups.setdefault((v.kind, members), []).append(v)
        for copies in groups.values():
            first = min(c.depth for c in copies)
            for c in copies:
                assert result.lock_iteration[c] == first * n

    def test_every_vertex_locks_by_the_end(self):
        rng = random.Random(79)
        graph = star_expand(build_graph(random_corpus_paths(rng, 8, max_depth=3, alphabet=5), "m"))
        n = 15
        result = compute_layout(graph, LayoutConfig(iterations_per_depth=n))
        total = n * graph.max_depth
        for v, it in result.lock_iteration.items():
            assert 0 <= it <= total
            assert it % n == 0


class TestDeterminism:
    def test_fixed_seed_byte_identical(self):
        rng = random.Random(83)
        corpus_paths = random_corpus_paths(rng, 12, max_depth=4, alphabet=6)
        graph = star_expand(build_graph(corpus_paths, "m"))
        cfg = LayoutConfig(iterations_per_depth=40, seed=11)
        assert compute_layout(graph, cfg).to_json() == compute_layout(graph, cfg).to_json()

    def test_graph_construction_route_does_not_matter(self):
        rng = random.Random(89)
        corpus_paths = random_corpus_paths(rng, 12, max_depth=4, alphabet=6)
        graph = star_expand(build_graph(corpus_paths, "m"))
        # a deserialized copy populates its dicts in a different order
        clone = EntityGraph.from_json(graph.to_json())
        cfg = LayoutConfig(iterations_per_depth=40, seed=11)
        assert compute_layout(graph, cfg).to_json() == compute_layout(clone, cfg).to_json()

    def test_seed_changes_layout(self):
        graph = star_expand(build_graph({"t0": [make_path([["R"], ["A"], ["B"]])]}, "m"))
        one = compute_layout(graph, LayoutConfig(iterations_per_depth=10, seed=0))
        two = compute_layout(graph, LayoutConfig(iterations_per_depth=10, seed=1))
        ys_one = sorted(y for _, y in one.positions.values())
        ys_two = sorted(y for _, y in two.positions.values())
        assert ys_one != ys_two


class TestSerialization:
    def test_round_trip_exact(self):
        rng = random.Random(97)
        graph = star_expand(build_graph(random_corpus_paths(rng, 10, max_depth=3, alphabet=5), "m"))
        result = compute_layout(graph, LayoutConfig(iterations_per_depth=10))
        again = LayoutResult.from_json(result.to_json())
        assert again.positions == result.positions
        assert again.lock_iteration == result.lock_iteration
        assert again.to_json() == result.to_json()

    def test_bad_documents_rejected(self):
        result = compute_layout(lone_vertex_graph(1), LayoutConfig(iterations_per_depth=5))
        data = result.to_dict()
        with pytest.raises(ValueError, match="version"):
            LayoutResult.from_dict({**data, "version": 9})
        with pytest.raises(ValueError, match="layout"):
            LayoutResult.from_dict({**data, "kind": "other"})

    def test_requires_star_expansion(self):
        raw = build_graph({"t0": [make_path([["R"], ["A"]])]}, "m")
        with pytest.raises(ValueError, match="star-expanded"):
            compute_layout(raw, LayoutConfig())

    def test_empty_graph_trivial_layout(self):
        empty = EntityGraph(
            labels=("m",), set_vertices=set(), transitions={}, occurrence={},
            memberships={}, star_expanded=True,
        )
        result = compute_layout(empty, LayoutConfig())
        assert result.positions == {}
        assert result.to_dict()["positions"] == []
