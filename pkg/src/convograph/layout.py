"""Depth-pinned force layout with progressive left-to-right locking.

Columns are fixed on the x-axis by depth (entity columns sit just left of
their set column), so the simulation only ever moves vertices vertically.
Depth ell vertices damp linearly to zero across iterations
(ell-1)*N .. ell*N and lock at ell*N; when a payload locks at its lowest
depth, every copy of it at other depths adopts that y and locks too, which
keeps repeated sets and entities on one horizontal line.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .graph import EntityGraph, GraphVertex, parse_vertex_id

log = logging.getLogger(__name__)

LAYOUT_SCHEMA_VERSION = 1

# keeps coincident same-column vertices from blowing up the repulsion term
REPULSION_EPS = 1e-3


@dataclass(frozen=True)
class LayoutConfig:
    iterations_per_depth: int = 100
    column_spacing: float = 100.0
    entity_column_offset: float = 0.5
    repulsion: float = 50.0
    spring: float = 0.1
    initial_temperature: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.iterations_per_depth < 1:
            raise ValueError("iterations_per_depth must be positive")
        if self.column_spacing <= 0:
            raise ValueError("column_spacing must be positive")
        if not 0.0 < self.entity_column_offset < 1.0:
            raise ValueError("entity_column_offset must lie in (0, 1)")
        if self.repulsion <= 0 or self.spring <= 0 or self.initial_temperature <= 0:
            raise ValueError("force strengths and temperature must be positive")


def _vertex_x(v: GraphVertex, config: LayoutConfig) -> float:
    if v.kind == "set":
        return v.depth * config.column_spacing
    return (v.depth - config.entity_column_offset) * config.column_spacing


@dataclass(frozen=True)
class LayoutResult:
    positions: dict[GraphVertex, tuple[float, float]]
    lock_iteration: dict[GraphVertex, int]

    def to_dict(self) -> dict:
        rows = []
        for v in sorted(self.positions, key=GraphVertex.sort_key):
            x, y = self.positions[v]
            rows.append(
                {"vertex_id": v.vertex_id, "x": x, "y": y, "lock_iteration": self.lock_iteration[v]}
            )
        return {"version": LAYOUT_SCHEMA_VERSION, "kind": "layout", "positions": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "LayoutResult":
        if data.get("kind") != "layout":
            raise ValueError("not a layout document")
        if data.get("version") != LAYOUT_SCHEMA_VERSION:
            raise ValueError(f"unsupported layout schema version: {data.get('version')}")
        positions = {}
        locks = {}
        for row in data["positions"]:
            v = parse_vertex_id(row["vertex_id"])
            positions[v] = (float(row["x"]), float(row["y"]))
            locks[v] = int(row["lock_iteration"])
        return cls(positions=positions, lock_iteration=locks)

    @classmethod
    def from_json(cls, text: str) -> "LayoutResult":
        return cls.from_dict(json.loads(text))


def _payload_key(v: GraphVertex):
    members = v.payload.entities if v.kind == "set" else (v.payload,)
    return (v.kind, members)


def compute_layout(graph: EntityGraph, config: LayoutConfig) -> LayoutResult:
    """Run the locking force simulation; see the module docstring.

    Forces on a vertex: spring attraction along its membership and
    transition edges with strength proportional to log(1 + weight), and
    repulsion from vertices in its own column. Displacement per iteration
    is the net force clamped to a per-vertex cap that cools globally and
    damps by depth; locked vertices stop moving but keep exerting force.
    """
    if not graph.star_expanded:
        raise ValueError("layout requires a star-expanded graph")

    vertices = sorted(graph.vertices(), key=GraphVertex.sort_key)
    if not vertices:
        return LayoutResult(positions={}, lock_iteration={})
    index = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    depth = np.array([v.depth for v in vertices], dtype=np.int64)

    columns: dict[tuple[str, int], list[int]] = {}
    for i, v in enumerate(vertices):
        columns.setdefault((v.kind, v.depth), []).append(i)
    max_column = max(len(ix) for ix in columns.values())
    column_arrays = [np.array(ix, dtype=np.int64) for ix in columns.values() if len(ix) > 1]

    payload_groups: dict[tuple, list[int]] = {}
    for i, v in enumerate(vertices):
        payload_groups.setdefault(_payload_key(v), []).append(i)

    # canonical edge order so force accumulation is bit-reproducible no
    # matter how the graph's dicts were populated
    edge_items = sorted(
        list(graph.transitions.items()) + list(graph.memberships.items()),
        key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key()),
    )
    src_idx, dst_idx, strength = [], [], []
    for (src, dst), weights in edge_items:
        src_idx.append(index[src])
        dst_idx.append(index[dst])
        strength.append(config.spring * np.log1p(sum(weights.values())))
    src_arr = np.array(src_idx, dtype=np.int64)
    dst_arr = np.array(dst_idx, dtype=np.int64)
    strength_arr = np.array(strength, dtype=np.float64)

    rng = np.random.default_rng(config.seed)
    height = max_column * config.column_spacing
    y = rng.uniform(0.0, height, size=n)
    locked = np.zeros(n, dtype=bool)
    lock_iter = np.zeros(n, dtype=np.int64)

    iters_per_depth = config.iterations_per_depth
    max_depth = int(depth.max())
    total = iters_per_depth * max_depth

    def lock_scheduled(t: int) -> None:
        due = [i for i in range(n) if not locked[i] and depth[i] * iters_per_depth == t]
        for i in sorted(due, key=lambda i: vertices[i].sort_key()):
            if locked[i]:
                continue
            locked[i] = True
            lock_iter[i] = t
            for j in payload_groups[_payload_key(vertices[i])]:
                if not locked[j]:
                    y[j] = y[i]
                    locked[j] = True
                    lock_iter[j] = t

    for t in range(total):
        lock_scheduled(t)

        force = np.zeros(n)
        if len(src_arr):
            pull = strength_arr * (y[dst_arr] - y[src_arr])
            np.add.at(force, src_arr, pull)
            np.add.at(force, dst_arr, -pull)
        for col in column_arrays:
            dy = y[col][:, None] - y[col][None, :]
            force[col] += config.repulsion * np.sum(dy / (dy * dy + REPULSION_EPS**2), axis=1)

        cooling = 1.0 - t / total
        window_start = (depth - 1) * iters_per_depth
        damping = np.clip(1.0 - (t - window_start) / iters_per_depth, 0.0, 1.0)
        cap = config.initial_temperature * cooling * damping
        step = np.clip(force, -cap, cap)
        y = np.where(locked, y, y + step)

    lock_scheduled(total)

    positions = {v: (_vertex_x(v, config), float(y[i])) for v, i in index.items()}
    locks = {v: int(lock_iter[i]) for v, i in index.items()}
    log.debug("layout: %d vertices over %d iterations", n, total)
    return LayoutResult(positions=positions, lock_iteration=locks)
