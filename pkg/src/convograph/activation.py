"""Spreading activation over the rewired set-level graph.

A user-selected source vertex starts with activation 1 and fires; firing
pushes activation along outgoing view edges, scaled by normalized edge
weight and a decay factor. Receivers whose accumulated activation clears
the firing threshold fire exactly once, level by level, until the signal
dies out or the deepest column is reached.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .graph import EntityGraph, GraphVertex, RewiredView

log = logging.getLogger(__name__)

ACTIVATION_SCHEMA_VERSION = 1

NORMALIZATION_MODES = ("out-normalized", "global-max")


@dataclass(frozen=True)
class ActivationParams:
    firing_threshold: float = 0.3
    decay: float = 0.5
    weight_normalization: str = "out-normalized"

    def __post_init__(self):
        if not 0.0 <= self.firing_threshold <= 1.0:
            raise ValueError(f"firing threshold {self.firing_threshold} outside [0, 1]")
        if not 0.0 <= self.decay <= 1.0:
            raise ValueError(f"decay {self.decay} outside [0, 1]")
        if self.weight_normalization not in NORMALIZATION_MODES:
            raise ValueError(f"unknown normalization {self.weight_normalization!r}")


@dataclass(frozen=True)
class ActivationState:
    """Result of one spread: activations, fired set, and the edges that
    actually carried signal (kept so the active subgraph can be cut out)."""

    source: GraphVertex
    params: ActivationParams
    label: str | None
    activation: dict[GraphVertex, float]
    fired: frozenset[GraphVertex]
    edges: tuple[tuple[GraphVertex, GraphVertex], ...]

    def to_dict(self) -> dict:
        return {
            "version": ACTIVATION_SCHEMA_VERSION,
            "kind": "activation",
            "source": self.source.vertex_id,
            "params": {
                "firing_threshold": self.params.firing_threshold,
                "decay": self.params.decay,
                "weight_normalization": self.params.weight_normalization,
                "label": self.label,
            },
            "activations": [
                {"vertex_id": v.vertex_id, "A": self.activation[v], "fired": v in self.fired}
                for v in sorted(self.activation, key=GraphVertex.sort_key)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def spread(
    view: EntityGraph | RewiredView,
    source: GraphVertex,
    params: ActivationParams,
    label: str | None = None,
) -> ActivationState:
    """Level-synchronous spreading activation from ``source``.

    Each firing vertex i contributes A_i * w * decay to every successor j,
    where w is edge weight normalized per the params: by i's total outgoing
    weight, or by the largest edge weight anywhere in the view. After a
    whole depth has accumulated, receivers with activation strictly above
    the firing threshold fire, once each. Zero contributions are dropped,
    so decay 0 activates nothing beyond the source.
    """
    if isinstance(view, EntityGraph):
        view = view.rewired()
    if source.kind != "set" or not view.has_vertex(source):
        raise ValueError(f"source {source.vertex_id} is not a set vertex of the graph")

    activation: dict[GraphVertex, float] = {source: 1.0}
    fired: set[GraphVertex] = {source}
    carried: list[tuple[GraphVertex, GraphVertex]] = []

    global_max = None
    if params.weight_normalization == "global-max":
        global_max = _max_view_weight(view, label)

    frontier = [source]
    max_depth = view.graph.max_depth
    while frontier and frontier[0].depth < max_depth:
        received: dict[GraphVertex, float] = {}
        for v in sorted(frontier, key=GraphVertex.sort_key):
            out_total = view.out_total(v, label)
            for dst, weights in sorted(
                view.successors(v).items(), key=lambda kv: kv[0].sort_key()
            ):
                w = sum(weights.values()) if label is None else weights.get(label, 0)
                if w == 0:
                    continue
                scale = out_total if global_max is None else global_max
                contribution = activation[v] * (w / scale) * params.decay
                if contribution == 0.0:
                    continue
                received[dst] = received.get(dst, 0.0) + contribution
                carried.append((v, dst))

        frontier = []
        for dst in sorted(received, key=GraphVertex.sort_key):
            activation[dst] = activation.get(dst, 0.0) + received[dst]
            if activation[dst] > params.firing_threshold and dst not in fired:
                fired.add(dst)
                frontier.append(dst)

    log.debug(
        "spread from %s: %d activated, %d fired", source.vertex_id, len(activation), len(fired)
    )
    return ActivationState(
        source=source,
        params=params,
        label=label,
        activation=activation,
        fired=frozenset(fired),
        edges=tuple(carried),
    )


def _max_view_weight(view: RewiredView, label: str | None) -> int:
    best = 0
    for _, _, weights in view.edges():
        w = sum(weights.values()) if label is None else weights.get(label, 0)
        best = max(best, w)
    if best == 0:
        raise ValueError("view has no weighted edges under the requested label")
    return best


@dataclass(frozen=True)
class ActivationSubgraph:
    """The activated cut of the graph plus display radii per vertex."""

    vertices: tuple[GraphVertex, ...]
    edges: tuple[tuple[GraphVertex, GraphVertex], ...]
    radius: dict[GraphVertex, float] = field(compare=False)

    def __len__(self) -> int:
        return len(self.vertices)


def activation_subgraph(
    state: ActivationState,
    min_radius: float = 4.0,
    max_radius: float = 16.0,
) -> ActivationSubgraph:
    """Vertices with positive activation, edges that carried signal, and
    radii mapping activation linearly onto [min_radius, max_radius].

    Equal activations everywhere (including the single-vertex case) map to
    max_radius.
    """
    if min_radius <= 0 or max_radius < min_radius:
        raise ValueError("radii must satisfy 0 < min_radius <= max_radius")

    kept = sorted(
        (v for v, a in state.activation.items() if a > 0.0), key=GraphVertex.sort_key
    )
    values = [state.activation[v] for v in kept]
    lo, hi = min(values), max(values)
    span = hi - lo

    radius: dict[GraphVertex, float] = {}
    for v in kept:
        if span == 0.0:
            radius[v] = max_radius
        else:
            t = (state.activation[v] - lo) / span
            radius[v] = min_radius + t * (max_radius - min_radius)

    edges = tuple(sorted(set(state.edges), key=lambda e: (e[0].sort_key(), e[1].sort_key())))
    return ActivationSubgraph(vertices=tuple(kept), edges=edges, radius=radius)
