"""Viewer bundle assembly.

The bundle is a single self-contained JSON document: set vertices with
their layout positions, rewired set-level links with log-scaled opacity,
an optional spreading-activation block, and (for two-corpus graphs) a
per-link blend value locating each transition between the corpora.
Entity vertices stay out of the bundle; they exist for graph construction,
not for drawing.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping

import jsonschema
import numpy as np

from .activation import ActivationState
from .graph import EntityGraph, GraphVertex, RewiredView
from .layout import LayoutResult

log = logging.getLogger(__name__)

BUNDLE_SCHEMA_VERSION = 1

_NODE_SCHEMA = {
    "type": "object",
    "required": ["id", "kind", "depth", "x", "y", "label", "entities", "occurrence"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "kind": {"const": "set"},
        "depth": {"type": "integer", "minimum": 0},
        "x": {"type": "number"},
        "y": {"type": "number"},
        "label": {"type": "string"},
        "entities": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "occurrence": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
    },
}

_LINK_SCHEMA = {
    "type": "object",
    "required": ["src", "dst", "weights", "opacity"],
    "additionalProperties": False,
    "properties": {
        "src": {"type": "string"},
        "dst": {"type": "string"},
        "weights": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 1},
        },
        "opacity": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "blend": {"type": "number", "minimum": 0, "maximum": 1},
    },
}

_ACTIVATION_SCHEMA = {
    "type": "object",
    "required": ["source", "params", "activations"],
    "additionalProperties": False,
    "properties": {
        "source": {"type": "string"},
        "params": {"type": "object"},
        "activations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["vertex_id", "A", "fired"],
                "additionalProperties": False,
                "properties": {
                    "vertex_id": {"type": "string"},
                    "A": {"type": "number", "minimum": 0},
                    "fired": {"type": "boolean"},
                },
            },
        },
    },
}

BUNDLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["meta", "nodes", "links"],
    "additionalProperties": False,
    "properties": {
        "meta": {
            "type": "object",
            "required": ["version", "labels", "max_depth"],
            "additionalProperties": False,
            "properties": {
                "version": {"const": BUNDLE_SCHEMA_VERSION},
                "labels": {
                    "type": "array",
                    "items": {"type": "string", "minLength": 1},
                    "minItems": 1,
                },
                "max_depth": {"type": "integer", "minimum": 0},
            },
        },
        "nodes": {"type": "array", "items": _NODE_SCHEMA},
        "links": {"type": "array", "items": _LINK_SCHEMA},
        "activation": _ACTIVATION_SCHEMA,
    },
}


def compute_blend(p_a: float, p_b: float) -> float:
    """Where an edge sits between two corpora: 1 is pure first corpus.

    Arguments are the edge's out-normalized transition probabilities under
    each corpus (zero when the source vertex is absent there).
    """
    if p_a < 0 or p_b < 0:
        raise ValueError("probabilities cannot be negative")
    if p_a == 0 and p_b == 0:
        raise ValueError("blend undefined when both probabilities vanish")
    return p_a / (p_a + p_b)


def blend_map(
    view: EntityGraph | RewiredView, label_a: str, label_b: str
) -> dict[tuple[GraphVertex, GraphVertex], float]:
    """Blend value per rewired view edge over recorded set vertices."""
    if isinstance(view, EntityGraph):
        view = view.rewired()
    out: dict[tuple[GraphVertex, GraphVertex], float] = {}
    for src, dst, weights in view.edges():
        probs = []
        for label in (label_a, label_b):
            total = view.out_total(src, label)
            probs.append(weights.get(label, 0) / total if total else 0.0)
        if probs[0] == 0 and probs[1] == 0:
            continue
        out[(src, dst)] = compute_blend(probs[0], probs[1])
    return out


def export_bundle(
    graph: EntityGraph,
    layout: LayoutResult,
    blends: Mapping[tuple[GraphVertex, GraphVertex], float] | None = None,
    activation: ActivationState | dict | None = None,
) -> dict:
    """Assemble and validate the viewer bundle document.

    Links come from the rewired set-level view. Opacity scales each link's
    total weight by log(1 + w) against the heaviest link. Blend values are
    computed automatically for two-corpus graphs when not supplied.
    """
    if not graph.star_expanded:
        raise ValueError("export requires a star-expanded graph")
    missing = [v for v in graph.set_vertices if v not in layout.positions]
    if missing:
        raise ValueError(
            f"layout is missing {len(missing)} graph vertices; recompute it on this graph"
        )

    view = graph.rewired()
    if blends is None and len(graph.labels) == 2:
        blends = blend_map(view, graph.labels[0], graph.labels[1])

    nodes = []
    for v in sorted(graph.set_vertices, key=GraphVertex.sort_key):
        x, y = layout.positions[v]
        nodes.append(
            {
                "id": v.vertex_id,
                "kind": "set",
                "depth": v.depth,
                "x": x,
                "y": y,
                "label": ", ".join(v.payload.entities),
                "entities": list(v.payload.entities),
                "occurrence": dict(sorted(graph.occurrence.get(v, {}).items())),
            }
        )

    raw_links = []
    w_max = 0
    for src, dst, weights in view.edges():
        total = sum(weights.values())
        raw_links.append((src, dst, weights, total))
        w_max = max(w_max, total)

    links = []
    for src, dst, weights, total in raw_links:
        entry = {
            "src": src.vertex_id,
            "dst": dst.vertex_id,
            "weights": dict(sorted(weights.items())),
            "opacity": float(np.log1p(total) / np.log1p(w_max)),
        }
        if blends is not None:
            if (src, dst) not in blends:
                continue
            entry["blend"] = blends[(src, dst)]
        links.append(entry)

    bundle = {
        "meta": {
            "version": BUNDLE_SCHEMA_VERSION,
            "labels": list(graph.labels),
            "max_depth": graph.max_depth,
        },
        "nodes": nodes,
        "links": links,
    }
    if activation is not None:
        act = activation if isinstance(activation, dict) else activation.to_dict()
        if act.get("kind", "activation") != "activation":
            raise ValueError(f"not an activation document: kind={act.get('kind')!r}")
        bundle["activation"] = {
            "source": act["source"],
            "params": act["params"],
            "activations": act["activations"],
        }

    validate_bundle(bundle)
    log.debug("bundle: %d nodes, %d links", len(nodes), len(links))
    return bundle


def validate_bundle(bundle: dict) -> None:
    """Schema check plus the referential rules a schema cannot express."""
    jsonschema.validate(bundle, BUNDLE_SCHEMA)
    node_ids = {node["id"] for node in bundle["nodes"]}
    labels = set(bundle["meta"]["labels"])
    two_corpus = len(bundle["meta"]["labels"]) == 2
    for link in bundle["links"]:
        if link["src"] not in node_ids or link["dst"] not in node_ids:
            raise ValueError(f"link endpoint missing from nodes: {link['src']} -> {link['dst']}")
        if set(link["weights"]) - labels:
            raise ValueError("link carries weight for an undeclared corpus label")
        if two_corpus != ("blend" in link):
            raise ValueError("blend must be present exactly when two corpora are compared")
    if "activation" in bundle:
        for row in bundle["activation"]["activations"]:
            if row["vertex_id"] not in node_ids:
                raise ValueError(f"activation references unknown vertex {row['vertex_id']}")


def bundle_to_json(bundle: dict) -> str:
    return json.dumps(bundle, sort_keys=True, separators=(",", ":")) + "\n"
