"""Depth-layered entity graph construction.

Linked threads become entity trees, root-to-leaf conversation paths are
extracted, and paths from many threads aggregate into a weighted directed
graph whose vertices are (entity set, depth) pairs. A star expansion adds
one vertex per (entity, depth) pair so entity overlap between different
sets becomes traversable, and a rewired set-level view generalizes
transitions through those shared entities.

Edge weights count *distinct threads* exhibiting a transition, never raw
path multiplicity, so large threads do not dominate. Weights are kept per
corpus label to support dual-corpus comparison.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .ingest import Corpus, Thread
from .linking import EntitySet

GRAPH_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GraphVertex:
    """Identity is (kind, payload, depth): either an entity set or a single
    entity pinned at one conversation depth."""

    kind: str  # "set" | "entity"
    payload: EntitySet | str
    depth: int

    @property
    def vertex_id(self) -> str:
        if self.kind == "set":
            return f"s{self.depth}:" + "|".join(self.payload.entities)
        return f"e{self.depth}:{self.payload}"

    def sort_key(self):
        members = self.payload.entities if self.kind == "set" else (self.payload,)
        return (self.kind, self.depth, members)


def set_vertex(entities: EntitySet, depth: int) -> GraphVertex:
    if not entities:
        raise ValueError("set vertices require a non-empty entity set")
    return GraphVertex(kind="set", payload=entities, depth=depth)


def parse_vertex_id(vertex_id: str) -> GraphVertex:
    """Inverse of GraphVertex.vertex_id."""
    match = re.match(r"^([se])(\d+):(.+)$", vertex_id)
    if match is None:
        raise ValueError(f"malformed vertex id: {vertex_id!r}")
    kind, depth, payload = match.group(1), int(match.group(2)), match.group(3)
    if kind == "s":
        return set_vertex(EntitySet.of(payload.split("|")), depth)
    return entity_vertex(payload, depth)


def entity_vertex(entity_id: str, depth: int) -> GraphVertex:
    return GraphVertex(kind="entity", payload=entity_id, depth=depth)


@dataclass(frozen=True)
class EntityTree:
    """A thread with each retained comment replaced by its entity set.

    Comments with empty entity sets truncate their branch: a node is kept
    only if every ancestor up to the root linked at least one entity.
    """

    root_id: str | None
    nodes: dict[str, tuple[EntitySet, int]]
    edges: tuple[tuple[str, str], ...]

    def children_of(self, comment_id: str) -> list[str]:
        return [child for parent, child in self.edges if parent == comment_id]

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class ConversationPath:
    """Root-to-leaf sequence of (entity set, depth) steps, depths 0,1,2,..."""

    steps: tuple[tuple[EntitySet, int], ...]

    def __post_init__(self):
        if len(self.steps) < 2:
            raise ValueError("a conversation path needs at least two steps")
        for i, (entities, depth) in enumerate(self.steps):
            if depth != i:
                raise ValueError("path depths must increase consecutively from 0")
            if not entities:
                raise ValueError("path steps require non-empty entity sets")

    def __len__(self) -> int:
        return len(self.steps)

    def vertices(self) -> list[GraphVertex]:
        return [set_vertex(entities, depth) for entities, depth in self.steps]

    def transitions(self) -> list[tuple[GraphVertex, GraphVertex]]:
        verts = self.vertices()
        return list(zip(verts, verts[1:]))


def build_entity_tree(thread: Thread, entity_sets: dict[str, EntitySet]) -> EntityTree:
    """Replace each comment by its entity set, truncating empty branches.

    Comments missing from ``entity_sets`` count as empty. An empty root
    yields an empty tree.
    """
    root_set = entity_sets.get(thread.root.id)
    if not root_set:
        return EntityTree(root_id=None, nodes={}, edges=())

    children: dict[str, list[str]] = {}
    for comment in thread.comments:
        if comment.parent_id is not None:
            children.setdefault(comment.parent_id, []).append(comment.id)

    nodes: dict[str, tuple[EntitySet, int]] = {thread.root.id: (root_set, 0)}
    edges: list[tuple[str, str]] = []
    stack = [thread.root.id]
    while stack:
        current = stack.pop()
        depth = nodes[current][1]
        for child_id in sorted(children.get(current, []), reverse=True):
            child_set = entity_sets.get(child_id)
            if not child_set:
                continue
            nodes[child_id] = (child_set, depth + 1)
            edges.append((current, child_id))
            stack.append(child_id)
    return EntityTree(root_id=thread.root.id, nodes=nodes, edges=tuple(sorted(edges)))


def extract_paths(tree: EntityTree, min_len: int = 3) -> list[ConversationPath]:
    """One path per root-to-leaf route, dropping those shorter than
    ``min_len`` nodes (short conversations did not measurably progress)."""
    if tree.root_id is None:
        return []

    children: dict[str, list[str]] = {}
    for parent, child in tree.edges:
        children.setdefault(parent, []).append(child)

    paths: list[ConversationPath] = []
    stack: list[tuple[str, list[str]]] = [(tree.root_id, [tree.root_id])]
    while stack:
        current, trail = stack.pop()
        kids = sorted(children.get(current, []))
        if not kids:
            if len(trail) >= min_len:
                steps = tuple(tree.nodes[cid] for cid in trail)
                paths.append(ConversationPath(steps=steps))
            continue
        for child_id in reversed(kids):
            stack.append((child_id, trail + [child_id]))
    paths.sort(key=lambda p: tuple(v.sort_key() for v in p.vertices()))
    return paths


def paths_by_thread(
    corpus: Corpus,
    entity_sets: dict[str, EntitySet],
    min_len: int = 3,
) -> dict[str, list[ConversationPath]]:
    """Entity trees and path extraction over a whole corpus."""
    out: dict[str, list[ConversationPath]] = {}
    for thread in corpus.threads:
        tree = build_entity_tree(thread, entity_sets)
        paths = extract_paths(tree, min_len=min_len)
        if paths:
            out[thread.thread_id] = paths
    return out


class EntityGraph:
    """Layered weighted multigraph over (entity set, depth) vertices.

    Transition edges connect consecutive depths; membership edges (added
    by :func:`star_expand`) connect each entity to the sets containing it
    at the same depth. Treat instances as immutable: construction helpers
    always return new graphs.
    """

    def __init__(
        self,
        labels: tuple[str, ...],
        set_vertices: set[GraphVertex],
        transitions: dict[tuple[GraphVertex, GraphVertex], dict[str, int]],
        occurrence: dict[GraphVertex, dict[str, int]],
        memberships: dict[tuple[GraphVertex, GraphVertex], dict[str, int]] | None = None,
        star_expanded: bool = False,
    ):
        self.labels = labels
        self.set_vertices = set_vertices
        self.transitions = transitions
        self.occurrence = occurrence
        self.memberships = memberships or {}
        self.star_expanded = star_expanded
        self._view: RewiredView | None = None

    @property
    def max_depth(self) -> int:
        if not self.set_vertices:
            return 0
        return max(v.depth for v in self.set_vertices)

    @property
    def entity_vertices(self) -> set[GraphVertex]:
        return {src for src, _ in self.memberships}

    def vertices(self) -> set[GraphVertex]:
        return self.set_vertices | self.entity_vertices

    def transition_weight(self, src: GraphVertex, dst: GraphVertex, label: str | None = None) -> int:
        weights = self.transitions.get((src, dst), {})
        if label is None:
            return sum(weights.values())
        return weights.get(label, 0)

    def transitions_from(self, src: GraphVertex) -> list[tuple[GraphVertex, dict[str, int]]]:
        return [(dst, w) for (s, dst), w in self.transitions.items() if s == src]

    def rewired(self) -> "RewiredView":
        if self._view is None:
            self._view = RewiredView(self)
        return self._view

    def validate(self) -> None:
        """Assert the layered-DAG and weight invariants; raises on violation."""
        for (src, dst), weights in self.transitions.items():
            if src.kind != "set" or dst.kind != "set":
                raise AssertionError("transition endpoints must be set vertices")
            if dst.depth != src.depth + 1:
                raise AssertionError(f"transition skips depth: {src.vertex_id} -> {dst.vertex_id}")
            if src not in self.set_vertices or dst not in self.set_vertices:
                raise AssertionError("transition references unknown vertex")
            if any(w < 1 for w in weights.values()):
                raise AssertionError("transition weight below 1")
        for (ent, dst), weights in self.memberships.items():
            if ent.kind != "entity" or dst.kind != "set":
                raise AssertionError("membership edges connect entity -> set")
            if ent.depth != dst.depth:
                raise AssertionError("membership edge crosses depths")
            if dst not in self.set_vertices:
                raise AssertionError("membership references unknown set vertex")
            if any(w < 1 for w in weights.values()):
                raise AssertionError("membership weight below 1")

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        vertices = []
        for v in sorted(self.set_vertices, key=GraphVertex.sort_key):
            vertices.append(
                {
                    "id": v.vertex_id,
                    "kind": "set",
                    "depth": v.depth,
                    "entities": list(v.payload.entities),
                    "occurrence": dict(sorted(self.occurrence.get(v, {}).items())),
                }
            )
        for v in sorted(self.entity_vertices, key=GraphVertex.sort_key):
            vertices.append(
                {"id": v.vertex_id, "kind": "entity", "depth": v.depth, "entity": v.payload}
            )

        edges = []
        for (src, dst), weights in sorted(
            self.transitions.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())
        ):
            edges.append(
                {
                    "src": src.vertex_id,
                    "dst": dst.vertex_id,
                    "kind": "transition",
                    "weights": dict(sorted(weights.items())),
                }
            )
        for (ent, dst), weights in sorted(
            self.memberships.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())
        ):
            edges.append(
                {
                    "src": ent.vertex_id,
                    "dst": dst.vertex_id,
                    "kind": "membership",
                    "weights": dict(sorted(weights.items())),
                }
            )

        return {
            "version": GRAPH_SCHEMA_VERSION,
            "kind": "entity-graph",
            "labels": list(self.labels),
            "max_depth": self.max_depth,
            "star_expanded": self.star_expanded,
            "vertices": vertices,
            "edges": edges,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "EntityGraph":
        if data.get("kind") != "entity-graph":
            raise ValueError("not an entity-graph document")
        if data.get("version") != GRAPH_SCHEMA_VERSION:
            raise ValueError(f"unsupported graph schema version: {data.get('version')}")

        set_verts: dict[str, GraphVertex] = {}
        ent_verts: dict[str, GraphVertex] = {}
        occurrence: dict[GraphVertex, dict[str, int]] = {}
        for entry in data["vertices"]:
            if entry["kind"] == "set":
                v = set_vertex(EntitySet.of(entry["entities"]), int(entry["depth"]))
                set_verts[entry["id"]] = v
                occurrence[v] = {k: int(x) for k, x in entry.get("occurrence", {}).items()}
            else:
                ent_verts[entry["id"]] = entity_vertex(entry["entity"], int(entry["depth"]))

        transitions: dict[tuple[GraphVertex, GraphVertex], dict[str, int]] = {}
        memberships: dict[tuple[GraphVertex, GraphVertex], dict[str, int]] = {}
        for entry in data["edges"]:
            weights = {k: int(x) for k, x in entry["weights"].items()}
            if entry["kind"] == "transition":
                transitions[(set_verts[entry["src"]], set_verts[entry["dst"]])] = weights
            elif entry["kind"] == "membership":
                memberships[(ent_verts[entry["src"]], set_verts[entry["dst"]])] = weights
            else:
                raise ValueError(f"unknown edge kind: {entry['kind']!r}")

        graph = cls(
            labels=tuple(data["labels"]),
            set_vertices=set(set_verts.values()),
            transitions=transitions,
            occurrence=occurrence,
            memberships=memberships,
            star_expanded=bool(data["star_expanded"]),
        )
        graph.validate()
        return graph

    @classmethod
    def from_json(cls, text: str) -> "EntityGraph":
        return cls.from_dict(json.loads(text))


def build_graph(corpus_paths: dict[str, list[ConversationPath]], label: str) -> EntityGraph:
    """Aggregate conversation paths into an entity graph.

    Transition weights and set-vertex occurrence counts both increment at
    most once per thread, regardless of how many of the thread's paths
    contain them.
    """
    transitions: dict[tuple[GraphVertex, GraphVertex], dict[str, int]] = {}
    occurrence: dict[GraphVertex, dict[str, int]] = {}
    vertices: set[GraphVertex] = set()

    for thread_id in sorted(corpus_paths):
        thread_transitions: set[tuple[GraphVertex, GraphVertex]] = set()
        thread_vertices: set[GraphVertex] = set()
        for path in corpus_paths[thread_id]:
            thread_transitions.update(path.transitions())
            thread_vertices.update(path.vertices())
        for edge in thread_transitions:
            weights = transitions.setdefault(edge, {})
            weights[label] = weights.get(label, 0) + 1
        for v in thread_vertices:
            counts = occurrence.setdefault(v, {})
            counts[label] = counts.get(label, 0) + 1
        vertices.update(thread_vertices)

    return EntityGraph(
        labels=(label,),
        set_vertices=vertices,
        transitions=transitions,
        occurrence=occurrence,
    )


def star_expand(graph: EntityGraph) -> EntityGraph:
    """Add one vertex per (entity, depth) pair plus membership edges.

    Each membership edge carries the occurrence count of its set vertex,
    i.e. how many threads produced that entity set at that depth.
    Transition edges are untouched.
    """
    if graph.star_expanded:
        raise ValueError("graph is already star-expanded")

    memberships: dict[tuple[GraphVertex, GraphVertex], dict[str, int]] = {}
    for v in graph.set_vertices:
        counts = graph.occurrence.get(v, {})
        for entity_id in v.payload:
            memberships[(entity_vertex(entity_id, v.depth), v)] = dict(counts)

    return EntityGraph(
        labels=graph.labels,
        set_vertices=set(graph.set_vertices),
        transitions=dict(graph.transitions),
        occurrence=dict(graph.occurrence),
        memberships=memberships,
        star_expanded=True,
    )


class RewiredView:
    """Set-level edge view generalized through shared entities.

    The outgoing transitions of a (possibly unrecorded) source set at depth
    d are the union of recorded transitions leaving any set at depth d that
    shares at least one entity with it; each underlying edge contributes its
    weight once per source, however many entities are shared. Direct
    transitions are always a subset of this view.
    """

    def __init__(self, graph: EntityGraph):
        if not graph.star_expanded:
            raise ValueError("rewiring requires a star-expanded graph")
        self.graph = graph
        self._entities_at_depth = {
            (entity_id, v.depth) for v in graph.set_vertices for entity_id in v.payload
        }
        self._sources_by_entity: dict[tuple[str, int], list[GraphVertex]] = {}
        self._out_edges: dict[GraphVertex, list[tuple[GraphVertex, dict[str, int]]]] = {}
        for (src, dst), weights in graph.transitions.items():
            self._out_edges.setdefault(src, []).append((dst, weights))
        for src in self._out_edges:
            for entity_id in src.payload:
                self._sources_by_entity.setdefault((entity_id, src.depth), []).append(src)
        self._cache: dict[GraphVertex, dict[GraphVertex, dict[str, int]]] = {}

    def has_vertex(self, vertex: GraphVertex) -> bool:
        return vertex in self.graph.set_vertices

    def is_anchorable(self, vertex: GraphVertex) -> bool:
        """True when the view can place ``vertex``: recorded, or sharing at
        least one entity with a recorded set at the same depth."""
        if vertex in self.graph.set_vertices:
            return True
        return any((e, vertex.depth) in self._entities_at_depth for e in vertex.payload)

    def successors(self, vertex: GraphVertex) -> dict[GraphVertex, dict[str, int]]:
        """Per-label weights of the view edges leaving ``vertex``.

        ``vertex`` may be any set vertex, recorded or not; generalization
        happens on the source side only.
        """
        if vertex.kind != "set":
            raise ValueError("rewired view is defined over set vertices")
        cached = self._cache.get(vertex)
        if cached is not None:
            return cached

        sources: set[GraphVertex] = set()
        for entity_id in vertex.payload:
            sources.update(self._sources_by_entity.get((entity_id, vertex.depth), []))

        acc: dict[GraphVertex, dict[str, int]] = {}
        for src in sources:
            for dst, weights in self._out_edges[src]:
                out = acc.setdefault(dst, {})
                for lbl, w in weights.items():
                    out[lbl] = out.get(lbl, 0) + w
        self._cache[vertex] = acc
        return acc

    def out_total(self, vertex: GraphVertex, label: str | None = None) -> int:
        total = 0
        for weights in self.successors(vertex).values():
            if label is None:
                total += sum(weights.values())
            else:
                total += weights.get(label, 0)
        return total

    def edges(self):
        """Materialized view edges over the graph's own set vertices.

        Yields (src, dst, per-label weights) deterministically sorted.
        """
        for src in sorted(self.graph.set_vertices, key=GraphVertex.sort_key):
            for dst in sorted(self.successors(src), key=GraphVertex.sort_key):
                yield src, dst, self.successors(src)[dst]


def rewire_set_level(graph: EntityGraph) -> RewiredView:
    """Entry point matching the construction pipeline; see RewiredView."""
    return graph.rewired()


def merge_corpora(a: EntityGraph, b: EntityGraph) -> EntityGraph:
    """Blend two single- or multi-corpus graphs into one with per-label weights."""
    shared = set(a.labels) & set(b.labels)
    if shared:
        raise ValueError(f"corpus label collision: {sorted(shared)}")
    if a.star_expanded != b.star_expanded:
        raise ValueError("cannot merge graphs with different expansion states")

    def merge_weight_maps(left, right):
        merged = {k: dict(v) for k, v in left.items()}
        for key, weights in right.items():
            out = merged.setdefault(key, {})
            for lbl, w in weights.items():
                out[lbl] = out.get(lbl, 0) + w
        return merged

    return EntityGraph(
        labels=a.labels + b.labels,
        set_vertices=a.set_vertices | b.set_vertices,
        transitions=merge_weight_maps(a.transitions, b.transitions),
        occurrence=merge_weight_maps(a.occurrence, b.occurrence),
        memberships=merge_weight_maps(a.memberships, b.memberships),
        star_expanded=a.star_expanded,
    )
