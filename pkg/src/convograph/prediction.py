"""Cross-validated prediction experiments over entity graphs.

Two questions are answered per corpus: how well do entity sets seen in
training cover those appearing in held-out threads at each depth, and how
close (in embedding space) is a Markov next-set prediction to the set that
actually followed. Distances use exact optimal transport between uniform
distributions over set members; sets are small, so a direct LP solve is
cheap and reproducible.
"""

from __future__ import annotations

import io
import json
import logging
import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .graph import (
    ConversationPath,
    EntityGraph,
    GraphVertex,
    RewiredView,
    build_graph,
    star_expand,
)
from .ingest import Corpus
from .linking import EmbeddingTable, EntitySet

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FoldSplit:
    """One train/test partition of a corpus by thread id."""

    fold: int
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]


def kfold_split(corpus: Corpus, k: int = 5, seed: int = 0) -> list[FoldSplit]:
    """Seeded shuffle of thread ids, then contiguous partition into k folds.

    Fold f's test set is the f-th slice; remainder threads go to the
    earliest folds, so test sizes differ by at most one.
    """
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    ids = sorted(t.thread_id for t in corpus.threads)
    if len(ids) < k:
        raise ValueError(f"{len(ids)} threads cannot fill {k} folds")

    rng = random.Random(seed)
    rng.shuffle(ids)

    base, rem = divmod(len(ids), k)
    folds: list[FoldSplit] = []
    start = 0
    for f in range(k):
        size = base + (1 if f < rem else 0)
        test = ids[start : start + size]
        train = ids[:start] + ids[start + size :]
        folds.append(
            FoldSplit(fold=f, train_ids=tuple(sorted(train)), test_ids=tuple(sorted(test)))
        )
        start += size
    return folds


# -- generalization ------------------------------------------------------


@dataclass(frozen=True)
class DepthCoverage:
    """One fold's coverage at one depth.

    ``overlap`` counts a test set covered when it shares at least one
    entity with some training set at the same depth; ``exact`` requires
    the identical entity set.
    """

    overlap: float
    exact: float
    n_test: int


def generalization(train: EntityGraph, test: EntityGraph) -> dict[int, DepthCoverage]:
    """Per-depth coverage of the test graph's distinct set vertices.

    Depths with no test vertices are omitted.
    """
    if not train.star_expanded or not test.star_expanded:
        raise ValueError("generalization expects star-expanded graphs")

    train_sets: dict[int, set[EntitySet]] = {}
    train_entities: dict[int, set[str]] = {}
    for v in train.set_vertices:
        train_sets.setdefault(v.depth, set()).add(v.payload)
        train_entities.setdefault(v.depth, set()).update(v.payload)

    by_depth: dict[int, list[GraphVertex]] = {}
    for v in test.set_vertices:
        by_depth.setdefault(v.depth, []).append(v)

    out: dict[int, DepthCoverage] = {}
    for depth in sorted(by_depth):
        vertices = by_depth[depth]
        known = train_entities.get(depth, set())
        exact_pool = train_sets.get(depth, set())
        covered = sum(1 for v in vertices if any(e in known for e in v.payload))
        exact = sum(1 for v in vertices if v.payload in exact_pool)
        n = len(vertices)
        out[depth] = DepthCoverage(overlap=covered / n, exact=exact / n, n_test=n)
    return out


@dataclass(frozen=True)
class GeneralizationRow:
    depth: int
    mean: float
    ci: float
    folds: tuple[float, ...]
    exact_mean: float
    exact_ci: float
    exact_folds: tuple[float, ...]


def _mean_ci(values: Sequence[float]) -> tuple[float, float]:
    # 95% normal interval over fold means; a single fold has no spread.
    arr = np.asarray(values, dtype=np.float64)
    if arr.size <= 1:
        return float(arr.mean()), 0.0
    half = 1.96 * arr.std(ddof=1) / np.sqrt(arr.size)
    return float(arr.mean()), float(half)


@dataclass(frozen=True)
class GeneralizationReport:
    """Fold-aggregated coverage per depth with 95% confidence half-widths."""

    k: int
    label: str
    rows: tuple[GeneralizationRow, ...]

    def row(self, depth: int) -> GeneralizationRow:
        for r in self.rows:
            if r.depth == depth:
                return r
        raise KeyError(depth)

    def to_dict(self) -> dict:
        return {
            "version": REPORT_SCHEMA_VERSION,
            "kind": "generalization-report",
            "k": self.k,
            "label": self.label,
            "rows": [
                {
                    "depth": r.depth,
                    "mean": r.mean,
                    "ci": r.ci,
                    "folds": list(r.folds),
                    "exact_mean": r.exact_mean,
                    "exact_ci": r.exact_ci,
                    "exact_folds": list(r.exact_folds),
                }
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("depth,mean,ci\n")
        for r in self.rows:
            buf.write(f"{r.depth},{r.mean!r},{r.ci!r}\n")
        return buf.getvalue()


def generalization_report(
    per_fold: Sequence[Mapping[int, DepthCoverage]], label: str = ""
) -> GeneralizationReport:
    """Aggregate per-fold coverage; a depth is reported when any fold saw it."""
    depths = sorted({d for fold in per_fold for d in fold})
    rows = []
    for depth in depths:
        overlap = [fold[depth].overlap for fold in per_fold if depth in fold]
        exact = [fold[depth].exact for fold in per_fold if depth in fold]
        mean, ci = _mean_ci(overlap)
        e_mean, e_ci = _mean_ci(exact)
        rows.append(
            GeneralizationRow(
                depth=depth,
                mean=mean,
                ci=ci,
                folds=tuple(overlap),
                exact_mean=e_mean,
                exact_ci=e_ci,
                exact_folds=tuple(exact),
            )
        )
    return GeneralizationReport(k=len(per_fold), label=label, rows=tuple(rows))


def generalization_over_folds(
    folds: Sequence[FoldSplit],
    corpus_paths: Mapping[str, list[ConversationPath]],
    label: str,
) -> GeneralizationReport:
    """Build train/test graphs per fold and aggregate their coverage."""
    per_fold = []
    for fold in folds:
        train = star_expand(_graph_for(fold.train_ids, corpus_paths, label))
        test = star_expand(_graph_for(fold.test_ids, corpus_paths, label))
        per_fold.append(generalization(train, test))
        log.debug("fold %d: %d depths evaluated", fold.fold, len(per_fold[-1]))
    return generalization_report(per_fold, label=label)


def _graph_for(
    thread_ids: Sequence[str],
    corpus_paths: Mapping[str, list[ConversationPath]],
    label: str,
) -> EntityGraph:
    subset = {tid: corpus_paths[tid] for tid in thread_ids if tid in corpus_paths}
    return build_graph(subset, label)


# -- Markov next-set prediction ------------------------------------------


@dataclass(frozen=True)
class NextDistribution:
    """Distribution over depth+1 set vertices; empty support is a dead end."""

    source: GraphVertex
    label: str | None
    support: tuple[tuple[GraphVertex, float], ...]

    @property
    def dead_end(self) -> bool:
        return not self.support

    def probability(self, vertex: GraphVertex) -> float:
        for v, p in self.support:
            if v == vertex:
                return p
        return 0.0

    def argmax(self) -> GraphVertex:
        """Most probable successor; ties go to the smallest entity set."""
        if self.dead_end:
            raise ValueError("dead end has no argmax")
        best = max(p for _, p in self.support)
        ties = [v for v, p in self.support if p == best]
        return min(ties, key=GraphVertex.sort_key)


def predict_next(
    train: EntityGraph | RewiredView,
    current: GraphVertex,
    label: str | None = None,
) -> NextDistribution:
    """Normalized outgoing transition weights of ``current`` in the rewired
    set-level view, restricted to ``label`` when given.

    ``current`` may be unrecorded as long as it shares an entity with some
    training set at its depth.
    """
    view = train.rewired() if isinstance(train, EntityGraph) else train
    if current.kind != "set":
        raise ValueError("prediction starts from a set vertex")
    if not view.is_anchorable(current):
        raise ValueError(f"vertex {current.vertex_id} is unknown to the training graph")

    weighted: list[tuple[GraphVertex, int]] = []
    for dst, weights in view.successors(current).items():
        w = sum(weights.values()) if label is None else weights.get(label, 0)
        if w > 0:
            weighted.append((dst, w))
    if not weighted:
        return NextDistribution(source=current, label=label, support=())

    total = sum(w for _, w in weighted)
    weighted.sort(key=lambda item: item[0].sort_key())
    support = tuple((dst, w / total) for dst, w in weighted)
    return NextDistribution(source=current, label=label, support=support)


# -- optimal-transport distance ------------------------------------------


def wmd(a: EntitySet, b: EntitySet, emb: EmbeddingTable) -> float:
    """Exact earth-mover cost between uniform distributions over two entity
    sets, with Euclidean ground distance between embeddings.

    Entities without embeddings are dropped first; an empty side after that
    restriction is an error (callers skip and count such samples).
    """
    ra = a.restrict(emb.vectors)
    rb = b.restrict(emb.vectors)
    if not ra or not rb:
        raise ValueError("entity set has no embedded members")
    if ra == rb:
        return 0.0
    # Canonical argument order makes wmd(a, b) bit-identical to wmd(b, a).
    lo, hi = sorted((ra, rb))
    return _transport_cost(lo, hi, emb)


def _transport_cost(a: EntitySet, b: EntitySet, emb: EmbeddingTable) -> float:
    xs = np.stack([emb[e] for e in a])
    ys = np.stack([emb[e] for e in b])
    cost = np.linalg.norm(xs[:, None, :] - ys[None, :, :], axis=2)

    m, n = cost.shape
    a_eq = np.zeros((m + n, m * n))
    for i in range(m):
        a_eq[i, i * n : (i + 1) * n] = 1.0
    for j in range(n):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([np.full(m, 1.0 / m), np.full(n, 1.0 / n)])

    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport solve failed: {res.message}")
    return max(float(res.fun), 0.0)


# -- evaluation walk -------------------------------------------------------


@dataclass(frozen=True)
class WmdRow:
    depth: int
    samples: tuple[float, ...]
    median: float
    q1: float
    q3: float
    lo: float
    hi: float

    @property
    def n(self) -> int:
        return len(self.samples)


def _box_row(depth: int, samples: Sequence[float]) -> WmdRow:
    s = np.sort(np.asarray(samples, dtype=np.float64))
    q1, med, q3 = (float(q) for q in np.percentile(s, [25, 50, 75]))
    iqr = q3 - q1
    lo = max(float(s[0]), q1 - 1.5 * iqr)
    hi = min(float(s[-1]), q3 + 1.5 * iqr)
    return WmdRow(
        depth=depth, samples=tuple(float(x) for x in s), median=med, q1=q1, q3=q3, lo=lo, hi=hi
    )


@dataclass(frozen=True)
class WmdReport:
    """Per-depth transport-distance samples with box statistics.

    ``depth`` is the depth of the predicted vertex, so a step from the root
    lands in the depth-1 row. ``skipped`` counts unscored situations:
    test paths whose root never occurs in training, dead-end steps, steps
    without embedded entities, and walks that lost their anchor.
    """

    label: str
    rows: tuple[WmdRow, ...]
    skipped: Mapping[str, int]

    def row(self, depth: int) -> WmdRow:
        for r in self.rows:
            if r.depth == depth:
                return r
        raise KeyError(depth)

    def to_dict(self) -> dict:
        return {
            "version": REPORT_SCHEMA_VERSION,
            "kind": "wmd-report",
            "label": self.label,
            "rows": [
                {
                    "depth": r.depth,
                    "n": r.n,
                    "median": r.median,
                    "q1": r.q1,
                    "q3": r.q3,
                    "lo": r.lo,
                    "hi": r.hi,
                    "samples": list(r.samples),
                }
                for r in self.rows
            ],
            "skipped": dict(sorted(self.skipped.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("depth,median,q1,q3,lo,hi\n")
        for r in self.rows:
            buf.write(f"{r.depth},{r.median!r},{r.q1!r},{r.q3!r},{r.lo!r},{r.hi!r}\n")
        return buf.getvalue()


def evaluate_prediction(
    folds: Sequence[FoldSplit],
    corpus_paths: Mapping[str, list[ConversationPath]],
    emb: EmbeddingTable,
    label: str,
) -> WmdReport:
    """Teacher-forced Markov walk over every admissible test path.

    Per fold: a path is admissible when its root set occurs verbatim in
    training. At each step the argmax next-set prediction is scored against
    the set that actually followed, then the walk re-anchors on the actual
    vertex: verbatim if training recorded it, through shared entities
    otherwise, stopping when neither applies. Dead ends and unembeddable
    comparisons skip the sample but not the walk.
    """
    samples: dict[int, list[float]] = {}
    skipped = {"unmatched_root": 0, "dead_end": 0, "unembedded": 0, "lost_anchor": 0}

    for fold in folds:
        train = star_expand(_graph_for(fold.train_ids, corpus_paths, label))
        view = train.rewired()
        n_scored = 0
        for tid in fold.test_ids:
            for path in corpus_paths.get(tid, []):
                vertices = path.vertices()
                if vertices[0] not in train.set_vertices:
                    skipped["unmatched_root"] += 1
                    continue
                current = vertices[0]
                for actual in vertices[1:]:
                    dist = predict_next(view, current, label)
                    if dist.dead_end:
                        skipped["dead_end"] += 1
                    else:
                        predicted = dist.argmax()
                        if _embeddable(predicted.payload, emb) and _embeddable(
                            actual.payload, emb
                        ):
                            d = wmd(predicted.payload, actual.payload, emb)
                            samples.setdefault(actual.depth, []).append(d)
                            n_scored += 1
                        else:
                            skipped["unembedded"] += 1
                    if view.is_anchorable(actual):
                        current = actual
                    else:
                        skipped["lost_anchor"] += 1
                        break
        log.debug("fold %d: %d scored steps", fold.fold, n_scored)

    rows = tuple(_box_row(depth, samples[depth]) for depth in sorted(samples))
    return WmdReport(label=label, rows=rows, skipped=skipped)


def _embeddable(entities: EntitySet, emb: EmbeddingTable) -> bool:
    return bool(entities.restrict(emb.vectors))
