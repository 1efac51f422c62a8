"""Gazetteer entity linking, pre-linked annotation loading, and entity embeddings.

Comments are mapped to sets of knowledge-base entity identifiers
(underscored page names such as ``Donald_Trump``). Two sources are
supported: a deterministic longest-match gazetteer linker, and an
adapter for annotations produced by any external linker.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def is_valid_entity_id(entity_id: str) -> bool:
    """Entity ids are non-empty underscored strings with no whitespace.

    ``|`` is reserved as the member separator in serialized vertex ids.
    """
    return (
        bool(entity_id)
        and "|" not in entity_id
        and not any(ch.isspace() for ch in entity_id)
    )


@dataclass(frozen=True, order=True)
class EntitySet:
    """Deduplicated, lexicographically sorted set of entity ids.

    Stored as a tuple so instances are hashable and totally ordered;
    equality is set equality because the stored form is canonical.
    """

    entities: tuple[str, ...]

    @classmethod
    def of(cls, ids) -> "EntitySet":
        members = sorted(set(ids))
        for entity_id in members:
            if not is_valid_entity_id(entity_id):
                raise ValueError(f"invalid entity id: {entity_id!r}")
        return cls(tuple(members))

    def __iter__(self):
        return iter(self.entities)

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, entity_id) -> bool:
        return entity_id in self.entities

    def __bool__(self) -> bool:
        return bool(self.entities)

    def restrict(self, allowed) -> "EntitySet":
        """Subset containing only members present in ``allowed``."""
        return EntitySet(tuple(e for e in self.entities if e in allowed))


EMPTY_ENTITY_SET = EntitySet(())


@dataclass(frozen=True)
class Mention:
    """One linked span of comment text.

    ``start``/``end`` are character offsets into the comment text;
    ``surface`` always equals ``text[start:end]``.
    """

    start: int
    end: int
    surface: str
    entity: str
    confidence: float


class Gazetteer:
    """Surface-form lookup table: case-folded surface -> candidate entities.

    Candidates per surface are held sorted by descending prior, ties by
    entity id, so lookups are deterministic. Priors for one surface must
    sum to at most 1.
    """

    def __init__(self, entries: dict[str, list[tuple[str, float]]]):
        self._by_tokens: dict[tuple[str, ...], list[tuple[str, float]]] = {}
        self.max_tokens = 0
        for surface, candidates in entries.items():
            if not surface.strip():
                raise ValueError("gazetteer surface forms must be non-empty")
            total = sum(prior for _, prior in candidates)
            if total > 1.0 + 1e-9:
                raise ValueError(
                    f"priors for surface {surface!r} sum to {total:.4f} > 1"
                )
            for entity_id, prior in candidates:
                if not is_valid_entity_id(entity_id):
                    raise ValueError(f"invalid entity id: {entity_id!r}")
                if not 0.0 <= prior <= 1.0:
                    raise ValueError(f"prior out of range for {surface!r}: {prior}")
            tokens = tuple(surface.casefold().split())
            ranked = sorted(candidates, key=lambda c: (-c[1], c[0]))
            self._by_tokens[tokens] = ranked
            self.max_tokens = max(self.max_tokens, len(tokens))

    def __len__(self) -> int:
        return len(self._by_tokens)

    def candidates(self, tokens: tuple[str, ...]) -> list[tuple[str, float]]:
        return self._by_tokens.get(tokens, [])

    @classmethod
    def from_tsv(cls, stream) -> "Gazetteer":
        """Parse ``surface<TAB>entity_id<TAB>prior`` lines."""
        entries: dict[str, list[tuple[str, float]]] = {}
        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"gazetteer line {lineno}: expected 3 tab-separated fields")
            surface, entity_id, prior_text = parts
            entries.setdefault(surface.casefold(), []).append(
                (entity_id, float(prior_text))
            )
        return cls(entries)


def link_text(text: str, gazetteer: Gazetteer, min_prior: float = 0.5) -> list[Mention]:
    """Greedy longest-match-first gazetteer linking.

    Scans the case-folded token sequence left to right; at each position the
    longest surface whose best prior clears ``min_prior`` wins, its tokens
    are consumed, and scanning resumes after the match. Returned mentions
    never overlap and appear in ascending offset order.
    """
    tokens = [(m.group(0).casefold(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
    mentions: list[Mention] = []
    i = 0
    while i < len(tokens):
        matched = False
        max_len = min(gazetteer.max_tokens, len(tokens) - i)
        for width in range(max_len, 0, -1):
            window = tuple(tok for tok, _, _ in tokens[i : i + width])
            candidates = gazetteer.candidates(window)
            if not candidates:
                continue
            entity_id, prior = candidates[0]
            if prior < min_prior:
                continue
            start = tokens[i][1]
            end = tokens[i + width - 1][2]
            mentions.append(
                Mention(
                    start=start,
                    end=end,
                    surface=text[start:end],
                    entity=entity_id,
                    confidence=prior,
                )
            )
            i += width
            matched = True
            break
        if not matched:
            i += 1
    return mentions


def to_entity_set(mentions) -> EntitySet:
    """Collapse mentions into the comment's deduplicated entity set."""
    return EntitySet.of(m.entity for m in mentions)


@dataclass
class PrelinkedAnnotations:
    """Result of loading an external linker's output."""

    by_comment: dict[str, EntitySet]
    skipped_records: int = 0
    unknown_ids: set[str] = field(default_factory=set)


def load_prelinked(stream, known_ids=None) -> PrelinkedAnnotations:
    """Load line-delimited ``{"comment_id": ..., "entities": [...]}`` records.

    Duplicate records for one comment id union their entity sets. Records
    with malformed entity ids are skipped and counted. When ``known_ids``
    is given, ids outside it are retained but reported in ``unknown_ids``.
    """
    merged: dict[str, set[str]] = {}
    skipped = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            comment_id = record["comment_id"]
            entities = record["entities"]
            if not isinstance(comment_id, str) or not isinstance(entities, list):
                raise ValueError("bad field types")
            if not all(isinstance(e, str) and is_valid_entity_id(e) for e in entities):
                raise ValueError("malformed entity id")
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            skipped += 1
            log.warning("skipping annotation line %d: %s", lineno, exc)
            continue
        merged.setdefault(comment_id, set()).update(entities)

    by_comment = {cid: EntitySet.of(ids) for cid, ids in merged.items()}
    unknown = set()
    if known_ids is not None:
        unknown = {cid for cid in by_comment if cid not in known_ids}
        if unknown:
            log.warning("%d annotated comment ids not found in corpus", len(unknown))
    return PrelinkedAnnotations(by_comment=by_comment, skipped_records=skipped, unknown_ids=unknown)


def dump_prelinked(by_comment: dict[str, EntitySet]) -> str:
    """Serialize per-comment entity sets as load_prelinked's line format.
    Comments with empty sets are skipped."""
    lines = []
    for cid in sorted(by_comment):
        entities = by_comment[cid]
        if not entities:
            continue
        record = {"comment_id": cid, "entities": list(entities.entities)}
        lines.append(json.dumps(record, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n" if lines else ""


class EmbeddingTable:
    """Entity id -> dense vector, all sharing one dimension."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray]):
        self.dimension = dimension
        self.vectors = vectors

    def __contains__(self, entity_id) -> bool:
        return entity_id in self.vectors

    def __getitem__(self, entity_id) -> np.ndarray:
        return self.vectors[entity_id]

    def __len__(self) -> int:
        return len(self.vectors)

    def missing(self, expected) -> set[str]:
        """Subset of ``expected`` ids that have no vector."""
        return {e for e in expected if e not in self.vectors}


def load_embeddings(stream, expected_ids=None) -> EmbeddingTable:
    """Parse ``entity_id v1 ... vd`` whitespace-delimited text lines.

    Raises on inconsistent dimensions or non-finite values. When
    ``expected_ids`` is given, ids lacking a vector are reported via a
    warning (and remain queryable through ``EmbeddingTable.missing``).
    """
    vectors: dict[str, np.ndarray] = {}
    dimension = None
    for lineno, raw in enumerate(stream, start=1):
        parts = raw.split()
        if not parts:
            continue
        entity_id = parts[0]
        values = [float(v) for v in parts[1:]]
        if not values:
            raise ValueError(f"embedding line {lineno}: no vector components")
        if dimension is None:
            dimension = len(values)
        elif len(values) != dimension:
            raise ValueError(
                f"embedding line {lineno}: dimension {len(values)} != {dimension}"
            )
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"embedding line {lineno}: non-finite component")
        vectors[entity_id] = np.asarray(values, dtype=np.float64)

    if dimension is None:
        raise ValueError("embedding file contains no vectors")
    table = EmbeddingTable(dimension, vectors)
    if expected_ids is not None:
        missing = table.missing(expected_ids)
        if missing:
            log.warning("%d expected entities have no embedding", len(missing))
    return table
