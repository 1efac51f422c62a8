"""Threaded-conversation dump parsing and corpus-level filters.

Two line-delimited input formats are supported:

* ``reddit-jsonl``: one Reddit record per line. Posts are recognized by an
  absent or self-referencing parent; comments carry ``parent_id`` and
  ``link_id``. The ``t1_``/``t3_`` id prefixes are stripped.
* ``canonical-json``: one thread per line,
  ``{"thread_id": ..., "comments": [{id, parent_id, author, text, created_at}]}``
  with ``parent_id`` null on the root.

Parsing is order-insensitive: records are grouped by thread id and each
tree is assembled from sorted ids, so any permutation of the input lines
yields an identical corpus.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

FORMATS = ("reddit-jsonl", "canonical-json")


class EmptyCorpusError(ValueError):
    """Raised when a dump yields no valid thread."""


@dataclass(frozen=True)
class Comment:
    id: str
    parent_id: str | None
    thread_id: str
    author: str
    text: str
    created_at: int
    is_root: bool = False


@dataclass(frozen=True)
class Thread:
    """One conversation tree. ``comments`` holds every retained comment
    (root included) sorted by id; ``orphans`` are records whose parent
    chain never reaches the root, excluded from the tree."""

    root: Comment
    comments: tuple[Comment, ...]
    depth_of: dict[str, int]
    orphans: tuple[Comment, ...] = ()

    @property
    def thread_id(self) -> str:
        return self.root.thread_id

    @property
    def reply_count(self) -> int:
        """Number of comments under the root post."""
        return len(self.comments) - 1

    def children_of(self, comment_id: str) -> list[Comment]:
        return [c for c in self.comments if c.parent_id == comment_id]


@dataclass
class IngestStats:
    malformed_records: int = 0
    orphan_comments: int = 0
    rootless_threads: int = 0


@dataclass(frozen=True)
class Corpus:
    label: str
    threads: tuple[Thread, ...]
    stats: IngestStats = field(default_factory=IngestStats, compare=False)

    def __len__(self) -> int:
        return len(self.threads)

    def thread_ids(self) -> list[str]:
        return [t.thread_id for t in self.threads]


def _strip_prefix(raw_id: str) -> str:
    if raw_id[:3] in ("t1_", "t3_"):
        return raw_id[3:]
    return raw_id


def _reddit_record(record: dict) -> tuple[str, Comment]:
    """Normalize one reddit-jsonl record to (thread_id, Comment)."""
    raw_id = record["id"]
    if not isinstance(raw_id, str) or not raw_id:
        raise ValueError("missing id")
    cid = _strip_prefix(raw_id)

    raw_parent = record.get("parent_id")
    parent = _strip_prefix(raw_parent) if isinstance(raw_parent, str) and raw_parent else None
    is_root = parent is None or parent == cid

    raw_link = record.get("link_id")
    if isinstance(raw_link, str) and raw_link:
        thread_id = _strip_prefix(raw_link)
    elif is_root:
        thread_id = cid
    else:
        raise ValueError("comment without link_id")

    if "title" in record:
        text = record["title"]
    elif "body" in record:
        text = record["body"]
    else:
        raise ValueError("record has neither title nor body")
    if not isinstance(text, str):
        raise ValueError("text field is not a string")

    created = record.get("created_utc", record.get("created_at", 0))
    return thread_id, Comment(
        id=cid,
        parent_id=None if is_root else parent,
        thread_id=thread_id,
        author=str(record.get("author") or ""),
        text=text,
        created_at=int(float(created)),
        is_root=is_root,
    )


def _canonical_record(record: dict) -> list[tuple[str, Comment]]:
    thread_id = record["thread_id"]
    if not isinstance(thread_id, str) or not thread_id:
        raise ValueError("missing thread_id")
    out = []
    for entry in record["comments"]:
        cid = entry["id"]
        if not isinstance(cid, str) or not cid:
            raise ValueError("missing comment id")
        parent = entry.get("parent_id")
        if parent is not None and not isinstance(parent, str):
            raise ValueError("bad parent_id")
        text = entry.get("text", "")
        if not isinstance(text, str):
            raise ValueError("text field is not a string")
        out.append(
            (
                thread_id,
                Comment(
                    id=cid,
                    parent_id=parent,
                    thread_id=thread_id,
                    author=str(entry.get("author") or ""),
                    text=text,
                    created_at=int(entry.get("created_at", 0)),
                    is_root=parent is None,
                ),
            )
        )
    return out


def _assemble_thread(comments: list[Comment], stats: IngestStats) -> Thread | None:
    """Build one tree from grouped records; unreachable comments become orphans."""
    by_id: dict[str, Comment] = {}
    for comment in sorted(comments, key=lambda c: c.id):
        if comment.id in by_id:
            stats.malformed_records += 1  # duplicate id within thread
            continue
        by_id[comment.id] = comment

    roots = sorted(c.id for c in by_id.values() if c.parent_id is None)
    if not roots:
        stats.rootless_threads += 1
        return None
    root_id = roots[0]
    for extra in roots[1:]:
        # a thread has exactly one root; later parent-less records are malformed
        stats.malformed_records += 1
        del by_id[extra]
    root = by_id[root_id]

    children: dict[str, list[str]] = {}
    for comment in by_id.values():
        if comment.parent_id is not None:
            children.setdefault(comment.parent_id, []).append(comment.id)

    depth_of: dict[str, int] = {root_id: 0}
    order = [root_id]
    queue = deque([root_id])
    while queue:
        current = queue.popleft()
        for child_id in sorted(children.get(current, [])):
            depth_of[child_id] = depth_of[current] + 1
            order.append(child_id)
            queue.append(child_id)

    orphans = tuple(by_id[cid] for cid in sorted(by_id) if cid not in depth_of)
    stats.orphan_comments += len(orphans)
    retained = tuple(by_id[cid] for cid in sorted(depth_of))
    return Thread(root=root, comments=retained, depth_of=depth_of, orphans=orphans)


def parse_dump(stream, format: str, label: str = "") -> Corpus:
    """Parse a line-delimited dump into a validated Corpus.

    Malformed records are skipped and counted in ``Corpus.stats``; replies
    whose parent never appears go to the per-thread orphan list. Raises
    EmptyCorpusError when no valid thread survives.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown dump format: {format!r}")

    stats = IngestStats()
    grouped: dict[str, list[Comment]] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record is not an object")
            if format == "reddit-jsonl":
                pairs = [_reddit_record(record)]
            else:
                pairs = _canonical_record(record)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            stats.malformed_records += 1
            log.warning("skipping malformed record at line %d: %s", lineno, exc)
            continue
        for thread_id, comment in pairs:
            grouped.setdefault(thread_id, []).append(comment)

    threads = []
    for thread_id in sorted(grouped):
        thread = _assemble_thread(grouped[thread_id], stats)
        if thread is not None:
            threads.append(thread)

    if not threads:
        raise EmptyCorpusError("dump produced zero valid threads")
    return Corpus(label=label, threads=tuple(threads), stats=stats)


def filter_top_fraction(corpus: Corpus, fraction: float) -> Corpus:
    """Keep the ceil(fraction * N) threads with the most comments.

    Ties break by ascending thread id so the result is deterministic.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if not corpus.threads:
        raise ValueError("cannot filter an empty corpus")

    keep = math.ceil(fraction * len(corpus.threads))
    ranked = sorted(corpus.threads, key=lambda t: (-t.reply_count, t.thread_id))
    kept = sorted(ranked[:keep], key=lambda t: t.thread_id)
    return Corpus(label=corpus.label, threads=tuple(kept), stats=corpus.stats)


def _prune_thread(thread: Thread, botlist) -> Thread | None:
    """Drop bot comments along with their whole subtrees."""
    if thread.root.author in botlist:
        return None

    children: dict[str, list[str]] = {}
    by_id = {c.id: c for c in thread.comments}
    for comment in thread.comments:
        if comment.parent_id is not None:
            children.setdefault(comment.parent_id, []).append(comment.id)

    depth_of: dict[str, int] = {thread.root.id: 0}
    queue = deque([thread.root.id])
    while queue:
        current = queue.popleft()
        for child_id in sorted(children.get(current, [])):
            if by_id[child_id].author in botlist:
                continue
            depth_of[child_id] = depth_of[current] + 1
            queue.append(child_id)

    retained = tuple(by_id[cid] for cid in sorted(depth_of))
    return Thread(root=thread.root, comments=retained, depth_of=depth_of, orphans=thread.orphans)


def filter_bots(corpus: Corpus, botlist) -> Corpus:
    """Remove comments by known bots; a removed comment takes its replies with it."""
    botlist = set(botlist)
    if not botlist:
        return corpus
    threads = []
    for thread in corpus.threads:
        pruned = _prune_thread(thread, botlist)
        if pruned is not None:
            threads.append(pruned)
    return Corpus(label=corpus.label, threads=tuple(threads), stats=corpus.stats)


def load_botlist(stream) -> set[str]:
    """Newline-delimited author names; blank lines ignored."""
    return {line.strip() for line in stream if line.strip()}


def dump_canonical(corpus: Corpus) -> str:
    """Serialize to canonical-json lines, one thread each.

    Round-trips through parse_dump; orphan records are not written since
    they never belong to a tree.
    """
    lines = []
    for thread in corpus.threads:
        comments = [
            {
                "id": c.id,
                "parent_id": c.parent_id,
                "author": c.author,
                "text": c.text,
                "created_at": c.created_at,
            }
            for c in thread.comments
        ]
        record = {"thread_id": thread.thread_id, "comments": comments}
        lines.append(json.dumps(record, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"
