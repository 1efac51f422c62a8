from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import make_path  # noqa: E402

from convograph.graph import build_graph, star_expand  # noqa: E402
from convograph.ingest import parse_dump  # noqa: E402


def canonical_line(thread_id: str, comments: list[tuple]) -> str:
    """(id, parent_id, author) triples -> one canonical-json line."""
    return json.dumps(
        {
            "thread_id": thread_id,
            "comments": [
                {"id": cid, "parent_id": parent, "author": author, "text": "", "created_at": 0}
                for cid, parent, author in comments
            ],
        }
    )


@pytest.fixture
def fig_tree_thread():
    """Root with two children, the first child having two children."""
    line = canonical_line(
        "t1",
        [
            ("c0", None, "alice"),
            ("c1", "c0", "bob"),
            ("c2", "c0", "carol"),
            ("c3", "c1", "dan"),
            ("c4", "c1", "erin"),
        ],
    )
    return parse_dump([line], "canonical-json").threads[0]


@pytest.fixture
def chain_graph():
    """Four singleton sets in a row; every rewired edge has weight 1."""
    path = make_path([["A"], ["B"], ["C"], ["D"]])
    return star_expand(build_graph({"t0": [path]}, "main"))


@pytest.fixture
def convergent_graph():
    """Ten threads over two depth-1 parents that both lead to one child.

    Out-normalized transition probabilities: root splits 0.5/0.5; each
    parent sends 0.4 to the shared child and 0.6 to its own side branch.
    """
    paths = {}
    tid = 0
    for parent, child, count in [
        ("P1", "C", 2),
        ("P1", "X", 3),
        ("P2", "C", 2),
        ("P2", "Y", 3),
    ]:
        for _ in range(count):
            paths[f"t{tid}"] = [make_path([["R"], [parent], [child]])]
            tid += 1
    return star_expand(build_graph(paths, "main"))
