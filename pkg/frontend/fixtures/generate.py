"""Regenerate the viewer test fixtures.

Each fixture is a full exported bundle with an embedded activation block;
the viewer test suite re-runs the spread client-side from the recorded
parameters and demands matching numbers. Run from the repo root after
installing the Python package:

    python3 frontend/fixtures/generate.py
"""

from __future__ import annotations

from pathlib import Path

from convograph.activation import ActivationParams, spread
from convograph.export import bundle_to_json, export_bundle
from convograph.graph import (
    ConversationPath,
    EntityGraph,
    build_graph,
    merge_corpora,
    parse_vertex_id,
    paths_by_thread,
    set_vertex,
    star_expand,
)
from convograph.ingest import Corpus, filter_bots, filter_top_fraction, load_botlist, parse_dump
from convograph.layout import LayoutConfig, compute_layout
from convograph.linking import EntitySet, Gazetteer, link_text, to_entity_set

HERE = Path(__file__).resolve().parent
DATA = HERE.parent.parent / "demos" / "data"


def path(*sets: list[str]) -> ConversationPath:
    return ConversationPath(steps=tuple((EntitySet.of(s), d) for d, s in enumerate(sets)))


def write(name: str, graph, params: ActivationParams, source_id: str, label=None) -> None:
    layout = compute_layout(graph, LayoutConfig(iterations_per_depth=20, seed=0))
    state = spread(graph, parse_vertex_id(source_id), params, label=label)
    bundle = export_bundle(graph, layout, activation=state)
    (HERE / name).write_text(bundle_to_json(bundle))
    print(
        f"{name}: {len(bundle['nodes'])} nodes, {len(bundle['links'])} links, "
        f"{len(bundle['activation']['activations'])} activated"
    )


def community_graph(corpus: Corpus, prefix: str, gaz: Gazetteer):
    threads = [t for t in corpus.threads if t.thread_id.startswith(prefix)]
    sub = Corpus(label=prefix, threads=tuple(threads), stats=corpus.stats)
    entity_sets = {
        c.id: s
        for t in sub.threads
        for c in t.comments
        if (s := to_entity_set(link_text(c.text, gaz))).entities
    }
    return build_graph(paths_by_thread(sub, entity_sets, min_len=3), prefix)


def main() -> None:
    chain = star_expand(
        build_graph({"t0": [path(["A"], ["B"], ["C"], ["D"])]}, "chain")
    )
    write("chain.json", chain, ActivationParams(firing_threshold=0.3, decay=0.5), "s0:A")

    paths = {f"t{i}": [path(["R"], ["P1"], ["C"])] for i in range(5)}
    paths |= {f"u{i}": [path(["R"], ["P2"], ["C"])] for i in range(5)}
    convergent = star_expand(build_graph(paths, "convergent"))
    write(
        "convergent.json", convergent, ActivationParams(firing_threshold=0.3, decay=0.8), "s0:R"
    )

    # one recorded set and nothing else; paths cannot express this
    lone = set_vertex(EntitySet.of(["A"]), 0)
    single = star_expand(
        EntityGraph(
            labels=("single",),
            set_vertices={lone},
            transitions={},
            occurrence={lone: {"single": 1}},
        )
    )
    write("single.json", single, ActivationParams(), "s0:A")

    lines = (DATA / "sample_dump.jsonl").read_text().splitlines()
    corpus = parse_dump(lines, "reddit-jsonl", label="sample")
    corpus = filter_bots(corpus, load_botlist((DATA / "bots.txt").read_text().splitlines()))
    corpus = filter_top_fraction(corpus, 0.2)
    gaz = Gazetteer.from_tsv((DATA / "gazetteer.tsv").read_text().splitlines())
    merged = star_expand(
        merge_corpora(community_graph(corpus, "a", gaz), community_graph(corpus, "b", gaz))
    )
    write(
        "dual.json", merged, ActivationParams(firing_threshold=0.05, decay=0.5), "s0:Donald_Trump"
    )
    write(
        "dualmax.json",
        merged,
        ActivationParams(firing_threshold=0.02, decay=0.9, weight_normalization="global-max"),
        "s0:Donald_Trump",
        label="a",
    )


if __name__ == "__main__":
    main()
