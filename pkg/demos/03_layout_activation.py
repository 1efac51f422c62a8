"""Lay the sample graph out and spread activation from one topic.

The layout pins x to depth columns and relaxes y only, locking columns
left to right, so depth structure reads horizontally and related sets
settle near each other vertically. Activation then starts at the Trump
root with a permissive firing threshold and decays per hop; the printed
radii are what the viewer would draw.
"""

from __future__ import annotations

from pathlib import Path

from convograph.activation import ActivationParams, activation_subgraph, spread
from convograph.graph import build_graph, parse_vertex_id, paths_by_thread, star_expand
from convograph.ingest import filter_bots, filter_top_fraction, load_botlist, parse_dump
from convograph.layout import LayoutConfig, compute_layout
from convograph.linking import Gazetteer, link_text, to_entity_set

DATA = Path(__file__).resolve().parent / "data"


def main() -> None:
    lines = (DATA / "sample_dump.jsonl").read_text().splitlines()
    corpus = parse_dump(lines, "reddit-jsonl", label="sample")
    corpus = filter_bots(corpus, load_botlist((DATA / "bots.txt").read_text().splitlines()))
    corpus = filter_top_fraction(corpus, 0.2)
    gaz = Gazetteer.from_tsv((DATA / "gazetteer.tsv").read_text().splitlines())
    entity_sets = {
        c.id: s
        for t in corpus.threads
        for c in t.comments
        if (s := to_entity_set(link_text(c.text, gaz))).entities
    }
    graph = star_expand(build_graph(paths_by_thread(corpus, entity_sets, min_len=3), "sample"))

    layout = compute_layout(graph, LayoutConfig(seed=0))
    xs = sorted({x for x, _ in layout.positions.values()})
    print(f"layout: {len(layout.positions)} vertices in {len(xs)} columns at x={xs}")

    source = parse_vertex_id("s0:Donald_Trump")
    params = ActivationParams(firing_threshold=0.05, decay=0.5)
    state = spread(graph, source, params)
    sub = activation_subgraph(state, min_radius=4.0, max_radius=16.0)
    print(f"\nactivation from {source.vertex_id} (F={params.firing_threshold}, "
          f"D={params.decay}): {len(state.activation)} reached, {len(state.fired)} fired")
    ranked = sorted(
        state.activation.items(), key=lambda kv: (-kv[1], kv[0].sort_key())
    )
    for vertex, a in ranked[:10]:
        mark = "*" if vertex in state.fired else " "
        print(f"  {mark} {vertex.vertex_id:<40} A={a:.4f} r={sub.radius[vertex]:.1f}px")


if __name__ == "__main__":
    main()
