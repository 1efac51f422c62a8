"""Compare the two sample communities and export a viewer bundle.

Thread ids in the sample dump are prefixed a/b by community. Building one
labeled graph per community and merging them keeps per-label weights on
every edge, so the exported bundle carries a blend value: 1.0 means the
transition is proportionally all-a, 0.0 all-b. The bundle lands in
demos/out/bundle.json and can be dropped straight into the viewer.
"""

from __future__ import annotations

import json
from pathlib import Path

from convograph.activation import ActivationParams, spread
from convograph.export import bundle_to_json, export_bundle
from convograph.graph import (
    build_graph,
    merge_corpora,
    parse_vertex_id,
    paths_by_thread,
    star_expand,
)
from convograph.ingest import Corpus, filter_bots, filter_top_fraction, load_botlist, parse_dump
from convograph.layout import LayoutConfig, compute_layout
from convograph.linking import Gazetteer, link_text, to_entity_set

DATA = Path(__file__).resolve().parent / "data"
OUT = Path(__file__).resolve().parent / "out"


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
    lines = (DATA / "sample_dump.jsonl").read_text().splitlines()
    corpus = parse_dump(lines, "reddit-jsonl", label="sample")
    corpus = filter_bots(corpus, load_botlist((DATA / "bots.txt").read_text().splitlines()))
    corpus = filter_top_fraction(corpus, 0.2)
    gaz = Gazetteer.from_tsv((DATA / "gazetteer.tsv").read_text().splitlines())

    merged = star_expand(
        merge_corpora(community_graph(corpus, "a", gaz), community_graph(corpus, "b", gaz))
    )
    print(f"merged graph: labels {merged.labels}, "
          f"{len(merged.set_vertices)} set vertices, {len(merged.transitions)} transitions")

    layout = compute_layout(merged, LayoutConfig(seed=0))
    activation = spread(
        merged,
        parse_vertex_id("s0:Donald_Trump"),
        ActivationParams(firing_threshold=0.05, decay=0.5),
    )
    bundle = export_bundle(merged, layout, activation=activation)

    OUT.mkdir(exist_ok=True)
    (OUT / "bundle.json").write_text(bundle_to_json(bundle))
    print(f"wrote {OUT / 'bundle.json'}: {len(bundle['nodes'])} nodes, "
          f"{len(bundle['links'])} links, every link blended")

    one_sided = [l for l in bundle["links"] if l["blend"] in (0.0, 1.0)]
    mixed = [l for l in bundle["links"] if 0.25 <= l["blend"] <= 0.75]
    print(f"{len(one_sided)} links live in a single community, "
          f"{len(mixed)} are genuinely shared; the most even splits:")
    for link in sorted(mixed, key=lambda l: (abs(l["blend"] - 0.5), l["src"], l["dst"]))[:6]:
        print(f"  {link['src']:>24} -> {link['dst']:<24} blend={link['blend']:.3f}")


if __name__ == "__main__":
    main()
