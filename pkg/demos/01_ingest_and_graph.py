"""Walk the sample dump from raw records to a layered entity graph.

Reads demos/data/sample_dump.jsonl (200 threads, two communities), keeps
the most active fifth, links comments against the toy gazetteer, and
builds the star-expanded graph, printing what happens at each stage.
"""

from __future__ import annotations

from pathlib import Path

from convograph.graph import build_graph, paths_by_thread, star_expand
from convograph.ingest import filter_bots, filter_top_fraction, load_botlist, parse_dump
from convograph.linking import Gazetteer, link_text, to_entity_set

DATA = Path(__file__).resolve().parent / "data"


def main() -> None:
    lines = (DATA / "sample_dump.jsonl").read_text().splitlines()
    corpus = parse_dump(lines, "reddit-jsonl", label="sample")
    print(f"parsed {len(corpus.threads)} threads "
          f"({corpus.stats.malformed_records} malformed records, "
          f"{corpus.stats.orphan_comments} orphans skipped)")

    corpus = filter_bots(corpus, load_botlist((DATA / "bots.txt").read_text().splitlines()))
    corpus = filter_top_fraction(corpus, 0.2)
    n_comments = sum(len(t.comments) for t in corpus.threads)
    print(f"after bot removal and top-20% filter: {len(corpus.threads)} threads, "
          f"{n_comments} comments")

    gaz = Gazetteer.from_tsv((DATA / "gazetteer.tsv").read_text().splitlines())
    entity_sets = {}
    for thread in corpus.threads:
        for comment in thread.comments:
            s = to_entity_set(link_text(comment.text, gaz))
            if s.entities:
                entity_sets[comment.id] = s
    print(f"linked {len(entity_sets)} of {n_comments} comments to entities")

    corpus_paths = paths_by_thread(corpus, entity_sets, min_len=3)
    graph = star_expand(build_graph(corpus_paths, "sample"))
    print(f"graph: {len(graph.set_vertices)} set vertices, "
          f"{len(graph.entity_vertices)} entity vertices, "
          f"{len(graph.transitions)} transitions, max depth {graph.max_depth}")

    print("\nheaviest transitions (distinct threads):")
    ranked = sorted(
        graph.transitions.items(),
        key=lambda kv: (-sum(kv[1].values()), kv[0][0].sort_key(), kv[0][1].sort_key()),
    )
    for (src, dst), weights in ranked[:8]:
        print(f"  {src.vertex_id:>28} -> {dst.vertex_id:<28} w={sum(weights.values())}")


if __name__ == "__main__":
    main()
