"""Cross-validated next-set prediction on the sample corpus.

Splits the filtered sample into 5 folds, then reports per-depth coverage
of held-out threads (can the training graph even see them?) and the
per-depth distribution of prediction error, measured as word mover's
distance between the predicted and actual entity sets.
"""

from __future__ import annotations

import io
from pathlib import Path

from convograph.graph import paths_by_thread
from convograph.ingest import filter_bots, filter_top_fraction, load_botlist, parse_dump
from convograph.linking import Gazetteer, link_text, load_embeddings, to_entity_set
from convograph.prediction import (
    evaluate_prediction,
    generalization_over_folds,
    kfold_split,
)

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
    corpus_paths = paths_by_thread(corpus, entity_sets, min_len=3)
    folds = kfold_split(corpus, k=5, seed=0)

    report = generalization_over_folds(folds, corpus_paths, "sample")
    print("held-out coverage by depth (mean over 5 folds, 95% half-width):")
    for row in report.rows:
        print(f"  depth {row.depth}: overlap {row.mean:.3f} ± {row.ci:.3f}"
              f"   exact {row.exact_mean:.3f} ± {row.exact_ci:.3f}")

    table = load_embeddings(io.StringIO((DATA / "embeddings.txt").read_text()))
    wmd_report = evaluate_prediction(folds, corpus_paths, table, "sample")
    print("\nprediction error by depth (word mover's distance, box stats):")
    for row in wmd_report.rows:
        print(f"  depth {row.depth}: median {row.median:.3f} "
              f"[q1 {row.q1:.3f}, q3 {row.q3:.3f}] n={row.n}")
    print(f"skipped walks: {wmd_report.skipped}")


if __name__ == "__main__":
    main()
