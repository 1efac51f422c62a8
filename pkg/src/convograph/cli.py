"""Command-line pipeline driver.

Each subcommand maps to one pipeline stage and exchanges data through
versioned JSON files, so stages can be rerun, inspected, or swapped out
individually. Failures exit nonzero with a one-line JSON error on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import export as export_mod
from .activation import ActivationParams, NORMALIZATION_MODES, spread
from .graph import EntityGraph, build_graph, merge_corpora, parse_vertex_id, paths_by_thread, star_expand
from .ingest import (
    FORMATS,
    Corpus,
    dump_canonical,
    filter_bots,
    filter_top_fraction,
    load_botlist,
    parse_dump,
)
from .layout import LayoutConfig, LayoutResult, compute_layout
from .linking import Gazetteer, dump_prelinked, link_text, load_embeddings, load_prelinked, to_entity_set
from .prediction import evaluate_prediction, generalization_over_folds, kfold_split

log = logging.getLogger(__name__)

SEED_ENV_VAR = "CONVOGRAPH_SEED"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so every failure funnels through one
    # JSON-emitting error path
    def error(self, message):
        raise CliError(2, message)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise CliError(2, f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_graph(path: str) -> EntityGraph:
    return EntityGraph.from_json(_read_text(path))


def _load_corpus(path: str, label: str = "") -> Corpus:
    return parse_dump(_read_text(path).splitlines(), "canonical-json", label=label)


def _entity_sets_for(corpus, path: str) -> dict:
    known = {c.id for t in corpus.threads for c in t.comments}
    return load_prelinked(_read_text(path).splitlines(), known_ids=known).by_comment


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


# -- subcommand bodies -----------------------------------------------------


def _cmd_ingest(args) -> int:
    corpus = parse_dump(_read_text(args.input).splitlines(), args.format, label=args.label)
    if args.botlist:
        corpus = filter_bots(corpus, load_botlist(_read_text(args.botlist).splitlines()))
        if not corpus.threads:
            raise CliError(1, "bot filtering removed every thread")
    corpus = filter_top_fraction(corpus, args.top_fraction)
    _write_text(args.output, dump_canonical(corpus))
    _emit(
        {
            "threads": len(corpus),
            "malformed_records": corpus.stats.malformed_records,
            "orphan_comments": corpus.stats.orphan_comments,
            "rootless_threads": corpus.stats.rootless_threads,
        }
    )
    return 0


def _cmd_link(args) -> int:
    corpus = _load_corpus(args.corpus)
    if args.gazetteer:
        gazetteer = Gazetteer.from_tsv(_read_text(args.gazetteer).splitlines())
        by_comment = {}
        for thread in corpus.threads:
            for comment in thread.comments:
                entities = to_entity_set(
                    link_text(comment.text, gazetteer, min_prior=args.min_prior)
                )
                if entities:
                    by_comment[comment.id] = entities
        n_skipped = 0
    else:
        known = {c.id for t in corpus.threads for c in t.comments}
        annotations = load_prelinked(_read_text(args.prelinked).splitlines(), known_ids=known)
        by_comment = annotations.by_comment
        n_skipped = annotations.skipped_records
    _write_text(args.output, dump_prelinked(by_comment))
    _emit({"linked_comments": len(by_comment), "skipped_records": n_skipped})
    return 0


def _cmd_build(args) -> int:
    corpus = _load_corpus(args.corpus, label=args.label)
    entity_sets = _entity_sets_for(corpus, args.entities)
    paths = paths_by_thread(corpus, entity_sets, min_len=args.min_path_len)
    if not paths:
        raise CliError(1, "no conversation path satisfies the minimum length")
    graph = star_expand(build_graph(paths, args.label))
    graph.validate()
    _write_text(args.output, graph.to_json())
    _emit(
        {
            "label": args.label,
            "threads_with_paths": len(paths),
            "set_vertices": len(graph.set_vertices),
            "transitions": len(graph.transitions),
            "max_depth": graph.max_depth,
        }
    )
    return 0


def _cmd_merge(args) -> int:
    graphs = [_load_graph(p) for p in args.inputs]
    merged = graphs[0]
    for other in graphs[1:]:
        merged = merge_corpora(merged, other)
    merged.validate()
    _write_text(args.output, merged.to_json())
    _emit({"labels": list(merged.labels), "set_vertices": len(merged.set_vertices)})
    return 0


def _cmd_predict(args) -> int:
    corpus = _load_corpus(args.corpus, label=args.label)
    entity_sets = _entity_sets_for(corpus, args.entities)
    paths = paths_by_thread(corpus, entity_sets, min_len=args.min_path_len)
    folds = kfold_split(corpus, k=args.k, seed=args.seed)

    gen_report = generalization_over_folds(folds, paths, args.label)
    emb = load_embeddings(_read_text(args.embeddings).splitlines())
    wmd_report = evaluate_prediction(folds, paths, emb, args.label)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "generalization.json").write_text(gen_report.to_json(), encoding="utf-8")
    (out_dir / "generalization.csv").write_text(gen_report.to_csv(), encoding="utf-8")
    (out_dir / "wmd.json").write_text(wmd_report.to_json(), encoding="utf-8")
    (out_dir / "wmd.csv").write_text(wmd_report.to_csv(), encoding="utf-8")
    _emit(
        {
            "k": args.k,
            "seed": args.seed,
            "generalization_depths": [r.depth for r in gen_report.rows],
            "wmd_depths": [r.depth for r in wmd_report.rows],
            "skipped": dict(sorted(wmd_report.skipped.items())),
            "out_dir": str(out_dir),
        }
    )
    return 0


def _cmd_layout(args) -> int:
    graph = _load_graph(args.graph)
    config = LayoutConfig(
        iterations_per_depth=args.iterations_per_depth,
        column_spacing=args.column_spacing,
        entity_column_offset=args.entity_column_offset,
        repulsion=args.repulsion,
        spring=args.spring,
        initial_temperature=args.temperature,
        seed=args.seed,
    )
    result = compute_layout(graph, config)
    _write_text(args.output, result.to_json())
    _emit({"vertices": len(result.positions), "seed": args.seed})
    return 0


def _cmd_activate(args) -> int:
    graph = _load_graph(args.graph)
    params = ActivationParams(
        firing_threshold=args.firing_threshold,
        decay=args.decay,
        weight_normalization=args.normalization,
    )
    state = spread(graph, parse_vertex_id(args.source), params, label=args.label)
    _write_text(args.output, state.to_json())
    _emit(
        {
            "source": args.source,
            "activated": len(state.activation),
            "fired": len(state.fired),
        }
    )
    return 0


def _cmd_export(args) -> int:
    graph = _load_graph(args.graph)
    layout = LayoutResult.from_json(_read_text(args.layout))
    activation = json.loads(_read_text(args.activation)) if args.activation else None
    bundle = export_mod.export_bundle(graph, layout, activation=activation)
    _write_text(args.output, export_mod.bundle_to_json(bundle))
    _emit(
        {
            "nodes": len(bundle["nodes"]),
            "links": len(bundle["links"]),
            "labels": bundle["meta"]["labels"],
            "activation": "activation" in bundle,
        }
    )
    return 0


# -- parser wiring ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convograph", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a dump, drop bot subtrees, keep busiest threads")
    p.add_argument("--input", required=True, help="dump file, or - for stdin")
    p.add_argument("--format", required=True, choices=FORMATS)
    p.add_argument("--label", default="", help="corpus label carried through the pipeline")
    p.add_argument("--top-fraction", type=float, default=0.2, help="keep this fraction of threads by reply count (default 0.2)")
    p.add_argument("--botlist", help="newline-delimited bot author names")
    p.add_argument("--output", required=True, help="canonical-json corpus")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("link", help="attach entity sets to comments")
    p.add_argument("--corpus", required=True, help="canonical-json corpus")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--gazetteer", help="surface<TAB>entity<TAB>prior table")
    source.add_argument("--prelinked", help="external annotations, one JSON object per line")
    p.add_argument("--min-prior", type=float, default=0.5, help="discard mentions below this prior")
    p.add_argument("--output", required=True, help="per-comment entity sets")
    p.set_defaults(func=_cmd_link)

    p = sub.add_parser("build", help="aggregate linked threads into an entity graph")
    p.add_argument("--corpus", required=True)
    p.add_argument("--entities", required=True, help="output of the link stage")
    p.add_argument("--label", required=True)
    p.add_argument("--min-path-len", type=int, default=3, help="drop shorter root-to-leaf paths (default 3)")
    p.add_argument("--output", required=True, help="star-expanded entity graph")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("merge", help="combine entity graphs with distinct labels")
    p.add_argument("--inputs", required=True, nargs="+", help="two or more graph files")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("predict", help="cross-validated coverage and next-set distance reports")
    p.add_argument("--corpus", required=True)
    p.add_argument("--entities", required=True)
    p.add_argument("--embeddings", required=True, help="entity_id v1 .. vd lines")
    p.add_argument("--label", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--min-path-len", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("layout", help="position vertices for drawing")
    p.add_argument("--graph", required=True)
    p.add_argument("--iterations-per-depth", type=int, default=100)
    p.add_argument("--column-spacing", type=float, default=100.0)
    p.add_argument("--entity-column-offset", type=float, default=0.5)
    p.add_argument("--repulsion", type=float, default=50.0)
    p.add_argument("--spring", type=float, default=0.1)
    p.add_argument("--temperature", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("activate", help="spreading activation from one vertex")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", required=True, help="vertex id, e.g. s0:acme")
    p.add_argument("--firing-threshold", type=float, default=0.3)
    p.add_argument("--decay", type=float, default=0.5)
    p.add_argument("--normalization", choices=NORMALIZATION_MODES, default="out-normalized")
    p.add_argument("--label", default=None, help="restrict propagation to one corpus")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_activate)

    p = sub.add_parser("export", help="assemble the viewer bundle")
    p.add_argument("--graph", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--activation", help="optional activation result to embed")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        if getattr(args, "seed", None) is None and hasattr(args, "seed"):
            args.seed = _default_seed()
        return args.func(args)
    except CliError as exc:
        _print_error(exc, code=exc.code)
        return exc.code
    except FileNotFoundError as exc:
        _print_error(exc, code=1, detail=str(exc.filename))
        return 1
    except Exception as exc:  # pipeline errors carry their own messages
        _print_error(exc, code=1)
        return 1


def _print_error(exc: Exception, code: int, detail: str | None = None) -> None:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc), "code": code}}
    if detail:
        payload["error"]["detail"] = detail
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
