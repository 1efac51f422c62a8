"""Entity graphs for threaded online conversations.

Pipeline: parse conversation dumps, link comments to entities, aggregate
conversation paths into depth-layered entity graphs, then predict, lay
out, activate, and export for interactive exploration.
"""

from .activation import ActivationParams, ActivationState, activation_subgraph, spread
from .export import blend_map, bundle_to_json, compute_blend, export_bundle, validate_bundle
from .graph import (
    ConversationPath,
    EntityGraph,
    EntityTree,
    GraphVertex,
    RewiredView,
    build_entity_tree,
    build_graph,
    entity_vertex,
    extract_paths,
    merge_corpora,
    parse_vertex_id,
    paths_by_thread,
    rewire_set_level,
    set_vertex,
    star_expand,
)
from .ingest import (
    Comment,
    Corpus,
    EmptyCorpusError,
    Thread,
    dump_canonical,
    filter_bots,
    filter_top_fraction,
    load_botlist,
    parse_dump,
)
from .layout import LayoutConfig, LayoutResult, compute_layout
from .linking import (
    EmbeddingTable,
    EntitySet,
    Gazetteer,
    Mention,
    dump_prelinked,
    link_text,
    load_embeddings,
    load_prelinked,
    to_entity_set,
)
from .prediction import (
    DepthCoverage,
    FoldSplit,
    GeneralizationReport,
    NextDistribution,
    WmdReport,
    evaluate_prediction,
    generalization,
    generalization_over_folds,
    generalization_report,
    kfold_split,
    predict_next,
    wmd,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationParams",
    "ActivationState",
    "Comment",
    "ConversationPath",
    "Corpus",
    "DepthCoverage",
    "EmbeddingTable",
    "EmptyCorpusError",
    "EntityGraph",
    "EntitySet",
    "EntityTree",
    "FoldSplit",
    "Gazetteer",
    "GeneralizationReport",
    "GraphVertex",
    "LayoutConfig",
    "LayoutResult",
    "Mention",
    "NextDistribution",
    "RewiredView",
    "Thread",
    "WmdReport",
    "activation_subgraph",
    "blend_map",
    "build_entity_tree",
    "build_graph",
    "bundle_to_json",
    "compute_blend",
    "compute_layout",
    "dump_canonical",
    "dump_prelinked",
    "entity_vertex",
    "evaluate_prediction",
    "export_bundle",
    "extract_paths",
    "filter_bots",
    "filter_top_fraction",
    "generalization",
    "generalization_over_folds",
    "generalization_report",
    "kfold_split",
    "link_text",
    "load_botlist",
    "load_embeddings",
    "load_prelinked",
    "merge_corpora",
    "parse_dump",
    "parse_vertex_id",
    "paths_by_thread",
    "predict_next",
    "rewire_set_level",
    "set_vertex",
    "spread",
    "star_expand",
    "to_entity_set",
    "validate_bundle",
    "wmd",
]
