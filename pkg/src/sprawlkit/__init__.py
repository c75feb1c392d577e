"""Geospatial knowledge discovery and decision support for urban sprawl.

Pipeline: ingest county geometry and attribute tables, discretize the
continuous attributes into range tokens, mine association rules, train
decision-tree ensembles, and answer what-if queries over the trained
bundle, in process or over HTTP.
"""

from .discretize import (
    BinningScheme,
    TokenizedDataset,
    fit_binning,
    tokenize,
)
from .dtree import (
    DecisionTree,
    Ensemble,
    TrainParams,
    bagging_fit,
    boosting_fit,
    build_tree,
    ensemble_predict,
    fit_pruned_tree,
    predict,
    reduced_error_prune,
    render_tree,
)
from .engine import (
    ImpactReport,
    MiningParams,
    ModelBundle,
    Prediction,
    WhatIfQuery,
    load_bundle,
    predict_sprawl,
    query_impact,
    save_bundle,
    train_bundle,
)
from .geo_ingest import (
    AttributeTable,
    CountyGeometry,
    LabeledRegionSet,
    join_tables,
    label_geometries,
    parse_csv,
    parse_dbf,
    parse_shapefile,
)
from .mapviz import diff_years, export_geojson
from .rulemine import (
    AssociationRule,
    FrequentItemset,
    filter_rules,
    frequent_itemsets,
    generate_rules,
)

__version__ = "0.1.0"

__all__ = [
    "AssociationRule",
    "AttributeTable",
    "BinningScheme",
    "CountyGeometry",
    "DecisionTree",
    "Ensemble",
    "FrequentItemset",
    "ImpactReport",
    "LabeledRegionSet",
    "MiningParams",
    "ModelBundle",
    "Prediction",
    "TokenizedDataset",
    "TrainParams",
    "WhatIfQuery",
    "bagging_fit",
    "boosting_fit",
    "build_tree",
    "diff_years",
    "ensemble_predict",
    "export_geojson",
    "filter_rules",
    "fit_binning",
    "fit_pruned_tree",
    "frequent_itemsets",
    "generate_rules",
    "join_tables",
    "label_geometries",
    "load_bundle",
    "parse_csv",
    "parse_dbf",
    "parse_shapefile",
    "predict",
    "predict_sprawl",
    "query_impact",
    "reduced_error_prune",
    "render_tree",
    "save_bundle",
    "tokenize",
    "train_bundle",
]
