"""The decision-support engine: trained-model bundles and what-if queries.

A ModelBundle packages everything a deployed service needs: the binning
scheme, mined rules, the tree ensemble, a single reference tree, and
per-attribute metadata, persisted as versioned, checksummed JSON whose
numbers survive the round trip bit-exactly (Python's float repr is the
shortest exact form).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ._format import fmt_human
from .discretize import (
    EQUAL_FREQUENCY,
    TARGET_ATTRIBUTE,
    TARGET_NO_SPRAWL,
    TARGET_SPRAWL,
    BinningScheme,
    fit_binning,
    parse_token,
    tokenize,
)
from .dtree import (
    CLASS_NO,
    CLASS_YES,
    DecisionTree,
    Ensemble,
    Internal,
    Leaf,
    PathStep,
    TrainParams,
    bagging_fit,
    boosting_fit,
    ensemble_predict,
    fit_pruned_tree,
    predict,
    training_counts,
)
from .errors import (
    CorruptBundleError,
    NoModelError,
    UnknownAttributeError,
    VersionMismatchError,
)
from .geo_ingest import MISSING, AttributeTable
from .rulemine import AssociationRule, filter_rules, frequent_itemsets, generate_rules

FORMAT_VERSION = 1


@dataclass(frozen=True)
class AttributeInfo:
    name: str
    units: str
    minimum: float
    maximum: float


@dataclass(frozen=True)
class MiningParams:
    min_support: float = 0.2
    min_confidence: float = 0.7
    bins_per_attribute: int = 3


@dataclass(frozen=True)
class ModelBundle:
    format_version: int
    binning: BinningScheme
    rules: tuple[AssociationRule, ...]
    ensemble: Ensemble | None
    single_tree: DecisionTree | None
    attribute_metadata: tuple[AttributeInfo, ...]
    dataset_fingerprint: str
    training_params: TrainParams

    def __post_init__(self):
        known = {info.name for info in self.attribute_metadata} | {TARGET_ATTRIBUTE}
        for rule in self.rules:
            for token in rule.antecedent + rule.consequent:
                attribute = parse_token(token)[0]
                if attribute not in known:
                    raise UnknownAttributeError(
                        f"rule references unknown attribute {attribute!r}"
                    )
        trees = [t for t, _ in self.ensemble.members] if self.ensemble else []
        if self.single_tree is not None:
            trees.append(self.single_tree)
        for tree in trees:
            for attribute in _split_attributes(tree.root):
                if attribute not in known:
                    raise UnknownAttributeError(
                        f"tree references unknown attribute {attribute!r}"
                    )

    def attribute_names(self) -> list[str]:
        return [info.name for info in self.attribute_metadata]


@dataclass(frozen=True)
class WhatIfQuery:
    """One user question: predict sprawl under a partial assignment, or ask
    how attribute A impacts attribute/target B (optionally at a value of A).

    An empty predict assignment is legal and answers from the dataset prior.
    """

    mode: str  # predict | impact
    assignment: dict = field(default_factory=dict)
    impact_pair: tuple[str, str] | None = None
    a_value: float | None = None

    def __post_init__(self):
        if self.mode not in ("predict", "impact"):
            raise ValueError(f"unknown query mode {self.mode!r}")
        if self.mode == "impact" and self.impact_pair is None:
            raise ValueError("impact queries need an (A, B) attribute pair")

    def run(self, bundle: "ModelBundle"):
        if self.mode == "predict":
            return predict_sprawl(bundle, self.assignment)
        a, b = self.impact_pair
        return query_impact(bundle, a, b, self.a_value)


@dataclass(frozen=True)
class Prediction:
    label: str  # Y | N
    confidence: float
    explanation: tuple[str, ...]
    provenance: str

    def to_obj(self) -> dict:
        return {
            "label": self.label,
            "confidence": self.confidence,
            "explanation": list(self.explanation),
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class ImpactReport:
    a: str
    b: str
    a_value: float | None
    a_token: str | None
    headline: str | None
    rules: tuple[AssociationRule, ...]
    note: str | None

    def to_obj(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "a_value": self.a_value,
            "a_token": self.a_token,
            "headline": self.headline,
            "rules": [
                {
                    "antecedent": list(r.antecedent),
                    "consequent": list(r.consequent),
                    "support": r.support,
                    "confidence": r.confidence,
                    "text": r.render(),
                }
                for r in self.rules
            ],
            "note": self.note,
        }


def _split_attributes(node) -> set[str]:
    if isinstance(node, Leaf):
        return set()
    return {node.attribute} | _split_attributes(node.left) | _split_attributes(node.right)


# --- training pipeline -------------------------------------------------------


def dataset_fingerprint(table: AttributeTable) -> str:
    """Content hash of the table: schema plus every cell, order-sensitive."""
    payload = {
        "columns": [[c.name, c.kind] for c in table.columns],
        "key_column": table.key_column,
        "rows": table.rows,
    }
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def train_bundle(
    table: AttributeTable,
    target: str,
    method: str = "bagging",
    params: TrainParams | None = None,
    mining: MiningParams | None = None,
    explicit_cuts: dict[str, list[float]] | None = None,
    units: dict[str, str] | None = None,
) -> ModelBundle:
    """Fit binning, rules, a pruned reference tree, and the chosen ensemble.

    ``method`` is one of tree | bagging | boosting; "tree" wraps the pruned
    single tree as a one-member ensemble so prediction always goes through
    the same voting path.
    """
    params = params or TrainParams()
    mining = mining or MiningParams()
    units = units or {}
    predictors = table.continuous_columns()

    binning = fit_binning(
        table, predictors, mining.bins_per_attribute, EQUAL_FREQUENCY, explicit_cuts
    )
    tokenized = tokenize(table, binning, target)
    itemsets = frequent_itemsets(tokenized, mining.min_support)
    rules = tuple(generate_rules(itemsets, mining.min_confidence))

    single_tree = fit_pruned_tree(table, target, params)
    if method == "tree":
        ensemble = Ensemble(members=((single_tree, 1.0),), kind="bagging", seed=params.seed)
    elif method == "bagging":
        ensemble = bagging_fit(table, target, params)
    elif method == "boosting":
        ensemble = boosting_fit(table, target, params)
    else:
        raise ValueError(f"unknown training method {method!r}")

    metadata = []
    for name in predictors:
        values = [v for v in table.values(name) if v is not MISSING]
        metadata.append(
            AttributeInfo(
                name=name,
                units=units.get(name, ""),
                minimum=min(values),
                maximum=max(values),
            )
        )
    return ModelBundle(
        format_version=FORMAT_VERSION,
        binning=binning,
        rules=rules,
        ensemble=ensemble,
        single_tree=single_tree,
        attribute_metadata=tuple(metadata),
        dataset_fingerprint=dataset_fingerprint(table),
        training_params=params,
    )


# --- persistence -------------------------------------------------------------


def _node_to_obj(node) -> dict:
    if isinstance(node, Leaf):
        return {
            "kind": "leaf",
            "label": node.label,
            "correct": node.correct,
            "misclassified": node.misclassified,
        }
    return {
        "kind": "split",
        "attribute": node.attribute,
        "threshold": node.threshold,
        "left_fraction": node.left_fraction,
        "right_fraction": node.right_fraction,
        "left": _node_to_obj(node.left),
        "right": _node_to_obj(node.right),
    }


def _node_from_obj(obj: dict):
    if obj["kind"] == "leaf":
        return Leaf(
            label=obj["label"],
            correct=obj["correct"],
            misclassified=obj["misclassified"],
        )
    return Internal(
        attribute=obj["attribute"],
        threshold=float(obj["threshold"]),
        left=_node_from_obj(obj["left"]),
        right=_node_from_obj(obj["right"]),
        left_fraction=float(obj["left_fraction"]),
        right_fraction=float(obj["right_fraction"]),
    )


def _tree_to_obj(tree: DecisionTree) -> dict:
    return {
        "root": _node_to_obj(tree.root),
        "predictors": list(tree.predictors),
        "target": tree.target,
    }


def _tree_from_obj(obj: dict) -> DecisionTree:
    return DecisionTree(
        root=_node_from_obj(obj["root"]),
        predictors=tuple(obj["predictors"]),
        target=obj["target"],
    )


def _payload_of(bundle: ModelBundle) -> dict:
    return {
        "binning": bundle.binning.to_json_obj(),
        "rules": [
            {
                "antecedent": list(r.antecedent),
                "consequent": list(r.consequent),
                "support": r.support,
                "confidence": r.confidence,
            }
            for r in bundle.rules
        ],
        "ensemble": None
        if bundle.ensemble is None
        else {
            "kind": bundle.ensemble.kind,
            "seed": bundle.ensemble.seed,
            "members": [
                {"weight": weight, "tree": _tree_to_obj(tree)}
                for tree, weight in bundle.ensemble.members
            ],
        },
        "single_tree": None
        if bundle.single_tree is None
        else _tree_to_obj(bundle.single_tree),
        "attributes": [
            {
                "name": info.name,
                "units": info.units,
                "minimum": info.minimum,
                "maximum": info.maximum,
            }
            for info in bundle.attribute_metadata
        ],
        "dataset_fingerprint": bundle.dataset_fingerprint,
        "training_params": {
            "min_leaf_instances": bundle.training_params.min_leaf_instances,
            "max_depth": bundle.training_params.max_depth,
            "pruning_holdout_fraction": bundle.training_params.pruning_holdout_fraction,
            "rounds": bundle.training_params.rounds,
            "seed": bundle.training_params.seed,
        },
    }


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def bundle_to_json(bundle: ModelBundle) -> str:
    payload = _payload_of(bundle)
    document = {
        "format_version": bundle.format_version,
        "checksum": _checksum(payload),
        "payload": payload,
    }
    return json.dumps(document, indent=2)


def bundle_from_json(text: str) -> ModelBundle:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptBundleError(f"bundle is not valid JSON: {exc}") from exc
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"bundle format_version {version} is not supported; "
            f"this build reads version {FORMAT_VERSION}"
        )
    payload = document.get("payload")
    if payload is None or _checksum(payload) != document.get("checksum"):
        raise CorruptBundleError("bundle checksum does not match payload")

    ensemble = None
    if payload["ensemble"] is not None:
        ensemble = Ensemble(
            members=tuple(
                (_tree_from_obj(m["tree"]), float(m["weight"]))
                for m in payload["ensemble"]["members"]
            ),
            kind=payload["ensemble"]["kind"],
            seed=payload["ensemble"]["seed"],
        )
    tp = payload["training_params"]
    return ModelBundle(
        format_version=FORMAT_VERSION,
        binning=BinningScheme.from_json_obj(payload["binning"]),
        rules=tuple(
            AssociationRule(
                antecedent=tuple(r["antecedent"]),
                consequent=tuple(r["consequent"]),
                support=float(r["support"]),
                confidence=float(r["confidence"]),
            )
            for r in payload["rules"]
        ),
        ensemble=ensemble,
        single_tree=None
        if payload["single_tree"] is None
        else _tree_from_obj(payload["single_tree"]),
        attribute_metadata=tuple(
            AttributeInfo(
                name=a["name"],
                units=a["units"],
                minimum=float(a["minimum"]),
                maximum=float(a["maximum"]),
            )
            for a in payload["attributes"]
        ),
        dataset_fingerprint=payload["dataset_fingerprint"],
        training_params=TrainParams(
            min_leaf_instances=tp["min_leaf_instances"],
            max_depth=tp["max_depth"],
            pruning_holdout_fraction=tp["pruning_holdout_fraction"],
            rounds=tp["rounds"],
            seed=tp["seed"],
        ),
    )


def save_bundle(bundle: ModelBundle, destination: str | Path) -> None:
    Path(destination).write_text(bundle_to_json(bundle), encoding="utf-8")


def load_bundle(source: str | Path) -> ModelBundle:
    return bundle_from_json(Path(source).read_text(encoding="utf-8"))


# --- queries -----------------------------------------------------------------


def _validated_assignment(bundle: ModelBundle, assignment: dict) -> dict[str, float]:
    known = set(bundle.attribute_names())
    clean: dict[str, float] = {}
    for name, value in assignment.items():
        if name not in known:
            raise UnknownAttributeError(f"attribute {name!r} unknown to this model")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"value for {name!r} must be finite")
        clean[name] = value
    return clean


def _prior(bundle: ModelBundle) -> tuple[str, float]:
    tree = bundle.single_tree
    if tree is None and bundle.ensemble is not None:
        tree = bundle.ensemble.members[0][0]
    if tree is None:
        raise NoModelError("bundle has no trained model")
    n_yes, n_no = training_counts(tree)
    label = CLASS_YES if n_yes > n_no else CLASS_NO
    total = n_yes + n_no
    share = (n_yes if label == CLASS_YES else n_no) / total if total else 0.5
    return label, share


def _render_step(step: PathStep) -> str:
    if step.op == "<":
        return f"{step.attribute} is less than {fmt_human(step.threshold)}"
    if step.op == ">=":
        return f"{step.attribute} is more than {fmt_human(step.threshold)}"
    return step.text


def _assignment_tokens(bundle: ModelBundle, assignment: dict[str, float]) -> set[str]:
    tokens = set()
    for name, value in assignment.items():
        if name in bundle.binning:
            tokens.add(bundle.binning.entry(name).token(value))
    return tokens


MAX_SUPPORTING_RULES = 3


def predict_sprawl(bundle: ModelBundle, assignment: dict) -> Prediction:
    """Answer "would sprawl occur under these conditions?".

    Delegates to the weighted ensemble vote (absent attributes descend
    fractionally). The explanation lists the decision-path tests of a member
    that voted for the answer, then up to three highest-confidence mined
    rules whose antecedents the binned assignment satisfies.
    """
    if bundle.ensemble is None:
        raise NoModelError("bundle has no ensemble")
    clean = _validated_assignment(bundle, assignment)
    if not clean:
        label, share = _prior(bundle)
        return Prediction(
            label=label,
            confidence=share,
            explanation=("no conditions supplied; answering from the dataset prior",),
            provenance="prior",
        )

    verdict = ensemble_predict(bundle.ensemble, clean)
    explanation: list[str] = []
    for (tree, _), (label, _) in zip(bundle.ensemble.members, verdict.votes):
        if label != verdict.label:
            continue
        member = predict(tree, clean)
        explanation.extend(_render_step(step) for step in member.path)
        break

    target_token = TARGET_SPRAWL if verdict.label == CLASS_YES else TARGET_NO_SPRAWL
    tokens = _assignment_tokens(bundle, clean)
    supporting = [
        rule
        for rule in bundle.rules
        if set(rule.antecedent) <= tokens and target_token in rule.consequent
    ]
    for rule in supporting[:MAX_SUPPORTING_RULES]:
        explanation.append(f"supported by rule: {rule.render()}")
    if not explanation:
        explanation.append("all ensemble tests were inconclusive for this assignment")
    return Prediction(
        label=verdict.label,
        confidence=verdict.confidence,
        explanation=tuple(explanation),
        provenance="ensemble",
    )


def _headline_for_token(bundle: ModelBundle, b: str, token: str) -> str:
    if b == TARGET_ATTRIBUTE:
        if token == TARGET_SPRAWL:
            return "sprawl is likely to occur"
        return "sprawl is unlikely to occur"
    entry = bundle.binning.entry(b)
    lo, hi = entry.bounds(parse_token(token)[1])
    if lo is None:
        return f"less than {fmt_human(hi)}"
    if hi is None:
        return f"greater than {fmt_human(lo)}"
    return f"between {fmt_human(lo)} and {fmt_human(hi)}"


def query_impact(
    bundle: ModelBundle,
    a: str,
    b: str,
    a_value: float | None = None,
) -> ImpactReport:
    """How does attribute A relate to attribute (or target) B?

    Returns the mined rules carrying A in the antecedent and B in the
    consequent, sorted by confidence. With a value for A, only rules
    matching A's bin are kept and the headline renders B's implied range
    from the best rule against B's bin boundaries.
    """
    known = set(bundle.attribute_names()) | {TARGET_ATTRIBUTE}
    for name in (a, b):
        if name not in known:
            raise UnknownAttributeError(f"attribute {name!r} unknown to this model")
    if a == b:
        raise ValueError("impact query needs two distinct attributes")

    a_token = None
    rules = filter_rules(list(bundle.rules), antecedent=(a,), consequent=(b,))
    if a_value is not None:
        if a == TARGET_ATTRIBUTE:
            raise ValueError("cannot supply a numeric value for the target")
        a_value = float(a_value)
        if not math.isfinite(a_value):
            raise ValueError("value for A must be finite")
        a_token = bundle.binning.entry(a).token(a_value)
        rules = [r for r in rules if a_token in r.antecedent]

    if not rules:
        return ImpactReport(
            a=a,
            b=b,
            a_value=a_value,
            a_token=a_token,
            headline=None,
            rules=(),
            note=f"no mined relationship between {a} and {b} at the current thresholds",
        )
    top = rules[0]
    b_token = next(
        token
        for token in top.consequent
        if parse_token(token)[0] == b
    )
    return ImpactReport(
        a=a,
        b=b,
        a_value=a_value,
        a_token=a_token,
        headline=_headline_for_token(bundle, b, b_token),
        rules=tuple(rules),
        note=None,
    )
