"""C4.5-style decision trees with reduced-error pruning, bagging, boosting.

Trees split continuous attributes at midpoints between consecutive distinct
values, choosing the split by gain ratio among candidates whose information
gain reaches the mean gain of all positive-gain candidates. Leaves carry
``(correct/misclassified)`` training counts and trees render as indented
threshold text ending in a ``Size of the tree : N`` line.

All sampling uses the SplitMix64 generator from :mod:`sprawlkit.rng`, so
identical (data, params, seed) reproduce bit-identical models anywhere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from ._format import fmt_plain
from .errors import EmptyDatasetError, NoContinuousPredictorsError
from .geo_ingest import CATEGORICAL, MISSING, AttributeTable
from .rng import SplitMix64, derive_seed

CLASS_YES = "Y"
CLASS_NO = "N"

#: Member weight used when a boosting round classifies perfectly (epsilon 0).
PERFECT_ROUND_WEIGHT = math.log((1.0 - 1e-10) / 1e-10)

_HOLDOUT_STREAM = 0x484F4C44  # distinct seed stream for holdout shuffles


class UnknownAttributeWarning(UserWarning):
    """A prediction instance named an attribute the model never saw."""


class TrainingWarning(UserWarning):
    """Non-fatal degradation during training (empty pruning set, bad round)."""


@dataclass(frozen=True)
class Leaf:
    label: str  # Y | N
    correct: int
    misclassified: int

    def class_counts(self) -> tuple[int, int]:
        """(yes, no) training counts at this leaf."""
        if self.label == CLASS_YES:
            return self.correct, self.misclassified
        return self.misclassified, self.correct


@dataclass(frozen=True)
class Internal:
    attribute: str
    threshold: float
    left: "Leaf | Internal"  # value < threshold
    right: "Leaf | Internal"  # value >= threshold
    left_fraction: float
    right_fraction: float


@dataclass(frozen=True)
class DecisionTree:
    root: Leaf | Internal
    predictors: tuple[str, ...]
    target: str


@dataclass(frozen=True)
class Ensemble:
    members: tuple[tuple[DecisionTree, float], ...]
    kind: str  # bagging | boosting
    seed: int

    def __post_init__(self):
        if not self.members:
            raise ValueError("ensemble must have at least one member")
        if self.kind not in ("bagging", "boosting"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        for _, weight in self.members:
            if not math.isfinite(weight) or weight < 0:
                raise ValueError("member weights must be finite and non-negative")


@dataclass(frozen=True)
class TrainParams:
    min_leaf_instances: int = 2
    max_depth: int | None = None
    pruning_holdout_fraction: float = 1.0 / 3.0
    rounds: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.min_leaf_instances < 1:
            raise ValueError("min_leaf_instances must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if not 0.0 <= self.pruning_holdout_fraction < 1.0:
            raise ValueError("pruning_holdout_fraction must be in [0, 1)")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")


@dataclass(frozen=True)
class PathStep:
    """One satisfied test on a prediction path; op '?' summarizes a
    fractional segment taken because the tested attribute was absent."""

    attribute: str
    op: str  # "<" | ">=" | "?"
    threshold: float | None
    text: str


@dataclass(frozen=True)
class TreePrediction:
    label: str
    confidence: float
    path: tuple[PathStep, ...]


@dataclass(frozen=True)
class EnsemblePrediction:
    label: str
    confidence: float
    votes: tuple[tuple[str, float], ...]  # per-member (label, weight)


def _entropy(w_yes: float, w_no: float) -> float:
    total = w_yes + w_no
    if w_yes <= 0.0 or w_no <= 0.0 or total <= 0.0:
        return 0.0
    p_yes = w_yes / total
    p_no = w_no / total
    return -(p_yes * math.log2(p_yes) + p_no * math.log2(p_no))


@dataclass
class _Candidate:
    attr_order: int
    attribute: str
    threshold: float
    gain: float
    ratio: float


class _Trainer:
    """Induction state: per-attribute value columns plus label list."""

    def __init__(self, table: AttributeTable, target: str, params: TrainParams):
        if not table.rows:
            raise EmptyDatasetError("cannot train on an empty table")
        target_col = table.column(target)
        if target_col.kind != CATEGORICAL:
            raise ValueError(f"target column {target!r} must be categorical")
        self.labels = [str(v) for v in table.values(target)]
        bad = sorted({v for v in self.labels if v not in (CLASS_YES, CLASS_NO)})
        if bad:
            raise ValueError(f"target values must be Y or N, got {bad}")
        self.predictors = tuple(
            name for name in table.continuous_columns() if name != target
        )
        if not self.predictors:
            raise NoContinuousPredictorsError("no continuous predictor columns")
        self.columns = {name: table.values(name) for name in self.predictors}
        self.target = target
        self.params = params

    def grow(self, weights: list[float]) -> Leaf | Internal:
        indices = list(range(len(self.labels)))
        return self._grow(indices, weights, depth=0)

    def _leaf(self, indices: list[int], weights: list[float]) -> Leaf:
        w_yes = sum(weights[i] for i in indices if self.labels[i] == CLASS_YES)
        w_no = sum(weights[i] for i in indices if self.labels[i] == CLASS_NO)
        label = CLASS_YES if w_yes > w_no else CLASS_NO  # tie goes to N
        correct = sum(1 for i in indices if self.labels[i] == label)
        return Leaf(label=label, correct=correct, misclassified=len(indices) - correct)

    def _grow(self, indices: list[int], weights: list[float], depth: int) -> Leaf | Internal:
        params = self.params
        n_yes = sum(1 for i in indices if self.labels[i] == CLASS_YES)
        if (
            n_yes == 0
            or n_yes == len(indices)
            or len(indices) < params.min_leaf_instances
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            return self._leaf(indices, weights)

        best = self._best_split(indices, weights)
        if best is None:
            return self._leaf(indices, weights)

        column = self.columns[best.attribute]
        left, right, absent = [], [], []
        left_w = right_w = 0.0
        for i in indices:
            value = column[i]
            if value is MISSING:
                absent.append(i)
            elif value < best.threshold:
                left.append(i)
                left_w += weights[i]
            else:
                right.append(i)
                right_w += weights[i]
        # Rows missing the split attribute follow the heavier branch.
        if absent:
            target = left if left_w >= right_w else right
            target.extend(absent)
            bucket_w = sum(weights[i] for i in absent)
            if left_w >= right_w:
                left_w += bucket_w
            else:
                right_w += bucket_w
        total_w = left_w + right_w
        return Internal(
            attribute=best.attribute,
            threshold=best.threshold,
            left=self._grow(left, weights, depth + 1),
            right=self._grow(right, weights, depth + 1),
            left_fraction=left_w / total_w,
            right_fraction=right_w / total_w,
        )

    def _best_split(self, indices: list[int], weights: list[float]) -> _Candidate | None:
        """Highest gain-ratio candidate whose gain reaches the mean positive gain."""
        total_w = sum(weights[i] for i in indices)
        candidates: list[_Candidate] = []
        for attr_order, attribute in enumerate(self.predictors):
            column = self.columns[attribute]
            known = [i for i in indices if column[i] is not MISSING]
            if len(known) < 2:
                continue
            known.sort(key=lambda i: column[i])
            known_w = sum(weights[i] for i in known)
            known_yes_w = sum(weights[i] for i in known if self.labels[i] == CLASS_YES)
            base = _entropy(known_yes_w, known_w - known_yes_w)
            known_fraction = known_w / total_w
            missing_w = total_w - known_w

            left_w = left_yes_w = 0.0
            left_count = 0
            for pos in range(1, len(known)):
                prev, cur = known[pos - 1], known[pos]
                left_w += weights[prev]
                left_count += 1
                if self.labels[prev] == CLASS_YES:
                    left_yes_w += weights[prev]
                if column[prev] == column[cur]:
                    continue
                if left_count < self.params.min_leaf_instances:
                    continue
                if len(known) - left_count < self.params.min_leaf_instances:
                    continue
                threshold = (column[prev] + column[cur]) / 2.0
                right_w = known_w - left_w
                right_yes_w = known_yes_w - left_yes_w
                children = (
                    left_w / known_w * _entropy(left_yes_w, left_w - left_yes_w)
                    + right_w / known_w * _entropy(right_yes_w, right_w - right_yes_w)
                )
                gain = known_fraction * (base - children)
                if gain <= 0.0:
                    continue
                split_info = _split_info(left_w, right_w, missing_w, total_w)
                if split_info <= 0.0:
                    continue
                candidates.append(
                    _Candidate(
                        attr_order=attr_order,
                        attribute=attribute,
                        threshold=threshold,
                        gain=gain,
                        ratio=gain / split_info,
                    )
                )
        if not candidates:
            return None
        mean_gain = sum(c.gain for c in candidates) / len(candidates)
        eligible = [c for c in candidates if c.gain >= mean_gain - 1e-12]
        eligible.sort(key=lambda c: (-c.ratio, -c.gain, c.attr_order, c.threshold))
        return eligible[0]


def _split_info(left_w: float, right_w: float, missing_w: float, total_w: float) -> float:
    info = 0.0
    for w in (left_w, right_w, missing_w):
        if w > 0.0:
            p = w / total_w
            info -= p * math.log2(p)
    return info


def split_stats(
    values: list[float],
    labels: list[str],
    threshold: float,
    weights: list[float] | None = None,
) -> tuple[float, float]:
    """(information gain, gain ratio) of one threshold split, using the same
    entropy formulas as induction. Exposed for diagnostics and oracles."""
    if weights is None:
        weights = [1.0] * len(values)
    total_w = sum(weights)
    yes_w = sum(w for w, c in zip(weights, labels) if c == CLASS_YES)
    left_w = left_yes_w = 0.0
    for value, weight, label in zip(values, weights, labels):
        if value < threshold:
            left_w += weight
            if label == CLASS_YES:
                left_yes_w += weight
    right_w = total_w - left_w
    right_yes_w = yes_w - left_yes_w
    children = 0.0
    if total_w > 0.0:
        children = (
            left_w / total_w * _entropy(left_yes_w, left_w - left_yes_w)
            + right_w / total_w * _entropy(right_yes_w, right_w - right_yes_w)
        )
    gain = _entropy(yes_w, total_w - yes_w) - children
    info = _split_info(left_w, right_w, 0.0, total_w)
    return gain, (gain / info if info > 0.0 else 0.0)


def build_tree(
    table: AttributeTable,
    target: str,
    params: TrainParams,
    weights: list[float] | None = None,
) -> DecisionTree:
    """Grow an unpruned tree by recursive top-down induction.

    ``weights`` are per-row instance weights (used by boosting); entropy,
    gain and branch fractions are all weight-aware. Defaults to uniform.
    """
    trainer = _Trainer(table, target, params)
    if weights is None:
        weights = [1.0] * len(table.rows)
    elif len(weights) != len(table.rows):
        raise ValueError("weights length must equal row count")
    root = trainer.grow(weights)
    return DecisionTree(root=root, predictors=trainer.predictors, target=target)


def _training_counts(node: Leaf | Internal) -> tuple[int, int]:
    if isinstance(node, Leaf):
        return node.class_counts()
    ly, ln = _training_counts(node.left)
    ry, rn = _training_counts(node.right)
    return ly + ry, ln + rn


def training_counts(tree: DecisionTree) -> tuple[int, int]:
    """(yes, no) training-row counts summed over the tree's leaves."""
    return _training_counts(tree.root)


def _route(node: Internal, value) -> Leaf | Internal:
    if value is MISSING:
        return node.left if node.left_fraction >= node.right_fraction else node.right
    return node.left if value < node.threshold else node.right


def reduced_error_prune(tree: DecisionTree, pruning_set: AttributeTable) -> DecisionTree:
    """Collapse internal nodes whose majority leaf does at least as well on
    the pruning set, bottom-up, in one deterministic pass to fixpoint."""
    if not pruning_set.rows:
        warnings.warn(
            "empty pruning set; tree returned unchanged", TrainingWarning, stacklevel=2
        )
        return tree
    rows = [pruning_set.row_dict(i) for i in range(len(pruning_set.rows))]
    for row in rows:
        if row.get(tree.target) not in (CLASS_YES, CLASS_NO):
            raise ValueError("pruning rows must carry a Y/N target value")

    def prune(node: Leaf | Internal, reached: list[dict]) -> tuple[Leaf | Internal, int]:
        if isinstance(node, Leaf):
            errors = sum(1 for row in reached if row[tree.target] != node.label)
            return node, errors
        left_rows = [r for r in reached if _route(node, r.get(node.attribute)) is node.left]
        right_rows = [r for r in reached if _route(node, r.get(node.attribute)) is node.right]
        new_left, left_err = prune(node.left, left_rows)
        new_right, right_err = prune(node.right, right_rows)
        subtree_err = left_err + right_err

        n_yes, n_no = _training_counts(node)
        label = CLASS_YES if n_yes > n_no else CLASS_NO  # tie goes to N
        leaf = Leaf(
            label=label,
            correct=n_yes if label == CLASS_YES else n_no,
            misclassified=n_no if label == CLASS_YES else n_yes,
        )
        leaf_err = sum(1 for row in reached if row[tree.target] != label)
        if leaf_err <= subtree_err:
            return leaf, leaf_err
        return (
            Internal(
                attribute=node.attribute,
                threshold=node.threshold,
                left=new_left,
                right=new_right,
                left_fraction=node.left_fraction,
                right_fraction=node.right_fraction,
            ),
            subtree_err,
        )

    new_root, _ = prune(tree.root, rows)
    return DecisionTree(root=new_root, predictors=tree.predictors, target=tree.target)


def _leaf_masses(node: Leaf | Internal, instance: dict, weight: float,
                 masses: list[float], forks: list) -> None:
    if isinstance(node, Leaf):
        yes, no = node.class_counts()
        total = yes + no
        if total == 0:
            share = 0.5
        else:
            share = yes / total
        masses[0] += weight * share
        masses[1] += weight * (1.0 - share)
        return
    value = instance.get(node.attribute)
    if value is None:
        forks.append(node)
        _leaf_masses(node.left, instance, weight * node.left_fraction, masses, forks)
        _leaf_masses(node.right, instance, weight * node.right_fraction, masses, forks)
    elif value < node.threshold:
        _leaf_masses(node.left, instance, weight, masses, forks)
    else:
        _leaf_masses(node.right, instance, weight, masses, forks)


def predict(tree: DecisionTree, instance: dict) -> TreePrediction:
    """Classify a partial attribute assignment.

    Descends by threshold comparisons; when a tested attribute is absent the
    descent follows both branches, weighting leaf class distributions by the
    stored training fractions. The path records each concrete test taken,
    with fractional segments summarized in a single step.
    """
    known = {}
    for name, value in instance.items():
        if name not in tree.predictors:
            warnings.warn(
                f"attribute {name!r} unknown to the model; ignored",
                UnknownAttributeWarning,
                stacklevel=2,
            )
            continue
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"value for {name!r} must be finite")
        known[name] = value

    path: list[PathStep] = []
    node = tree.root
    while isinstance(node, Internal) and node.attribute in known:
        value = known[node.attribute]
        if value < node.threshold:
            op = "<"
            branch = node.left
        else:
            op = ">="
            branch = node.right
        path.append(
            PathStep(
                attribute=node.attribute,
                op=op,
                threshold=node.threshold,
                text=f"{node.attribute} {op} {fmt_plain(node.threshold)}",
            )
        )
        node = branch

    masses = [0.0, 0.0]
    forks: list[Internal] = []
    _leaf_masses(node, known, 1.0, masses, forks)
    if forks:
        names = []
        for fork in forks:
            if fork.attribute not in names:
                names.append(fork.attribute)
        first = forks[0]
        path.append(
            PathStep(
                attribute=first.attribute,
                op="?",
                threshold=first.threshold,
                text=(
                    f"{', '.join(names)} not specified; branches combined by "
                    f"training fractions"
                ),
            )
        )
    mass_yes, mass_no = masses
    total = mass_yes + mass_no
    label = CLASS_YES if mass_yes > mass_no else CLASS_NO  # tie goes to N
    confidence = (mass_yes if label == CLASS_YES else mass_no) / total
    return TreePrediction(label=label, confidence=confidence, path=tuple(path))


def bagging_fit(table: AttributeTable, target: str, params: TrainParams) -> Ensemble:
    """Bootstrap-aggregated reduced-error-pruned trees with equal weights.

    Round r draws n rows with replacement from a SplitMix64 stream seeded
    from (seed, r); that round's out-of-bag rows form its pruning set.
    """
    n = len(table.rows)
    if n == 0:
        raise EmptyDatasetError("cannot train on an empty table")
    members = []
    for round_index in range(params.rounds):
        rng = SplitMix64(derive_seed(params.seed, round_index))
        picks = [rng.randint(n) for _ in range(n)]
        sample = table.subset(picks)
        out_of_bag = sorted(set(range(n)) - set(picks))
        tree = build_tree(sample, target, params)
        with warnings.catch_warnings():
            if not out_of_bag:
                warnings.simplefilter("ignore", TrainingWarning)
            tree = reduced_error_prune(tree, table.subset(out_of_bag))
        members.append((tree, 1.0))
    return Ensemble(members=tuple(members), kind="bagging", seed=params.seed)


def boosting_fit(
    table: AttributeTable,
    target: str,
    params: TrainParams,
    on_round=None,
) -> Ensemble:
    """AdaBoost.M1 over weighted trees.

    Instance weights start uniform. After each round the weighted error
    epsilon decides: 0 stops early (the round is kept with a capped large
    weight); >= 0.5 stops and discards the round; otherwise the member gets
    weight ln((1-eps)/eps) and misclassified instance weights are multiplied
    by (1-eps)/eps before renormalizing to sum 1.

    ``on_round(round_index, epsilon, member_weight, weights)`` is invoked
    after each kept round, mainly for tests and diagnostics.
    """
    n = len(table.rows)
    if n == 0:
        raise EmptyDatasetError("cannot train on an empty table")
    labels = [str(v) for v in table.values(target)]
    row_dicts = [table.row_dict(i) for i in range(n)]
    instances = [
        {k: v for k, v in row.items() if isinstance(v, float)} for row in row_dicts
    ]

    weights = [1.0 / n] * n
    members: list[tuple[DecisionTree, float]] = []
    for round_index in range(params.rounds):
        tree = build_tree(table, target, params, weights=list(weights))
        wrong = [
            i for i in range(n) if predict(tree, instances[i]).label != labels[i]
        ]
        epsilon = sum(weights[i] for i in wrong)
        if epsilon == 0.0:
            members.append((tree, PERFECT_ROUND_WEIGHT))
            if on_round is not None:
                on_round(round_index, epsilon, PERFECT_ROUND_WEIGHT, tuple(weights))
            break
        if epsilon >= 0.5:
            if not members:
                warnings.warn(
                    "first boosting round has weighted error >= 0.5; "
                    "keeping its tree with weight 1",
                    TrainingWarning,
                    stacklevel=2,
                )
                members.append((tree, 1.0))
                if on_round is not None:
                    on_round(round_index, epsilon, 1.0, tuple(weights))
            break
        factor = (1.0 - epsilon) / epsilon
        member_weight = math.log(factor)
        members.append((tree, member_weight))
        for i in wrong:
            weights[i] *= factor
        total = sum(weights)
        weights = [w / total for w in weights]
        if on_round is not None:
            on_round(round_index, epsilon, member_weight, tuple(weights))
    return Ensemble(members=tuple(members), kind="boosting", seed=params.seed)


def ensemble_predict(ensemble: Ensemble, instance: dict) -> EnsemblePrediction:
    """Weighted vote over member predictions; ties resolve to N (no sprawl)."""
    votes = []
    share_yes = share_no = 0.0
    for tree, weight in ensemble.members:
        label = predict(tree, instance).label
        votes.append((label, weight))
        if label == CLASS_YES:
            share_yes += weight
        else:
            share_no += weight
    total = share_yes + share_no
    label = CLASS_YES if share_yes > share_no else CLASS_NO
    confidence = (share_yes if label == CLASS_YES else share_no) / total if total else 1.0
    return EnsemblePrediction(label=label, confidence=confidence, votes=tuple(votes))


def fit_pruned_tree(table: AttributeTable, target: str, params: TrainParams) -> DecisionTree:
    """Grow on a deterministic holdout split, then reduced-error prune.

    ``pruning_holdout_fraction`` of the rows (shuffled by a seed-derived
    SplitMix64 stream) form the pruning set; 0 skips pruning entirely.
    """
    n = len(table.rows)
    if n == 0:
        raise EmptyDatasetError("cannot train on an empty table")
    n_prune = int(n * params.pruning_holdout_fraction)
    if n_prune == 0:
        return build_tree(table, target, params)
    order = list(range(n))
    SplitMix64(derive_seed(params.seed, _HOLDOUT_STREAM)).shuffle(order)
    grow_rows = sorted(order[n_prune:])
    prune_rows = sorted(order[:n_prune])
    tree = build_tree(table.subset(grow_rows), target, params)
    return reduced_error_prune(tree, table.subset(prune_rows))


def _size(node: Leaf | Internal) -> int:
    if isinstance(node, Leaf):
        return 1
    return 1 + _size(node.left) + _size(node.right)


def render_tree(tree: DecisionTree) -> str:
    """Indented threshold text with ``(correct/misclassified)`` leaf counts
    and a trailing size line, identical for identical trees."""
    lines: list[str] = []

    def emit(node: Internal, prefix: str) -> None:
        for child, op in ((node.left, "<"), (node.right, ">=")):
            head = f"{prefix}{node.attribute} {op} {fmt_plain(node.threshold)}"
            if isinstance(child, Leaf):
                lines.append(f"{head} : {child.label} ({child.correct}/{child.misclassified})")
            else:
                lines.append(head)
                emit(child, prefix + "| ")

    if isinstance(tree.root, Leaf):
        lines.append(f": {tree.root.label} ({tree.root.correct}/{tree.root.misclassified})")
    else:
        emit(tree.root, "")
    lines.append(f"Size of the tree : {_size(tree.root)}")
    return "\n".join(lines) + "\n"


def render_ensemble(ensemble: Ensemble) -> str:
    """All member trees under REPTree banners, bagging-output style."""
    blocks = []
    for tree, weight in ensemble.members:
        banner = "REPTree\n====="
        if ensemble.kind == "boosting":
            banner += f" (weight {fmt_plain(round(weight, 6))})"
        blocks.append(f"{banner}\n{render_tree(tree)}")
    return "\n".join(blocks)
