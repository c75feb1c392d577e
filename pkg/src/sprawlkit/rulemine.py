"""Apriori frequent-itemset mining and association-rule generation.

Level-wise candidate generation with (k-1)-prefix joins and subset
pruning, exact support counting, and all-partition rule emission. Output
ordering is fully deterministic so goldens can be pinned.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .discretize import TokenizedDataset, token_attribute
from .errors import EmptyDatasetError, InvalidSupportError, MissingSubsetSupportError


@dataclass(frozen=True)
class FrequentItemset:
    items: tuple[str, ...]  # sorted, duplicate-free
    support_count: int
    support: float


@dataclass(frozen=True)
class AssociationRule:
    antecedent: tuple[str, ...]
    consequent: tuple[str, ...]
    support: float
    confidence: float

    def render(self) -> str:
        """Arrow text form, e.g. ``A_Range2 -> B_Range3 Target_Sprawl``."""
        return f"{' '.join(self.antecedent)} -> {' '.join(self.consequent)}"


def _candidates(previous: list[tuple[str, ...]], k: int) -> list[tuple[str, ...]]:
    """Join sorted (k-1)-itemsets sharing a (k-2)-prefix, then subset-prune."""
    previous_set = set(previous)
    out = []
    for a, b in combinations(previous, 2):
        if a[:-1] != b[:-1]:
            continue
        candidate = a + (b[-1],) if a[-1] < b[-1] else b + (a[-1],)
        if all(sub in previous_set for sub in combinations(candidate, k - 1)):
            out.append(candidate)
    return sorted(out)


def frequent_itemsets(
    data: TokenizedDataset, min_support: float
) -> list[FrequentItemset]:
    """All itemsets whose support fraction reaches min_support.

    Output is sorted by (size, lexicographic items) and is complete and
    sound with respect to brute-force enumeration.
    """
    if not data.transactions:
        raise EmptyDatasetError("no transactions to mine")
    if not 0.0 < min_support <= 1.0:
        raise InvalidSupportError(f"min_support {min_support} outside (0, 1]")

    n = len(data.transactions)
    counts: dict[tuple[str, ...], int] = {}
    for t in data.transactions:
        for item in t:
            counts[(item,)] = counts.get((item,), 0) + 1
    level = sorted(k for k, c in counts.items() if c / n >= min_support)
    frequent: dict[tuple[str, ...], int] = {k: counts[k] for k in level}

    k = 2
    while level:
        candidates = _candidates(level, k)
        if not candidates:
            break
        candidate_sets = [(c, frozenset(c)) for c in candidates]
        level_counts = {c: 0 for c in candidates}
        for t in data.transactions:
            for c, cset in candidate_sets:
                if cset <= t:
                    level_counts[c] += 1
        level = sorted(c for c, cnt in level_counts.items() if cnt / n >= min_support)
        for c in level:
            frequent[c] = level_counts[c]
        k += 1

    return [
        FrequentItemset(items=items, support_count=count, support=count / n)
        for items, count in sorted(frequent.items(), key=lambda kv: (len(kv[0]), kv[0]))
    ]


def generate_rules(
    itemsets: list[FrequentItemset], min_confidence: float
) -> list[AssociationRule]:
    """All antecedent/consequent partitions meeting min_confidence.

    Requires the itemset list to be downward closed (every subset present),
    as frequent_itemsets produces. Rules are sorted by confidence then
    support, both descending, with lexicographic tie-breaks.
    """
    if not 0.0 < min_confidence <= 1.0:
        raise InvalidSupportError(f"min_confidence {min_confidence} outside (0, 1]")
    support_of = {fi.items: fi.support for fi in itemsets}

    rules = []
    for fi in itemsets:
        if len(fi.items) < 2:
            continue
        for r in range(1, len(fi.items)):
            for antecedent in combinations(fi.items, r):
                if antecedent not in support_of:
                    raise MissingSubsetSupportError(
                        f"itemsets missing subset {antecedent} of {fi.items}"
                    )
                consequent = tuple(i for i in fi.items if i not in antecedent)
                confidence = fi.support / support_of[antecedent]
                if confidence >= min_confidence:
                    rules.append(
                        AssociationRule(
                            antecedent=antecedent,
                            consequent=consequent,
                            support=fi.support,
                            confidence=confidence,
                        )
                    )
    rules.sort(key=lambda r: (-r.confidence, -r.support, r.antecedent, r.consequent))
    return rules


def _matches(tokens: tuple[str, ...], predicate: str) -> bool:
    """A predicate names either an exact token or a bare attribute."""
    if predicate in tokens:
        return True
    for token in tokens:
        try:
            if token_attribute(token) == predicate:
                return True
        except ValueError:
            continue
    return False


def filter_rules(
    rules: list[AssociationRule],
    antecedent: tuple[str, ...] = (),
    consequent: tuple[str, ...] = (),
    mentions: tuple[str, ...] = (),
) -> list[AssociationRule]:
    """Rules matching every given predicate, in their original order.

    Each predicate is a token (``HousingUnits_Range3``, ``Target_Sprawl``)
    or a bare attribute name (``HousingUnits``). ``antecedent`` and
    ``consequent`` constrain one side; ``mentions`` matches either side.
    """
    out = []
    for rule in rules:
        if not all(_matches(rule.antecedent, p) for p in antecedent):
            continue
        if not all(_matches(rule.consequent, p) for p in consequent):
            continue
        if not all(
            _matches(rule.antecedent, p) or _matches(rule.consequent, p)
            for p in mentions
        ):
            continue
        out.append(rule)
    return out
