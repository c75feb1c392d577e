"""Continuous attributes to range tokens, rows to transactions.

Binned attribute values become tokens of the form ``<Attr>_Range<K>``
with K starting at 2, so a 3-bin attribute produces Range2, Range3 and
Range4. Each table row becomes a transaction: one token per binned
attribute plus exactly one target token.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_left
from dataclasses import dataclass

from .errors import (
    NonContinuousAttributeError,
    SchemeTableMismatchError,
    UnknownAttributeError,
)
from .geo_ingest import CONTINUOUS, MISSING, AttributeTable

EQUAL_FREQUENCY = "equal-frequency"
EQUAL_WIDTH = "equal-width"
EXPLICIT = "explicit"

TARGET_SPRAWL = "Target_Sprawl"
TARGET_NO_SPRAWL = "Target_NoSprawl"
TARGET_ATTRIBUTE = "Target"

#: First range number; token numbering starts at 2 rather than 1.
RANGE_BASE = 2


class BinningWarning(UserWarning):
    """Non-fatal degradation while fitting bins (e.g. too few distinct values)."""


def range_label(attribute: str, bin_index: int) -> str:
    return f"{attribute}_Range{bin_index + RANGE_BASE}"


def parse_token(token: str) -> tuple[str, int]:
    """Invert a range token into (attribute, bin index).

    Target tokens map to the target pseudo-attribute with bin 0 for
    no-sprawl and 1 for sprawl.
    """
    if token == TARGET_SPRAWL:
        return TARGET_ATTRIBUTE, 1
    if token == TARGET_NO_SPRAWL:
        return TARGET_ATTRIBUTE, 0
    attribute, _, suffix = token.rpartition("_Range")
    if not attribute or not suffix.isdigit():
        raise ValueError(f"not a range token: {token!r}")
    k = int(suffix)
    if k < RANGE_BASE:
        raise ValueError(f"range number below {RANGE_BASE}: {token!r}")
    return attribute, k - RANGE_BASE


def token_attribute(token: str) -> str:
    return parse_token(token)[0]


@dataclass(frozen=True)
class AttributeBinning:
    """Cut points and labels for one attribute."""

    attribute: str
    strategy: str
    cuts: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        for lo, hi in zip(self.cuts, self.cuts[1:]):
            if not lo < hi:
                raise ValueError(f"cuts for {self.attribute!r} not strictly increasing")
        for cut in self.cuts:
            if not math.isfinite(cut):
                raise ValueError(f"non-finite cut for {self.attribute!r}")
        if len(self.labels) != len(self.cuts) + 1:
            raise ValueError("label count must be cut count + 1")
        expected = tuple(range_label(self.attribute, i) for i in range(len(self.labels)))
        if self.labels != expected:
            raise ValueError(f"labels for {self.attribute!r} must be {expected}")

    def bin_index(self, value: float) -> int:
        """Intervals are (lo, hi]; a value exactly at a cut goes to the lower bin."""
        return bisect_left(self.cuts, value)

    def token(self, value: float) -> str:
        return self.labels[self.bin_index(value)]

    def bounds(self, bin_index: int) -> tuple[float | None, float | None]:
        """(lower, upper) boundary of a bin, None at the open ends."""
        lo = self.cuts[bin_index - 1] if bin_index > 0 else None
        hi = self.cuts[bin_index] if bin_index < len(self.cuts) else None
        return lo, hi


@dataclass(frozen=True)
class BinningScheme:
    """Ordered per-attribute binnings, immutable and shareable once fitted."""

    entries: tuple[AttributeBinning, ...]

    def __post_init__(self):
        names = [e.attribute for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate attribute in binning scheme")

    def attributes(self) -> list[str]:
        return [e.attribute for e in self.entries]

    def entry(self, attribute: str) -> AttributeBinning:
        for e in self.entries:
            if e.attribute == attribute:
                return e
        raise UnknownAttributeError(f"attribute {attribute!r} not in binning scheme")

    def __contains__(self, attribute: str) -> bool:
        return any(e.attribute == attribute for e in self.entries)

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "attribute": e.attribute,
                "strategy": e.strategy,
                "cuts": list(e.cuts),
                "labels": list(e.labels),
            }
            for e in self.entries
        ]

    @classmethod
    def from_json_obj(cls, obj: list[dict]) -> "BinningScheme":
        return cls(
            entries=tuple(
                AttributeBinning(
                    attribute=item["attribute"],
                    strategy=item["strategy"],
                    cuts=tuple(float(c) for c in item["cuts"]),
                    labels=tuple(item["labels"]),
                )
                for item in obj
            )
        )


@dataclass(frozen=True)
class TokenizedDataset:
    """Transactions (one token set per row) ready for rule mining."""

    transactions: tuple[frozenset, ...]
    vocabulary: frozenset
    target_tokens: tuple[str, str] = (TARGET_SPRAWL, TARGET_NO_SPRAWL)
    provenance: tuple = ()  # row key per transaction, parallel to transactions

    def __post_init__(self):
        for t in self.transactions:
            if not t <= self.vocabulary:
                raise ValueError("transaction token missing from vocabulary")


def _equal_frequency_cuts(values: list[float], bins: int) -> list[float]:
    """Cuts at block boundaries n*i/bins over the sorted values.

    When the boundary falls exactly between two elements the cut is their
    midpoint; otherwise it is the straddling order statistic. This keeps
    bin populations equal up to the tie mass at the cut values.
    """
    ordered = sorted(values)
    n = len(ordered)
    top = ordered[-1]
    cuts = []
    for i in range(1, bins):
        m, r = divmod(n * i, bins)
        if r == 0 and m >= 1:
            cut = (ordered[m - 1] + ordered[m]) / 2.0
        else:
            cut = ordered[m]
        # A cut at or above the maximum leaves the upper bin empty, since
        # intervals are (lo, hi]; ties can also collapse adjacent cuts.
        if cut >= top:
            continue
        if not cuts or cut > cuts[-1]:
            cuts.append(cut)
    return cuts


def _equal_width_cuts(values: list[float], bins: int) -> list[float]:
    lo, hi = min(values), max(values)
    if lo == hi:
        return []
    step = (hi - lo) / bins
    cuts = []
    for i in range(1, bins):
        cut = lo + step * i
        if not cuts or cut > cuts[-1]:
            cuts.append(cut)
    return cuts


def fit_binning(
    table: AttributeTable,
    attributes: list[str],
    bins_per_attribute: int = 3,
    strategy: str = EQUAL_FREQUENCY,
    explicit_cuts: dict[str, list[float]] | None = None,
) -> BinningScheme:
    """Fit cut points for the named continuous attributes.

    Equal-frequency places cuts at order statistics with midpoint
    interpolation; equal-width divides [min, max] evenly; explicit takes
    ``explicit_cuts[attribute]`` as given. Attributes with too few distinct
    values fall back to fewer bins (down to one for a constant column) with
    a BinningWarning, never silently.
    """
    if not table.rows:
        raise SchemeTableMismatchError("cannot fit binning on an empty table")
    if bins_per_attribute < 2:
        raise ValueError("bins_per_attribute must be >= 2")
    if strategy not in (EQUAL_FREQUENCY, EQUAL_WIDTH, EXPLICIT):
        raise ValueError(f"unknown strategy {strategy!r}")
    explicit_cuts = explicit_cuts or {}

    entries = []
    for attribute in attributes:
        if attribute not in table.column_names():
            raise UnknownAttributeError(f"attribute {attribute!r} not in table")
        if table.column(attribute).kind != CONTINUOUS:
            raise NonContinuousAttributeError(f"attribute {attribute!r} is not continuous")
        values = [v for v in table.values(attribute) if v is not MISSING]
        if not values:
            raise NonContinuousAttributeError(f"attribute {attribute!r} has no values")

        if strategy == EXPLICIT or attribute in explicit_cuts:
            if attribute not in explicit_cuts:
                raise UnknownAttributeError(f"no explicit cuts supplied for {attribute!r}")
            cuts = [float(c) for c in explicit_cuts[attribute]]
        elif strategy == EQUAL_FREQUENCY:
            cuts = _equal_frequency_cuts(values, bins_per_attribute)
        else:
            cuts = _equal_width_cuts(values, bins_per_attribute)

        wanted = bins_per_attribute if attribute not in explicit_cuts else len(cuts) + 1
        if len(cuts) + 1 < wanted:
            warnings.warn(
                f"{attribute}: only {len(cuts) + 1} distinct bin(s) possible, "
                f"requested {wanted}",
                BinningWarning,
                stacklevel=2,
            )
        labels = tuple(range_label(attribute, i) for i in range(len(cuts) + 1))
        entries.append(
            AttributeBinning(
                attribute=attribute,
                strategy=EXPLICIT if attribute in explicit_cuts else strategy,
                cuts=tuple(cuts),
                labels=labels,
            )
        )
    return BinningScheme(entries=tuple(entries))


def tokenize(
    table: AttributeTable,
    scheme: BinningScheme,
    target_column: str,
) -> TokenizedDataset:
    """Turn each row into its set of range tokens plus one target token.

    Missing cells contribute no token for their attribute. Target values
    Y and N map to the sprawl / no-sprawl tokens.
    """
    names = set(table.column_names())
    missing = [a for a in scheme.attributes() if a not in names]
    if missing:
        raise SchemeTableMismatchError(f"scheme attributes not in table: {missing}")
    if target_column not in names:
        raise SchemeTableMismatchError(f"target column {target_column!r} not in table")

    key_values = (
        table.values(table.key_column) if table.key_column else list(range(len(table)))
    )
    target_values = table.values(target_column)
    column_of = {a: table.column_index(a) for a in scheme.attributes()}

    transactions = []
    vocabulary = {TARGET_SPRAWL, TARGET_NO_SPRAWL}
    for row, target in zip(table.rows, target_values):
        tokens = set()
        for entry in scheme.entries:
            cell = row[column_of[entry.attribute]]
            if cell is MISSING:
                continue
            token = entry.token(cell)
            tokens.add(token)
            vocabulary.add(token)
        if target == "Y":
            tokens.add(TARGET_SPRAWL)
        elif target == "N":
            tokens.add(TARGET_NO_SPRAWL)
        else:
            raise SchemeTableMismatchError(
                f"target value {target!r} is not Y or N"
            )
        transactions.append(frozenset(tokens))
    return TokenizedDataset(
        transactions=tuple(transactions),
        vocabulary=frozenset(vocabulary),
        provenance=tuple(key_values),
    )
