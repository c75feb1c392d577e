"""Shared test harness: byte-level fixture writers, engineered tables,
and independent brute-force oracles.

The .shp/.dbf writers exist only for tests and fixture generation; the
package itself never writes shapefiles.
"""

from __future__ import annotations

import math
import struct
from itertools import chain, combinations

from sprawlkit.discretize import TokenizedDataset
from sprawlkit.dtree import TrainParams
from sprawlkit.engine import MiningParams, ModelBundle, train_bundle
from sprawlkit.geo_ingest import CATEGORICAL, CONTINUOUS, TEXT, AttributeTable, Column


# --- binary fixture writers --------------------------------------------------

def build_shp(records: list[list[list[tuple[float, float]]]], file_shape_type: int = 5,
              record_shape_types: list[int] | None = None) -> bytes:
    """Assemble a spec-conformant .shp byte stream from per-record ring lists.

    Main-file header: file code 9994 big-endian at offset 0, file length in
    16-bit words big-endian at offset 24, version 1000 little-endian at 28,
    shape type little-endian at 32, bounding box as 4 little-endian doubles
    at 36, then zeroed Z/M ranges to byte 100.
    """
    shape_types = record_shape_types or [5] * len(records)
    body = b""
    for number, (rings, shape_type) in enumerate(zip(records, shape_types), start=1):
        if shape_type == 0:
            content = struct.pack("<i", 0)
        else:
            points = [p for ring in rings for p in ring]
            xs = [x for x, _ in points]
            ys = [y for _, y in points]
            parts = []
            start = 0
            for ring in rings:
                parts.append(start)
                start += len(ring)
            content = struct.pack("<i", shape_type)
            content += struct.pack("<4d", min(xs), min(ys), max(xs), max(ys))
            content += struct.pack("<2i", len(rings), len(points))
            content += struct.pack(f"<{len(parts)}i", *parts)
            for x, y in points:
                content += struct.pack("<2d", x, y)
        body += struct.pack(">2i", number, len(content) // 2) + content

    all_points = [
        p
        for rings, st in zip(records, shape_types)
        if st != 0
        for ring in rings
        for p in ring
    ]
    if all_points:
        xs = [x for x, _ in all_points]
        ys = [y for _, y in all_points]
        bbox = (min(xs), min(ys), max(xs), max(ys))
    else:
        bbox = (0.0, 0.0, 0.0, 0.0)

    header = struct.pack(">i", 9994)
    header += struct.pack(">5i", 0, 0, 0, 0, 0)
    header += struct.pack(">i", (100 + len(body)) // 2)
    header += struct.pack("<2i", 1000, file_shape_type)
    header += struct.pack("<4d", *bbox)
    header += struct.pack("<4d", 0.0, 0.0, 0.0, 0.0)
    assert len(header) == 100
    return header + body


def build_dbf(fields: list[tuple[str, str, int]], records: list[list[str]]) -> bytes:
    """Assemble a dBASE III .dbf byte stream from (name, type, length) fields."""
    header_len = 32 + 32 * len(fields) + 1
    record_len = 1 + sum(length for _, _, length in fields)
    out = bytearray()
    out += struct.pack("<4B", 0x03, 95, 7, 26)  # version, last-update Y/M/D
    out += struct.pack("<I", len(records))
    out += struct.pack("<2H", header_len, record_len)
    out += bytes(20)
    for name, ftype, length in fields:
        desc = bytearray(32)
        desc[0:11] = name.encode("ascii")[:11].ljust(11, b"\x00")
        desc[11] = ord(ftype)
        desc[16] = length
        out += desc
    out += b"\x0d"
    for record in records:
        out += b"\x20"
        for (name, ftype, length), value in zip(fields, record):
            raw = str(value).encode("latin-1")
            if ftype in ("N", "F"):
                out += raw.rjust(length)[:length]
            else:
                out += raw.ljust(length)[:length]
    out += b"\x1a"
    return bytes(out)


# --- engineered tables -------------------------------------------------------

def make_table(names_kinds: list[tuple[str, str]], rows: list[list],
               key_column: str | None = None) -> AttributeTable:
    return AttributeTable(
        columns=[Column(n, k) for n, k in names_kinds],
        rows=[list(r) for r in rows],
        key_column=key_column,
    )


def figure9_table() -> AttributeTable:
    """83 rows engineered so induction reproduces the reference tree:

    root TotalPersonalIncome < 11713160, an Employed split at 18.88 below
    it with leaves Y (2/0) and N (61/1), and a pure Y (19/0) leaf above.
    Values are chosen so both midpoints are exact in binary floating point.
    """
    emp_lo = 18.88 - 0.25  # midpoint of (emp_lo, emp_hi) is exactly 18.88
    emp_hi = 18.88 + 0.25
    rows = []
    for _ in range(2):  # low income, low employment: sprawl
        rows.append([11713110.0, emp_lo, "Y"])
    rows.append([11713110.0, emp_hi, "Y"])  # the one stray Y in the N region
    for _ in range(61):
        rows.append([11713110.0, emp_hi, "N"])
    for _ in range(19):  # high income: sprawl
        rows.append([11713210.0, emp_hi, "Y"])
    return make_table(
        [("TotalPersonalIncome", CONTINUOUS), ("Employed", CONTINUOUS),
         ("Target", CATEGORICAL)],
        rows,
    )


def four_row_table() -> AttributeTable:
    """One attribute 1..4; classes N,N,Y,Y: gain 1 bit and gain ratio 1 at 2.5."""
    return make_table(
        [("X", CONTINUOUS), ("Target", CATEGORICAL)],
        [[1.0, "N"], [2.0, "N"], [3.0, "Y"], [4.0, "Y"]],
    )


def scenario_table() -> AttributeTable:
    """20 counties whose density splits perfectly at 420 and whose housing
    and electric-heating bins co-occur, driving both paper scenarios."""
    rows = []
    for i in range(12):  # sprawl counties
        rows.append(
            [f"S{i:02d}", 440.0, 60000.0 + 4000.0 * i, 8000.0 + 800.0 * i, "Y"]
        )
    for i in range(8):  # quiet counties
        rows.append(
            [f"Q{i:02d}", 400.0, 30000.0 + 1500.0 * i, 24000.0 + 2500.0 * i, "N"]
        )
    return make_table(
        [
            ("FIPS", TEXT),
            ("PopulationDensity", CONTINUOUS),
            ("HousingUnits", CONTINUOUS),
            ("ElectricHeating", CONTINUOUS),
            ("Target", CATEGORICAL),
        ],
        rows,
        key_column="FIPS",
    )


SCENARIO_CUTS = {
    "HousingUnits": [50000.0, 150000.0],
    "ElectricHeating": [20000.0, 50000.0],
}


def scenario_bundle() -> ModelBundle:
    """Single-tree bundle over scenario_table with the paper's bin boundaries."""
    import warnings

    from sprawlkit.discretize import BinningWarning

    with warnings.catch_warnings():
        # PopulationDensity has two distinct values by design: two bins.
        warnings.simplefilter("ignore", BinningWarning)
        return train_bundle(
            scenario_table(),
            "Target",
            method="tree",
            params=TrainParams(seed=7, pruning_holdout_fraction=0.0),
            mining=MiningParams(min_support=0.2, min_confidence=0.7),
            explicit_cuts=SCENARIO_CUTS,
        )


def rule_golden_dataset() -> TokenizedDataset:
    """Transactions engineered so birth-rate, gas-station and sprawl tokens
    co-occur above any reasonable thresholds."""
    dense = frozenset(
        {"BirthRate_Range2", "GasolineStations_Range2", "Target_Sprawl"}
    )
    sparse = frozenset(
        {"BirthRate_Range3", "GasolineStations_Range3", "Target_NoSprawl"}
    )
    transactions = tuple([dense] * 8 + [sparse] * 2)
    return TokenizedDataset(
        transactions=transactions,
        vocabulary=frozenset(chain.from_iterable(transactions)),
        provenance=tuple(range(10)),
    )


# --- independent oracles -----------------------------------------------------

def brute_force_itemsets(transactions, min_support: float) -> dict[tuple, int]:
    """Exhaustive frequent-itemset enumeration over the whole powerset."""
    items = sorted(set(chain.from_iterable(transactions)))
    n = len(transactions)
    out = {}
    for size in range(1, len(items) + 1):
        for combo in combinations(items, size):
            cset = frozenset(combo)
            count = sum(1 for t in transactions if cset <= t)
            if count / n >= min_support:
                out[combo] = count
    return out


def oracle_best_split(columns: dict[str, list[float]], labels: list[str],
                      attrs: list[str], min_leaf: int):
    """Independent re-derivation of the split choice on complete data:
    enumerate midpoint candidates, keep positive gains reaching the mean
    positive gain, then maximize gain ratio with (ratio, gain, attribute
    order, threshold) tie-breaks. Returns (attribute, threshold) or None.
    """
    candidates = []
    for order, attr in enumerate(attrs):
        values = columns[attr]
        distinct = sorted(set(values))
        for a, b in zip(distinct, distinct[1:]):
            threshold = (a + b) / 2.0
            left_n = sum(1 for v in values if v < threshold)
            right_n = len(values) - left_n
            if left_n < min_leaf or right_n < min_leaf:
                continue
            gain, ratio = brute_force_gain(values, labels, threshold)
            if gain <= 0.0:
                continue
            candidates.append((order, attr, threshold, gain, ratio))
    if not candidates:
        return None
    mean_gain = sum(c[3] for c in candidates) / len(candidates)
    eligible = [c for c in candidates if c[3] >= mean_gain - 1e-12]
    eligible.sort(key=lambda c: (-c[4], -c[3], c[0], c[2]))
    return eligible[0][1], eligible[0][2]


def brute_force_gain(values: list[float], labels: list[str],
                     threshold: float) -> tuple[float, float]:
    """(information gain, gain ratio) for one binary threshold split,
    computed from first principles with no shared code."""

    def entropy(subset: list[str]) -> float:
        if not subset:
            return 0.0
        total = len(subset)
        result = 0.0
        for cls in set(subset):
            p = subset.count(cls) / total
            result -= p * math.log2(p)
        return result

    left = [c for v, c in zip(values, labels) if v < threshold]
    right = [c for v, c in zip(values, labels) if v >= threshold]
    n = len(labels)
    gain = entropy(labels) - (
        len(left) / n * entropy(left) + len(right) / n * entropy(right)
    )
    split_info = 0.0
    for part in (left, right):
        if part:
            p = len(part) / n
            split_info -= p * math.log2(p)
    ratio = gain / split_info if split_info > 0 else 0.0
    return gain, ratio
