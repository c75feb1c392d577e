"""County GIS ingestion: shapefile geometry, DBF and CSV attribute tables.

Re-implements the interactive GIS preprocessing as a deterministic pipeline:
parse polygon geometry from ``.shp`` bytes, attribute rows from ``.dbf`` or
CSV text, and inner-join attribute data onto geometry keys.

Binary layouts follow the ESRI shapefile technical description (big-endian
main-file header fields, little-endian record contents) and the classic
dBASE III/IV table layout.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import struct
from dataclasses import dataclass

from .errors import (
    BadFieldTypeError,
    BadMagicError,
    DuplicateKeyError,
    HeaderMismatchError,
    MissingKeyColumnError,
    RaggedRowError,
    TruncatedError,
    UnsupportedShapeTypeError,
)

logger = logging.getLogger(__name__)

SHAPEFILE_MAGIC = 9994
SHAPEFILE_VERSION = 1000
SHAPE_NULL = 0
SHAPE_POLYGON = 5

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"
TEXT = "text"

#: Cell sentinel for missing values. Continuous cells are float or MISSING,
#: never silently zero.
MISSING = None


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # continuous | categorical | text

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, CATEGORICAL, TEXT):
            raise ValueError(f"unknown column kind {self.kind!r}")


@dataclass
class AttributeTable:
    """Rectangular county-by-attribute table with typed columns.

    ``key_column`` names the join/identifier column (e.g. a 5-digit county
    FIPS code); it may be None for tables that are never joined.
    """

    columns: list[Column]
    rows: list[list]
    key_column: str | None = None

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise RaggedRowError(f"row {i} has {len(row)} cells, expected {width}")
        for j, col in enumerate(self.columns):
            if col.kind != CONTINUOUS:
                continue
            for i, row in enumerate(self.rows):
                cell = row[j]
                if cell is MISSING:
                    continue
                if not isinstance(cell, float) or not math.isfinite(cell):
                    raise ValueError(
                        f"continuous cell ({i}, {col.name}) is not a finite number: {cell!r}"
                    )
        if self.key_column is not None:
            self._check_key(self.key_column)

    def _check_key(self, key: str) -> None:
        if key not in self.column_names():
            raise MissingKeyColumnError(f"key column {key!r} not in table")
        seen = set()
        for value in self.values(key):
            if value in seen:
                raise DuplicateKeyError(f"duplicate key {value!r}")
            seen.add(value)

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise MissingKeyColumnError(f"no column named {name!r}")

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise MissingKeyColumnError(f"no column named {name!r}")

    def values(self, name: str) -> list:
        j = self.column_index(name)
        return [row[j] for row in self.rows]

    def row_dict(self, i: int) -> dict:
        return {c.name: cell for c, cell in zip(self.columns, self.rows[i])}

    def continuous_columns(self) -> list[str]:
        return [c.name for c in self.columns if c.kind == CONTINUOUS]

    def subset(self, row_indices: list[int]) -> "AttributeTable":
        """New table holding the given rows (duplicates allowed, key unset)."""
        return AttributeTable(
            columns=list(self.columns),
            rows=[list(self.rows[i]) for i in row_indices],
            key_column=None,
        )

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class CountyGeometry:
    """One county polygon: closed lon/lat rings plus its bounding box."""

    record_id: int
    rings: tuple[tuple[tuple[float, float], ...], ...]
    bbox: tuple[float, float, float, float]  # min_lon, min_lat, max_lon, max_lat
    key: str | None = None
    name: str | None = None

    def __post_init__(self):
        for ring in self.rings:
            if len(ring) < 4:
                raise ValueError(f"ring with {len(ring)} points; need >= 4")
            if ring[0] != ring[-1]:
                raise ValueError("ring is not closed")
            for x, y in ring:
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise ValueError("non-finite coordinate")
        min_lon, min_lat, max_lon, max_lat = self.bbox
        for ring in self.rings:
            for x, y in ring:
                if not (min_lon <= x <= max_lon and min_lat <= y <= max_lat):
                    raise ValueError("bbox does not enclose ring point")

    def with_identity(self, key: str, name: str) -> "CountyGeometry":
        return CountyGeometry(self.record_id, self.rings, self.bbox, key, name)


@dataclass(frozen=True)
class LabeledRegionSet:
    """County geometries plus a per-key sprawl label for one year."""

    geometries: tuple[CountyGeometry, ...]
    labels: dict  # key -> "Y" | "N"
    year: int

    def __post_init__(self):
        keys = [g.key for g in self.geometries]
        if len(set(keys)) != len(keys):
            raise DuplicateKeyError("geometry keys are not unique")
        known = set(keys)
        for key, label in self.labels.items():
            if key not in known:
                raise KeyError(f"label key {key!r} matches no geometry")
            if label not in ("Y", "N"):
                raise ValueError(f"label for {key!r} must be Y or N, got {label!r}")


def _bbox_of(rings) -> tuple[float, float, float, float]:
    xs = [x for ring in rings for x, _ in ring]
    ys = [y for ring in rings for _, y in ring]
    return (min(xs), min(ys), max(xs), max(ys))


def parse_shapefile(shp_bytes: bytes) -> list[CountyGeometry]:
    """Decode a complete .shp byte stream into polygon geometries.

    Only polygon records (shape type 5) are accepted; null records (type 0)
    are skipped. Keys and names are unset; join them on from a DBF or CSV
    table afterwards. Returned order equals record order.
    """
    if len(shp_bytes) < 100:
        raise TruncatedError(f"main header needs 100 bytes, got {len(shp_bytes)}")
    (magic,) = struct.unpack(">i", shp_bytes[0:4])
    if magic != SHAPEFILE_MAGIC:
        raise BadMagicError(f"file code {magic}, expected {SHAPEFILE_MAGIC}")
    (declared_words,) = struct.unpack(">i", shp_bytes[24:28])
    if declared_words * 2 > len(shp_bytes):
        raise TruncatedError(
            f"header declares {declared_words * 2} bytes, only {len(shp_bytes)} available"
        )
    version, file_shape_type = struct.unpack("<2i", shp_bytes[28:36])
    if version != SHAPEFILE_VERSION:
        raise BadMagicError(f"version {version}, expected {SHAPEFILE_VERSION}")
    if file_shape_type not in (SHAPE_NULL, SHAPE_POLYGON):
        raise UnsupportedShapeTypeError(f"file shape type {file_shape_type}")

    geometries: list[CountyGeometry] = []
    offset = 100
    end = declared_words * 2
    while offset < end:
        if offset + 8 > end:
            raise TruncatedError("record header runs past declared file length")
        record_id, content_words = struct.unpack(">2i", shp_bytes[offset : offset + 8])
        offset += 8
        content_len = content_words * 2
        if offset + content_len > end:
            raise TruncatedError(f"record {record_id} content runs past file length")
        content = shp_bytes[offset : offset + content_len]
        offset += content_len

        (shape_type,) = struct.unpack("<i", content[0:4])
        if shape_type == SHAPE_NULL:
            continue
        if shape_type != SHAPE_POLYGON:
            raise UnsupportedShapeTypeError(
                f"record {record_id} has shape type {shape_type}"
            )
        if len(content) < 44:
            raise TruncatedError(f"record {record_id} polygon header truncated")
        num_parts, num_points = struct.unpack("<2i", content[36:44])
        need = 44 + num_parts * 4 + num_points * 16
        if len(content) < need:
            raise TruncatedError(f"record {record_id} needs {need} bytes, has {len(content)}")
        parts = struct.unpack(f"<{num_parts}i", content[44 : 44 + num_parts * 4])
        pts_off = 44 + num_parts * 4
        points = [
            struct.unpack("<2d", content[pts_off + k * 16 : pts_off + (k + 1) * 16])
            for k in range(num_points)
        ]
        rings = []
        for p, start in enumerate(parts):
            stop = parts[p + 1] if p + 1 < num_parts else num_points
            rings.append(tuple((x, y) for x, y in points[start:stop]))
        geometries.append(
            CountyGeometry(record_id=record_id, rings=tuple(rings), bbox=_bbox_of(rings))
        )
    return geometries


# DBF field type characters we accept; N and F become continuous columns.
_DBF_NUMERIC = {"N", "F"}
_DBF_TEXTUAL = {"C", "D", "L"}


def parse_dbf(dbf_bytes: bytes, key_column: str | None = None) -> AttributeTable:
    """Decode a dBASE III/IV .dbf byte stream into an AttributeTable.

    Deleted records (flag 0x2A) are skipped; blank cells become the missing
    sentinel. Text bytes are passed through as Latin-1.
    """
    if len(dbf_bytes) < 32:
        raise TruncatedError(f"DBF header needs 32 bytes, got {len(dbf_bytes)}")
    (record_count,) = struct.unpack("<I", dbf_bytes[4:8])
    header_len, record_len = struct.unpack("<2H", dbf_bytes[8:12])
    if len(dbf_bytes) < header_len:
        raise TruncatedError("declared header length exceeds bytes available")

    fields: list[tuple[str, str, int]] = []
    pos = 32
    while pos < header_len and dbf_bytes[pos] != 0x0D:
        if pos + 32 > len(dbf_bytes):
            raise TruncatedError("field descriptor truncated")
        desc = dbf_bytes[pos : pos + 32]
        name = desc[:11].split(b"\x00", 1)[0].decode("latin-1").strip()
        ftype = chr(desc[11])
        flen = desc[16]
        if ftype in _DBF_NUMERIC:
            kind = CONTINUOUS
        elif ftype in _DBF_TEXTUAL:
            kind = TEXT
        else:
            raise BadFieldTypeError(f"field {name!r} has unknown type {ftype!r}")
        fields.append((name, kind, flen))
        pos += 32

    expected_record_len = 1 + sum(flen for _, _, flen in fields)
    if record_len != expected_record_len:
        raise HeaderMismatchError(
            f"declared record length {record_len} != 1 + field lengths {expected_record_len - 1}"
        )

    columns = [Column(name, kind) for name, kind, _ in fields]
    rows: list[list] = []
    pos = header_len
    for _ in range(record_count):
        if pos + record_len > len(dbf_bytes):
            raise TruncatedError("record area truncated")
        raw = dbf_bytes[pos : pos + record_len]
        pos += record_len
        if raw[0] == 0x2A:  # deleted
            continue
        row: list = []
        cell_off = 1
        for name, kind, flen in fields:
            text = raw[cell_off : cell_off + flen].decode("latin-1").strip()
            cell_off += flen
            if not text:
                row.append(MISSING)
            elif kind == CONTINUOUS:
                try:
                    value = float(text)
                except ValueError as exc:
                    raise BadFieldTypeError(f"cell {text!r} in numeric field {name!r}") from exc
                if not math.isfinite(value):
                    raise BadFieldTypeError(f"non-finite value in numeric field {name!r}")
                row.append(value)
            else:
                row.append(text)
        rows.append(row)
    return AttributeTable(columns=columns, rows=rows, key_column=key_column)


def _as_number(text: str) -> float | None:
    """Parse a finite number or return None. inf/nan spellings do not count."""
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def parse_csv(
    csv_text: str,
    key_column: str,
    target_column: str | None = None,
) -> AttributeTable:
    """Parse header-first CSV text into an AttributeTable.

    Columns whose non-missing cells all parse as finite numbers become
    continuous; the target column becomes categorical; the key column and
    everything else stay text. Empty cells become the missing sentinel.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise RaggedRowError("CSV input is empty") from None
    if key_column not in header:
        raise MissingKeyColumnError(f"key column {key_column!r} not in header")
    if target_column is not None and target_column not in header:
        raise MissingKeyColumnError(f"target column {target_column!r} not in header")

    raw_rows: list[list[str]] = []
    for i, row in enumerate(reader):
        if len(row) != len(header):
            raise RaggedRowError(f"row {i + 2} has {len(row)} cells, expected {len(header)}")
        raw_rows.append(row)

    columns: list[Column] = []
    numeric: list[bool] = []
    for j, name in enumerate(header):
        cells = [r[j] for r in raw_rows if r[j] != ""]
        if name == key_column:
            columns.append(Column(name, TEXT))
            numeric.append(False)
        elif name == target_column:
            columns.append(Column(name, CATEGORICAL))
            numeric.append(False)
        elif cells and all(_as_number(c) is not None for c in cells):
            columns.append(Column(name, CONTINUOUS))
            numeric.append(True)
        else:
            columns.append(Column(name, TEXT))
            numeric.append(False)

    rows: list[list] = []
    for raw in raw_rows:
        row: list = []
        for j, cell in enumerate(raw):
            if cell == "":
                row.append(MISSING)
            elif numeric[j]:
                row.append(float(cell))
            else:
                row.append(cell)
        rows.append(row)
    return AttributeTable(columns=columns, rows=rows, key_column=key_column)


@dataclass
class JoinReport:
    """Inner-join result plus the tally of rows dropped for lack of a partner."""

    table: AttributeTable
    unmatched_left: int = 0
    unmatched_right: int = 0

    @property
    def unmatched(self) -> int:
        return self.unmatched_left + self.unmatched_right


def join_tables(left: AttributeTable, right: AttributeTable, key: str) -> JoinReport:
    """Inner-join two tables on key equality.

    Result columns are the left columns followed by the right columns minus
    the duplicated key; other name collisions on the right get a ``_right``
    suffix so column names stay unique. Row order follows the left table.
    """
    for side, table in (("left", left), ("right", right)):
        if key not in table.column_names():
            raise MissingKeyColumnError(f"key {key!r} not in {side} table")
    left._check_key(key)
    right._check_key(key)

    left_names = set(left.column_names())
    right_cols: list[Column] = []
    right_idx: list[int] = []
    for j, col in enumerate(right.columns):
        if col.name == key:
            continue
        name = col.name if col.name not in left_names else f"{col.name}_right"
        right_cols.append(Column(name, col.kind))
        right_idx.append(j)

    right_key = right.column_index(key)
    right_by_key = {row[right_key]: row for row in right.rows}
    left_key = left.column_index(key)

    rows: list[list] = []
    matched_right = set()
    unmatched_left = 0
    for row in left.rows:
        partner = right_by_key.get(row[left_key])
        if partner is None:
            unmatched_left += 1
            continue
        matched_right.add(row[left_key])
        rows.append(list(row) + [partner[j] for j in right_idx])
    unmatched_right = len(right.rows) - len(matched_right)
    if unmatched_left or unmatched_right:
        logger.warning(
            "join on %r dropped %d left and %d right rows",
            key,
            unmatched_left,
            unmatched_right,
        )
    table = AttributeTable(
        columns=list(left.columns) + right_cols,
        rows=rows,
        key_column=key,
    )
    return JoinReport(table, unmatched_left, unmatched_right)


def label_geometries(
    geometries: list[CountyGeometry],
    table: AttributeTable,
    key_column: str,
    name_column: str,
) -> list[CountyGeometry]:
    """Attach keys and names to shapefile geometries by record order.

    The .dbf sidecar rows are positional: row i describes shapefile record i.
    """
    if len(geometries) != len(table.rows):
        raise HeaderMismatchError(
            f"{len(geometries)} geometries but {len(table.rows)} attribute rows"
        )
    keys = table.values(key_column)
    names = table.values(name_column)
    return [
        g.with_identity(str(k), str(n))
        for g, k, n in zip(geometries, keys, names)
    ]
