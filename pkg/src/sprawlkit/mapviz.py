"""Choropleth GeoJSON export of per-county sprawl labels.

Counties with sprawl are filled red, counties without green, matching the
year-by-year maps the toolkit reproduces. Shapefile ring winding (clockwise
exterior) is normalized to the GeoJSON convention (counterclockwise
exterior, clockwise holes) on export.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import KeyMismatchError, MissingLabelError
from .geo_ingest import CountyGeometry, LabeledRegionSet

FILL_SPRAWL = "#d73027"
FILL_NO_SPRAWL = "#1a9850"


@dataclass(frozen=True)
class ChoroplethDocument:
    year: int
    features: tuple[dict, ...]

    def to_obj(self) -> dict:
        return {
            "type": "FeatureCollection",
            "year": self.year,
            "features": list(self.features),
        }

    def to_text(self) -> str:
        return json.dumps(self.to_obj())


def _signed_area(ring) -> float:
    area = 0.0
    for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
        area += x1 * y2 - x2 * y1
    return area / 2.0


def _oriented(ring, counterclockwise: bool) -> list[list[float]]:
    points = list(ring)
    area = _signed_area(points)
    if (area < 0) == counterclockwise:
        points.reverse()
    return [[x, y] for x, y in points]


def _polygon_coordinates(geometry: CountyGeometry) -> list[list[list[float]]]:
    """First ring is the exterior (CCW); any further rings are holes (CW)."""
    coords = [_oriented(geometry.rings[0], counterclockwise=True)]
    for ring in geometry.rings[1:]:
        coords.append(_oriented(ring, counterclockwise=False))
    return coords


def export_geojson(regions: LabeledRegionSet) -> str:
    """Serialize one year's labeled counties as a GeoJSON FeatureCollection.

    Features are ordered by key and coordinates are emitted at full
    precision, so output is deterministic and re-parses losslessly.
    """
    features = []
    for geometry in sorted(regions.geometries, key=lambda g: g.key):
        label = regions.labels.get(geometry.key)
        if label is None:
            raise MissingLabelError(f"no label for county {geometry.key!r}")
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": _polygon_coordinates(geometry),
                },
                "properties": {
                    "key": geometry.key,
                    "name": geometry.name,
                    "sprawl": label,
                    "fill": FILL_SPRAWL if label == "Y" else FILL_NO_SPRAWL,
                },
            }
        )
    return ChoroplethDocument(year=regions.year, features=tuple(features)).to_text()


def diff_years(a: LabeledRegionSet, b: LabeledRegionSet) -> list[tuple[str, str, str]]:
    """Counties whose labels differ between two years, sorted by key."""
    if set(a.labels) != set(b.labels):
        raise KeyMismatchError("label key sets differ between years")
    return sorted(
        (key, a.labels[key], b.labels[key])
        for key in a.labels
        if a.labels[key] != b.labels[key]
    )
