from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent.parent / "src" / "sprawlkit" / "data"
GOLDEN_DIR = Path(__file__).parent / "goldens"


@pytest.fixture(scope="session")
def ny_csv_path() -> Path:
    return DATA_DIR / "ny_sprawl.csv"


@pytest.fixture(scope="session")
def ny_labels_path() -> Path:
    return DATA_DIR / "ny_labels.json"


@pytest.fixture(scope="session")
def ny_shp_path() -> Path:
    return DATA_DIR / "ny_counties.shp"


@pytest.fixture(scope="session")
def ny_dbf_path() -> Path:
    return DATA_DIR / "ny_counties.dbf"


@pytest.fixture(scope="session")
def ny_table(ny_csv_path):
    from sprawlkit.geo_ingest import parse_csv

    return parse_csv(
        ny_csv_path.read_text(encoding="utf-8"),
        key_column="FIPS",
        target_column="Target",
    )
