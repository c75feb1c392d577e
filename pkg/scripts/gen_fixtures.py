#!/usr/bin/env python3
"""Generate the bundled New York fixture data (deterministic, seeded).

Writes into src/sprawlkit/data/:
  ny_sprawl.csv      62 counties x 27 attributes + Target
  ny_labels.json     per-year sprawl labels; 2000 -> 2010 flips exactly
                     Putnam, Orange, Dutchess, Saratoga and Ontario to Y
  ny_counties.shp    62 synthetic square county polygons (grid layout)
  ny_counties.dbf    GEOID/NAME sidecar in shapefile record order

Attribute provenance: Employed, Unemployed, FarmLand, MeanTravelTime,
TotalAccident, Poverty, Gasoline and TruckTrans are transcribed column
names; the remaining 19 are reconstructed descriptively. All cell values
are synthesized here (the original workbook is not published); sprawl
counties get correlated-but-noisy high or low draws per attribute so the
miners find realistic structure without combinatorial blowups.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from support import build_dbf, build_shp  # noqa: E402

DATA_DIR = ROOT / "src" / "sprawlkit" / "data"

NY_COUNTIES = [
    ("36001", "Albany"), ("36003", "Allegany"), ("36005", "Bronx"),
    ("36007", "Broome"), ("36009", "Cattaraugus"), ("36011", "Cayuga"),
    ("36013", "Chautauqua"), ("36015", "Chemung"), ("36017", "Chenango"),
    ("36019", "Clinton"), ("36021", "Columbia"), ("36023", "Cortland"),
    ("36025", "Delaware"), ("36027", "Dutchess"), ("36029", "Erie"),
    ("36031", "Essex"), ("36033", "Franklin"), ("36035", "Fulton"),
    ("36037", "Genesee"), ("36039", "Greene"), ("36041", "Hamilton"),
    ("36043", "Herkimer"), ("36045", "Jefferson"), ("36047", "Kings"),
    ("36049", "Lewis"), ("36051", "Livingston"), ("36053", "Madison"),
    ("36055", "Monroe"), ("36057", "Montgomery"), ("36059", "Nassau"),
    ("36061", "New York"), ("36063", "Niagara"), ("36065", "Oneida"),
    ("36067", "Onondaga"), ("36069", "Ontario"), ("36071", "Orange"),
    ("36073", "Orleans"), ("36075", "Oswego"), ("36077", "Otsego"),
    ("36079", "Putnam"), ("36081", "Queens"), ("36083", "Rensselaer"),
    ("36085", "Richmond"), ("36087", "Rockland"), ("36089", "St. Lawrence"),
    ("36091", "Saratoga"), ("36093", "Schenectady"), ("36095", "Schoharie"),
    ("36097", "Schuyler"), ("36099", "Seneca"), ("36101", "Steuben"),
    ("36103", "Suffolk"), ("36105", "Sullivan"), ("36107", "Tioga"),
    ("36109", "Tompkins"), ("36111", "Ulster"), ("36113", "Warren"),
    ("36115", "Washington"), ("36117", "Wayne"), ("36119", "Westchester"),
    ("36121", "Wyoming"), ("36123", "Yates"),
]

SPRAWL_2010 = {
    "36001", "36005", "36027", "36029", "36047", "36055", "36059", "36061",
    "36067", "36069", "36071", "36079", "36081", "36085", "36087", "36091",
    "36103", "36119",
}
# Five counties flipped N -> Y between 2000 and 2010.
FLIPPED_2010 = {"36079", "36071", "36027", "36091", "36069"}
SPRAWL_2000 = SPRAWL_2010 - FLIPPED_2010

# (name, sprawl-range, non-sprawl-range, decimals, mix): with probability
# `mix` a county draws from the other group's range, keeping the mined
# itemsets shallow enough for desk-scale Apriori.
ATTRIBUTES = [
    ("PopulationDensity", (450, 72000), (15, 415), 1, 0.05),
    ("TotalPersonalIncome", (12_000_000, 900_000_000), (500_000, 11_500_000), 0, 0.10),
    ("Income", (10.5, 28.0), (3.0, 10.0), 2, 0.15),
    ("HousingUnits", (105_000, 900_000), (8_000, 98_000), 0, 0.05),
    ("ElectricHeating", (2_000, 19_000), (21_000, 48_000), 0, 0.20),
    ("BirthRate", (8.0, 11.4), (11.6, 16.0), 2, 0.20),
    ("GasolineStations", (40, 160), (170, 600), 0, 0.05),
    ("Asians", (5.0, 30.0), (0.2, 4.8), 2, 0.15),
    ("WhitePeople", (45.0, 82.0), (83.0, 98.0), 2, 0.20),
    ("ForeignBorn", (5.5, 30.0), (0.5, 5.0), 2, 0.20),
    ("Employed", (38.0, 55.0), (33.0, 50.0), 2, 0.50),
    ("Unemployed", (1.5, 3.1), (1.5, 3.1), 2, 0.50),
    ("FarmLand", (0.0, 50.0), (40.0, 180.0), 1, 0.25),
    ("MeanTravelTime", (25.0, 42.0), (9.0, 24.0), 1, 0.30),
    ("TotalAccident", (4_500, 49_000), (900, 4_400), 0, 0.30),
    ("Poverty", (7.0, 25.0), (7.0, 25.0), 2, 0.50),
    ("Gasoline", (15_000, 90_000), (1_000, 14_500), 0, 0.30),
    ("TruckTrans", (25_000, 480_000), (700, 36_000), 0, 0.35),
    ("PublicSupplyWater", (9.0, 18.0), (9.0, 18.0), 1, 0.50),
    ("HouseholdSize", (2.2, 3.2), (2.2, 3.2), 2, 0.50),
    ("BirthsPerDeath", (0.8, 2.4), (0.8, 2.4), 2, 0.50),
    ("Education", (75.0, 95.0), (75.0, 95.0), 1, 0.50),
    ("Transit", (4.0, 32.0), (0.1, 3.9), 2, 0.35),
    ("RoadDensity", (2.5, 9.0), (0.4, 2.4), 2, 0.35),
    ("ParkingArea", (1.5, 12.0), (0.05, 1.4), 2, 0.35),
    ("CommercialUnits", (2_800, 60_000), (150, 2_700), 0, 0.35),
    ("MedianAge", (33.0, 45.0), (33.0, 45.0), 1, 0.50),
]

# A few blank cells in the noise columns, like the original partial snapshot.
MISSING_CELLS = [(9, "Poverty"), (24, "MedianAge"), (39, "HouseholdSize"),
                 (54, "Education")]


def fmt(value: float, decimals: int) -> str:
    if decimals == 0:
        return str(int(round(value)))
    return f"{round(value, decimals):.{decimals}f}"


def gen_csv(rng: random.Random) -> str:
    header = ["FIPS", "County"] + [a[0] for a in ATTRIBUTES] + ["Target"]
    lines = [",".join(header)]
    name_index = {a[0]: i for i, a in enumerate(ATTRIBUTES)}
    for row_i, (fips, name) in enumerate(NY_COUNTIES):
        sprawl = fips in SPRAWL_2010
        cells = [fips, name]
        for attr, hi_range, lo_range, decimals, mix in ATTRIBUTES:
            own, other = (hi_range, lo_range) if sprawl else (lo_range, hi_range)
            source = other if rng.random() < mix else own
            cells.append(fmt(rng.uniform(*source), decimals))
        cells.append("Y" if sprawl else "N")
        lines.append(",".join(cells))
    rows = [line.split(",") for line in lines]
    for row_i, attr in MISSING_CELLS:
        rows[row_i + 1][2 + name_index[attr]] = ""
    return "\n".join(",".join(r) for r in rows) + "\n"


def gen_labels() -> dict:
    return {
        "2000": {fips: ("Y" if fips in SPRAWL_2000 else "N") for fips, _ in NY_COUNTIES},
        "2010": {fips: ("Y" if fips in SPRAWL_2010 else "N") for fips, _ in NY_COUNTIES},
    }


def county_square(index: int) -> list[tuple[float, float]]:
    col, row = index % 8, index // 8
    lon0 = -79.5 + col * 0.95
    lat0 = 40.6 + row * 0.52
    w, h = 0.85, 0.46
    # Clockwise ring: the shapefile convention for exterior rings.
    return [
        (lon0, lat0),
        (lon0, lat0 + h),
        (lon0 + w, lat0 + h),
        (lon0 + w, lat0),
        (lon0, lat0),
    ]


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20100815)

    csv_text = gen_csv(rng)
    (DATA_DIR / "ny_sprawl.csv").write_text(csv_text, encoding="utf-8")

    labels = gen_labels()
    (DATA_DIR / "ny_labels.json").write_text(
        json.dumps(labels, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    rings = [[county_square(i)] for i in range(len(NY_COUNTIES))]
    (DATA_DIR / "ny_counties.shp").write_bytes(build_shp(rings))
    dbf = build_dbf(
        [("GEOID", "C", 5), ("NAME", "C", 24)],
        [[fips, name] for fips, name in NY_COUNTIES],
    )
    (DATA_DIR / "ny_counties.dbf").write_bytes(dbf)

    flips = sorted(FLIPPED_2010)
    print(f"wrote {len(NY_COUNTIES)} counties; 2000->2010 flips: {flips}")


if __name__ == "__main__":
    main()
