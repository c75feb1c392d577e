"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest -s`` or ``-rA`` to see them inline).

Tolerances are pinned here and nowhere else: support/confidence recompute
to 1e-12, entropy/gain oracles to 1e-9, boosting weight sums to 1e-12,
Apriori oracle sweep under 10 s, end-to-end train+mine+serve under 5 s.
"""

from __future__ import annotations

import json
import math
import random
import socket
import struct
import threading
import time
from contextlib import contextmanager
from itertools import chain
from pathlib import Path

import pytest
from support import (
    brute_force_gain,
    brute_force_itemsets,
    build_shp,
    figure9_table,
    four_row_table,
    oracle_best_split,
    rule_golden_dataset,
    scenario_bundle,
    scenario_table,
)

from sprawlkit.discretize import TokenizedDataset
from sprawlkit.dtree import (
    PERFECT_ROUND_WEIGHT,
    TrainParams,
    bagging_fit,
    boosting_fit,
    build_tree,
    predict,
    reduced_error_prune,
    render_tree,
    split_stats,
)
from sprawlkit.engine import predict_sprawl, query_impact
from sprawlkit.errors import BadMagicError, TruncatedError
from sprawlkit.geo_ingest import (
    CATEGORICAL,
    CONTINUOUS,
    AttributeTable,
    Column,
    parse_dbf,
    parse_shapefile,
)
from sprawlkit.mapviz import diff_years
from sprawlkit.rulemine import frequent_itemsets, generate_rules

GOLDEN_DIR = Path(__file__).parent / "goldens"


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


def _random_tokens_dataset(rng: random.Random) -> TokenizedDataset:
    n_items = rng.randint(1, 8)
    items = [f"I{k}" for k in range(n_items)]
    transactions = tuple(
        frozenset(rng.sample(items, rng.randint(1, n_items)))
        for _ in range(rng.randint(1, 12))
    )
    return TokenizedDataset(
        transactions=transactions,
        vocabulary=frozenset(chain.from_iterable(transactions)),
        provenance=tuple(range(len(transactions))),
    )


def _random_table(rng: random.Random, n_rows: int, n_attrs: int,
                  grid: bool = False) -> AttributeTable:
    columns = [Column(f"A{j}", CONTINUOUS) for j in range(n_attrs)]
    columns.append(Column("Target", CATEGORICAL))
    rows = []
    for _ in range(n_rows):
        cells: list = [
            float(rng.randint(0, 4)) if grid else rng.uniform(0.0, 100.0)
            for _ in range(n_attrs)
        ]
        cells.append(rng.choice(["Y", "N"]))
        rows.append(cells)
    return AttributeTable(columns=columns, rows=rows)


def test_apriori_oracle_equivalence():
    """200 random datasets: frequent_itemsets == exhaustive enumeration, <10s."""
    with criterion("Apriori oracle equivalence (200 random datasets, <10 s)"):
        rng = random.Random(20100815)
        started = time.perf_counter()
        for _ in range(200):
            data = _random_tokens_dataset(rng)
            min_support = rng.choice([i / 10 for i in range(1, 10)])
            expected = brute_force_itemsets(data.transactions, min_support)
            got = {
                fi.items: fi.support_count
                for fi in frequent_itemsets(data, min_support)
            }
            assert got == expected
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"oracle sweep took {elapsed:.1f}s"


def test_rule_soundness_and_figure_rendering(ny_table):
    """Recomputed support/confidence within 1e-12 on every fixture; the
    engineered fixture renders the reference rule byte-exactly."""
    with criterion("Rule soundness + reference rule rendering"):
        from sprawlkit.discretize import fit_binning, tokenize

        fixtures = [rule_golden_dataset()]
        scheme = fit_binning(ny_table, ny_table.continuous_columns(), 3)
        fixtures.append(tokenize(ny_table, scheme, "Target"))
        rng = random.Random(8)
        fixtures.extend(_random_tokens_dataset(rng) for _ in range(20))

        for data in fixtures:
            n = len(data.transactions)
            itemsets = frequent_itemsets(data, 0.2)
            rules = generate_rules(itemsets, 0.7)
            for rule in rules:
                joint = frozenset(rule.antecedent) | frozenset(rule.consequent)
                joint_count = sum(1 for t in data.transactions if joint <= t)
                ant_count = sum(
                    1 for t in data.transactions
                    if frozenset(rule.antecedent) <= t
                )
                assert abs(rule.support - joint_count / n) <= 1e-12
                assert abs(rule.confidence - joint_count / ant_count) <= 1e-12
                assert rule.support >= 0.2
                assert rule.confidence >= 0.7

        rendered = [
            r.render()
            for r in generate_rules(frequent_itemsets(rule_golden_dataset(), 0.5), 0.7)
        ]
        assert "BirthRate_Range2 -> GasolineStations_Range2 Target_Sprawl" in rendered


def test_entropy_gain_oracle():
    """Split gain/ratio match brute force within 1e-9 on every node of every
    <=20-row fixture; the 4-row example yields exactly 1.0 bit."""
    with criterion("Entropy/gain oracle (1e-9) incl. exact 4-row gain"):
        gain, ratio = split_stats([1.0, 2.0, 3.0, 4.0], ["N", "N", "Y", "Y"], 2.5)
        assert gain == 1.0 and ratio == 1.0
        tree = build_tree(four_row_table(), "Target", TrainParams(min_leaf_instances=1))
        assert tree.root.threshold == 2.5

        fixtures = [four_row_table(), scenario_table()]
        fixtures += [_random_table(random.Random(s), random.Random(s).randint(4, 20), 2)
                     for s in range(20)]
        for table in fixtures:
            assert len(table.rows) <= 20
            labels = table.values("Target")
            predictors = table.continuous_columns()
            columns = {a: table.values(a) for a in predictors}
            built = build_tree(table, "Target", TrainParams(min_leaf_instances=1))

            def walk(node, indices):
                if not hasattr(node, "attribute"):
                    return
                node_labels = [labels[i] for i in indices]
                node_columns = {
                    a: [columns[a][i] for i in indices] for a in predictors
                }
                choice = oracle_best_split(node_columns, node_labels, predictors, 1)
                assert choice == (node.attribute, node.threshold)
                impl = split_stats(
                    node_columns[node.attribute], node_labels, node.threshold
                )
                brute = brute_force_gain(
                    node_columns[node.attribute], node_labels, node.threshold
                )
                assert abs(impl[0] - brute[0]) <= 1e-9
                assert abs(impl[1] - brute[1]) <= 1e-9
                left = [i for i in indices
                        if columns[node.attribute][i] < node.threshold]
                right = [i for i in indices
                         if columns[node.attribute][i] >= node.threshold]
                walk(node.left, left)
                walk(node.right, right)

            walk(built.root, list(range(len(table.rows))))


def test_tree_goldens():
    """The engineered threshold fixture reproduces the committed tree text."""
    with criterion("Tree goldens (root threshold + rendered text)"):
        tree = build_tree(figure9_table(), "Target", TrainParams())
        assert tree.root.attribute == "TotalPersonalIncome"
        assert tree.root.threshold == 11713160.0
        text = render_tree(tree)
        assert text == (GOLDEN_DIR / "figure9_tree.txt").read_text()
        assert "TotalPersonalIncome < 11713160" in text
        assert "(19/0)" in text
        assert text.rstrip().endswith("Size of the tree : 5")


def test_pruning_never_increases_error():
    """Reduced-error pruning never increases pruning-set error (100 pairs)."""
    with criterion("Pruning property (100 random tree/pruning-set pairs)"):
        checked = 0
        for seed in range(100):
            rng = random.Random(31337 + seed)
            train = _random_table(rng, rng.randint(10, 40), rng.randint(1, 3),
                                  grid=True)
            prune = _random_table(rng, rng.randint(5, 20),
                                  len(train.continuous_columns()), grid=True)
            tree = build_tree(train, "Target", TrainParams(min_leaf_instances=1))
            pruned = reduced_error_prune(tree, prune)

            def pruning_errors(t):
                wrong = 0
                for i in range(len(prune.rows)):
                    row = prune.row_dict(i)
                    instance = {k: v for k, v in row.items() if k != "Target"}
                    if predict(t, instance).label != row["Target"]:
                        wrong += 1
                return wrong

            assert pruning_errors(pruned) <= pruning_errors(tree)
            checked += 1
        assert checked == 100


def test_ensemble_determinism_and_boosting_invariants(ny_table):
    """Same seed -> bit-identical ensembles; boosting weights stay a
    probability distribution; the perfect-round early stop is exercised."""
    with criterion("Ensemble determinism + boosting invariants"):
        params = TrainParams(seed=42, rounds=4)
        assert bagging_fit(ny_table, "Target", params) == bagging_fit(
            ny_table, "Target", params
        )
        assert boosting_fit(ny_table, "Target", params) == boosting_fit(
            ny_table, "Target", params
        )

        sums = []
        boosting_fit(
            ny_table,
            "Target",
            TrainParams(seed=3, rounds=6),
            on_round=lambda r, eps, w, weights: sums.append(
                (sum(weights), min(weights))
            ),
        )
        assert sums
        for total, smallest in sums:
            assert abs(total - 1.0) <= 1e-12
            assert smallest >= 0.0

        perfect = boosting_fit(
            four_row_table(), "Target",
            TrainParams(min_leaf_instances=1, rounds=8),
        )
        assert len(perfect.members) == 1
        assert perfect.members[0][1] == PERFECT_ROUND_WEIGHT
        assert math.isfinite(PERFECT_ROUND_WEIGHT)


def test_scenario_goldens():
    """Population-density prediction and housing/electric-heating impact."""
    with criterion('Scenario goldens (54545 -> Y with 420; "less than 20,000")'):
        bundle = scenario_bundle()
        prediction = predict_sprawl(bundle, {"PopulationDensity": 54545})
        assert prediction.label == "Y"
        assert any("420" in item for item in prediction.explanation)

        report = query_impact(bundle, "HousingUnits", "ElectricHeating", 76767)
        assert report.headline == "less than 20,000"
        assert report.rules


def test_parser_fixtures():
    """Hand-built byte fixtures parse; corruption raises the named errors;
    the shapefile round-trip preserves coordinates bit-exactly."""
    with criterion("Parser fixtures (.shp/.dbf bytes, errors, round-trip)"):
        square = [(0.0, 0.0), (0.0, 2.0), (3.0, 2.0), (3.0, 0.0), (0.0, 0.0)]
        shp = build_shp([[square]])
        geoms = parse_shapefile(shp)
        assert len(geoms) == 1
        assert geoms[0].rings[0] == tuple(square)

        corrupted = bytearray(shp)
        corrupted[0:4] = struct.pack(">i", 0)
        with pytest.raises(BadMagicError):
            parse_shapefile(bytes(corrupted))
        with pytest.raises(TruncatedError):
            parse_shapefile(shp[:-10])

        rng = random.Random(555)
        records = []
        for _ in range(8):
            x0, y0 = rng.uniform(-80, -70), rng.uniform(40, 45)
            w, h = rng.uniform(0.01, 3.0), rng.uniform(0.01, 3.0)
            records.append(
                [[(x0, y0), (x0, y0 + h), (x0 + w, y0 + h), (x0 + w, y0), (x0, y0)]]
            )
        parsed = parse_shapefile(build_shp(records))
        rebuilt = build_shp([[list(r) for r in g.rings] for g in parsed])
        assert [g.rings for g in parse_shapefile(rebuilt)] == [g.rings for g in parsed]

        from support import build_dbf

        dbf = build_dbf([("NAME", "C", 10), ("POP", "N", 8)], [["Suffolk", "1493"]])
        table = parse_dbf(dbf)
        assert table.rows == [["Suffolk", 1493.0]]
        assert table.column("POP").kind == CONTINUOUS


def test_map_claims(ny_shp_path, ny_dbf_path, ny_labels_path):
    """2000->2010 diff is exactly the five named-or-chosen counties, all
    N->Y; each year's GeoJSON re-parses with 62 features."""
    with criterion("Map claims (5 N->Y flips incl. Putnam/Orange/Dutchess; 62 features)"):
        from sprawlkit.geo_ingest import LabeledRegionSet, label_geometries
        from sprawlkit.mapviz import export_geojson

        geoms = parse_shapefile(ny_shp_path.read_bytes())
        sidecar = parse_dbf(ny_dbf_path.read_bytes())
        geoms = label_geometries(geoms, sidecar, "GEOID", "NAME")
        label_sets = json.loads(ny_labels_path.read_text())
        regions = {
            int(year): LabeledRegionSet(
                geometries=tuple(geoms), labels=mapping, year=int(year)
            )
            for year, mapping in label_sets.items()
        }

        changes = diff_years(regions[2000], regions[2010])
        assert len(changes) == 5
        assert all(src == "N" and dst == "Y" for _, src, dst in changes)
        flipped = {key for key, _, _ in changes}
        assert {"36079", "36071", "36027"} <= flipped  # Putnam, Orange, Dutchess

        for year in (2000, 2010):
            doc = json.loads(export_geojson(regions[year]))
            assert len(doc["features"]) == 62


def test_end_to_end_under_five_seconds(ny_csv_path, tmp_path):
    """CLI train + mine-rules + a live HTTP server answer in <5 s, and the
    HTTP prediction equals the in-process one field-for-field."""
    with criterion("End-to-end train + mine-rules + serve (<5 s, HTTP == in-process)"):
        import httpx
        import uvicorn

        from sprawlkit.cli import main
        from sprawlkit.engine import load_bundle
        from sprawlkit.service import create_app

        started = time.perf_counter()
        bundle_path = tmp_path / "bundle.json"
        args = ["--data", str(ny_csv_path), "--key", "FIPS", "--target", "Target"]
        assert main(["train", *args, "--method", "bagging", "--rounds", "10",
                     "--seed", "42", "--out", str(bundle_path)]) == 0
        assert main(["mine-rules", *args, "--min-support", "0.2",
                     "--min-confidence", "0.7"]) == 0

        bundle = load_bundle(bundle_path)
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        server = uvicorn.Server(
            uvicorn.Config(create_app(bundle), host="127.0.0.1", port=port,
                           log_level="error")
        )
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        try:
            base = f"http://127.0.0.1:{port}"
            deadline = time.perf_counter() + 4.0
            while time.perf_counter() < deadline:
                try:
                    if httpx.get(f"{base}/api/attributes", timeout=0.5).status_code == 200:
                        break
                except httpx.HTTPError:
                    time.sleep(0.02)
            assignment = {"PopulationDensity": 54545.0, "HousingUnits": 200000.0}
            via_http = httpx.post(f"{base}/api/predict", json=assignment, timeout=5.0)
            assert via_http.status_code == 200
            assert via_http.json() == predict_sprawl(bundle, assignment).to_obj()
        finally:
            server.should_exit = True
            thread.join(timeout=5.0)
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"end-to-end took {elapsed:.2f}s"
