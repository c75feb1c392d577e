"""Command-line interface: train, mine-rules, predict, impact, export-map, serve.

Examples (using the bundled New York fixture data):

    sprawlkit train --data src/sprawlkit/data/ny_sprawl.csv --key FIPS \
        --target Target --method bagging --rounds 10 --seed 42 --out bundle.json
    sprawlkit mine-rules --data src/sprawlkit/data/ny_sprawl.csv --key FIPS \
        --target Target --min-support 0.2 --min-confidence 0.7
    sprawlkit predict --bundle bundle.json PopulationDensity=54545
    sprawlkit impact --bundle bundle.json HousingUnits ElectricHeating HousingUnits=76767
    sprawlkit serve --bundle bundle.json --bind 127.0.0.1:8765 \
        --shp ... --dbf ... --labels ...
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .discretize import fit_binning, tokenize
from .dtree import TrainParams
from .engine import (
    MiningParams,
    load_bundle,
    predict_sprawl,
    query_impact,
    save_bundle,
    train_bundle,
)
from .errors import SprawlKitError
from .geo_ingest import LabeledRegionSet, label_geometries, parse_csv, parse_dbf, parse_shapefile
from .mapviz import diff_years, export_geojson
from .rulemine import frequent_itemsets, generate_rules

BIND_ENV_VAR = "SPRAWLKIT_BIND"


def _load_table(args):
    text = Path(args.data).read_text(encoding="utf-8")
    return parse_csv(text, key_column=args.key, target_column=args.target)


def _parse_assignment(pairs: list[str]) -> dict[str, float]:
    assignment = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise SystemExit(f"expected NAME=VALUE, got {pair!r}")
        try:
            assignment[name] = float(value)
        except ValueError:
            raise SystemExit(f"value for {name!r} is not a number: {value!r}") from None
    return assignment


def _load_regions(shp_path, dbf_path, labels_path) -> dict[int, LabeledRegionSet]:
    geometries = parse_shapefile(Path(shp_path).read_bytes())
    sidecar = parse_dbf(Path(dbf_path).read_bytes())
    geometries = label_geometries(geometries, sidecar, "GEOID", "NAME")
    labels_by_year = json.loads(Path(labels_path).read_text(encoding="utf-8"))
    return {
        int(year): LabeledRegionSet(
            geometries=tuple(geometries), labels=dict(labels), year=int(year)
        )
        for year, labels in labels_by_year.items()
    }


def _cmd_train(args) -> int:
    table = _load_table(args)
    params = TrainParams(
        min_leaf_instances=args.min_leaf,
        max_depth=args.max_depth,
        rounds=args.rounds,
        seed=args.seed,
    )
    mining = MiningParams(
        min_support=args.min_support,
        min_confidence=args.min_confidence,
        bins_per_attribute=args.bins,
    )
    bundle = train_bundle(table, args.target, method=args.method, params=params, mining=mining)
    save_bundle(bundle, args.out)
    print(
        f"trained {args.method} model on {len(table.rows)} rows: "
        f"{len(bundle.rules)} rules, {len(bundle.ensemble.members)} ensemble member(s) "
        f"-> {args.out}"
    )
    return 0


def _cmd_mine_rules(args) -> int:
    table = _load_table(args)
    scheme = fit_binning(table, table.continuous_columns(), args.bins)
    tokenized = tokenize(table, scheme, args.target)
    itemsets = frequent_itemsets(tokenized, args.min_support)
    rules = generate_rules(itemsets, args.min_confidence)
    for rule in rules:
        print(rule.render())
    if args.json_out:
        obj = [
            {
                "antecedent": list(r.antecedent),
                "consequent": list(r.consequent),
                "support": r.support,
                "confidence": r.confidence,
                "text": r.render(),
            }
            for r in rules
        ]
        Path(args.json_out).write_text(json.dumps(obj, indent=2), encoding="utf-8")
    print(f"{len(rules)} rule(s) at support >= {args.min_support}, "
          f"confidence >= {args.min_confidence}", file=sys.stderr)
    return 0


def _cmd_predict(args) -> int:
    bundle = load_bundle(args.bundle)
    prediction = predict_sprawl(bundle, _parse_assignment(args.assignment))
    print(json.dumps(prediction.to_obj(), indent=2))
    return 0


def _cmd_impact(args) -> int:
    bundle = load_bundle(args.bundle)
    a_value = None
    if args.a_value:
        name, _, value = args.a_value.partition("=")
        if name != args.a:
            raise SystemExit(f"value must be for {args.a!r}, got {name!r}")
        a_value = float(value)
    report = query_impact(bundle, args.a, args.b, a_value)
    print(json.dumps(report.to_obj(), indent=2))
    return 0


def _cmd_export_map(args) -> int:
    regions = _load_regions(args.shp, args.dbf, args.labels)
    if args.year not in regions:
        raise SystemExit(f"labels file has no year {args.year}")
    text = export_geojson(regions[args.year])
    Path(args.out).write_text(text, encoding="utf-8")
    years = sorted(regions)
    if len(years) >= 2:
        changes = diff_years(regions[years[0]], regions[years[-1]])
        print(f"{years[0]} -> {years[-1]}: {len(changes)} county label change(s)",
              file=sys.stderr)
    print(f"wrote {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    bundle = load_bundle(args.bundle)
    regions = None
    if args.shp and args.dbf and args.labels:
        regions = _load_regions(args.shp, args.dbf, args.labels)
    bind = os.environ.get(BIND_ENV_VAR, args.bind)
    serve(bundle, bind, regions, ui_dir=args.ui_dir)
    return 0


def _add_data_options(parser) -> None:
    parser.add_argument("--data", required=True, help="attribute CSV path")
    parser.add_argument("--key", default="FIPS", help="key column name")
    parser.add_argument("--target", default="Target", help="target column name")
    parser.add_argument("--bins", type=int, default=3, help="bins per attribute")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sprawlkit",
        description="Mine county GIS data and answer urban-sprawl what-if queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train binning, rules, tree and ensemble")
    _add_data_options(p)
    p.add_argument("--method", choices=["tree", "bagging", "boosting"], default="bagging")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-support", type=float, default=0.2)
    p.add_argument("--min-confidence", type=float, default=0.7)
    p.add_argument("--out", required=True, help="bundle output path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("mine-rules", help="print association rules")
    _add_data_options(p)
    p.add_argument("--min-support", type=float, default=0.2)
    p.add_argument("--min-confidence", type=float, default=0.7)
    p.add_argument("--json-out", default=None, help="also write rules as JSON")
    p.set_defaults(func=_cmd_mine_rules)

    p = sub.add_parser("predict", help="predict sprawl for NAME=VALUE conditions")
    p.add_argument("--bundle", required=True)
    p.add_argument("assignment", nargs="*", help="attribute assignments, NAME=VALUE")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("impact", help="how does attribute A impact B")
    p.add_argument("--bundle", required=True)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("a_value", nargs="?", default=None, help="optional A=VALUE")
    p.set_defaults(func=_cmd_impact)

    p = sub.add_parser("export-map", help="write one year's choropleth GeoJSON")
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--shp", required=True)
    p.add_argument("--dbf", required=True)
    p.add_argument("--labels", required=True, help="JSON: year -> {key: Y|N}")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_map)

    p = sub.add_parser("serve", help="serve the HTTP/JSON API over a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--bind", default="127.0.0.1:8765",
                   help=f"host:port (env {BIND_ENV_VAR} overrides)")
    p.add_argument("--shp", default=None)
    p.add_argument("--dbf", default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--ui-dir", default=None,
                   help="serve a built web UI (static files) at /")
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SprawlKitError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
