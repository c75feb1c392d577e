"""Read-only HTTP/JSON API over an immutable ModelBundle.

The bundle never changes while the service runs, so every endpoint is a
pure function of (bundle, request) and identical requests return identical
responses. Errors surface as HTTP 400 with a machine-readable code equal
to the engine error class name minus the ``Error`` suffix.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .dtree import render_tree
from .engine import ModelBundle, predict_sprawl, query_impact
from .errors import SprawlKitError
from .geo_ingest import LabeledRegionSet
from .mapviz import export_geojson
from .rulemine import filter_rules

GEOJSON_MEDIA_TYPE = "application/geo+json"


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def create_app(
    bundle: ModelBundle,
    regions: dict[int, LabeledRegionSet] | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    """Build the API application.

    ``regions`` supplies per-year map data; ``ui_dir`` optionally mounts a
    built web UI (static files) at the root so it shares the API origin.
    """
    regions = regions or {}
    # GeoJSON is rendered once per year up front; the documents are immutable.
    maps = {year: export_geojson(region_set) for year, region_set in regions.items()}

    app = FastAPI(title="sprawlkit", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.exception_handler(SprawlKitError)
    async def handle_toolkit_error(_request, exc: SprawlKitError):
        return _error_response(400, exc.code, str(exc))

    @app.exception_handler(ValueError)
    async def handle_value_error(_request, exc: ValueError):
        return _error_response(400, "InvalidValue", str(exc))

    @app.post("/api/predict")
    async def api_predict(request: Request):
        assignment = await request.json()
        if not isinstance(assignment, dict):
            return _error_response(400, "InvalidValue", "body must be a JSON object")
        return predict_sprawl(bundle, assignment).to_obj()

    @app.post("/api/impact")
    async def api_impact(request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "a" not in body or "b" not in body:
            return _error_response(
                400, "InvalidValue", 'body must be {"a": ..., "b": ..., "a_value"?: ...}'
            )
        report = query_impact(bundle, body["a"], body["b"], body.get("a_value"))
        return report.to_obj()

    @app.get("/api/attributes")
    async def api_attributes():
        items = []
        for info in bundle.attribute_metadata:
            labels = (
                list(bundle.binning.entry(info.name).labels)
                if info.name in bundle.binning
                else []
            )
            items.append(
                {
                    "name": info.name,
                    "units": info.units,
                    "minimum": info.minimum,
                    "maximum": info.maximum,
                    "bin_labels": labels,
                }
            )
        return {"attributes": items, "target": "Target"}

    @app.get("/api/rules")
    async def api_rules(filter: str = ""):
        predicates = tuple(p for p in filter.split(",") if p)
        rules = filter_rules(list(bundle.rules), mentions=predicates)
        return {
            "rules": [
                {
                    "antecedent": list(r.antecedent),
                    "consequent": list(r.consequent),
                    "support": r.support,
                    "confidence": r.confidence,
                    "text": r.render(),
                }
                for r in rules
            ]
        }

    @app.get("/api/map/{year}.geojson")
    async def api_map(year: int):
        if year not in maps:
            return _error_response(404, "UnknownYear", f"no map data for year {year}")
        return Response(content=maps[year], media_type=GEOJSON_MEDIA_TYPE)

    @app.get("/api/model/summary")
    async def api_summary():
        ensemble = bundle.ensemble
        return {
            "format_version": bundle.format_version,
            "tree_text": render_tree(bundle.single_tree) if bundle.single_tree else None,
            "ensemble": None
            if ensemble is None
            else {
                "kind": ensemble.kind,
                "members": len(ensemble.members),
                "weights": [w for _, w in ensemble.members],
            },
            "rule_count": len(bundle.rules),
            "map_years": sorted(maps),
            "training_params": {
                "min_leaf_instances": bundle.training_params.min_leaf_instances,
                "max_depth": bundle.training_params.max_depth,
                "pruning_holdout_fraction": bundle.training_params.pruning_holdout_fraction,
                "rounds": bundle.training_params.rounds,
                "seed": bundle.training_params.seed,
            },
        }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(
    bundle: ModelBundle,
    bind: str = "127.0.0.1:8765",
    regions: dict[int, LabeledRegionSet] | None = None,
    ui_dir: str | None = None,
) -> None:
    """Run the API with uvicorn until interrupted."""
    import uvicorn

    host, _, port = bind.rpartition(":")
    uvicorn.run(
        create_app(bundle, regions, ui_dir),
        host=host or "127.0.0.1",
        port=int(port),
    )
