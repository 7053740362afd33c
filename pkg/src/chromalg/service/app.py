"""FastAPI service exposing the derivation, homology and consistency checks.

Every endpoint builds a RunConfig, runs the shared pipeline and returns the
artifacts together with the deterministic manifest.  A failed mathematical
verdict is a normal response with ok = false; malformed input is a 422 and
an internal computation error a 500 with the exception type spelled out.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException
from pydantic import ValidationError

from .. import __version__
from ..pipeline import RunConfig, RunResult, run_pipeline
from .schemas import (
    CollapseRequest,
    ConjectureRequest,
    DeriveRequest,
    HealthResponse,
    HHRequest,
    ReproduceRequest,
    RunEnvelope,
    SplittingRequest,
)

app = FastAPI(
    title="chromalg",
    version=__version__,
    description="Exact formal-group-law derivations, Hochschild homology "
                "tables and chromatic splitting consistency checks.",
)


def _envelope(result: RunResult) -> RunEnvelope:
    artifacts = {}
    for name, text in result.artifacts.items():
        if name.endswith(".json"):
            artifacts[name] = json.loads(text)
        else:
            artifacts[name] = text
    return RunEnvelope(ok=result.ok, manifest=result.manifest.model_dump(by_alias=True),
                       artifacts=artifacts)


def _run(config_kwargs: dict) -> RunEnvelope:
    try:
        config = RunConfig(**config_kwargs)
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=json.loads(exc.json())) from exc
    try:
        return _envelope(run_pipeline(config))
    except (ValueError, KeyError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except Exception as exc:
        raise HTTPException(
            status_code=500,
            detail={"error": str(exc), "type": type(exc).__name__},
        ) from exc


@app.get("/healthz", response_model=HealthResponse)
def healthz() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/derive", response_model=RunEnvelope)
def derive(req: DeriveRequest) -> RunEnvelope:
    return _run({"command": "derive", **req.model_dump()})


@app.post("/hh", response_model=RunEnvelope)
def hochschild(req: HHRequest) -> RunEnvelope:
    return _run({"command": "hh", **req.model_dump()})


@app.post("/check/conjecture", response_model=RunEnvelope)
def check_conjecture(req: ConjectureRequest) -> RunEnvelope:
    return _run({"command": "check-conjecture", **req.model_dump()})


@app.post("/check/e2-splitting", response_model=RunEnvelope)
def check_e2_splitting(req: SplittingRequest) -> RunEnvelope:
    return _run({"command": "check-e2-splitting", **req.model_dump()})


@app.post("/check/collapse", response_model=RunEnvelope)
def check_collapse(req: CollapseRequest) -> RunEnvelope:
    return _run({"command": "check-collapse", **req.model_dump()})


@app.post("/reproduce", response_model=RunEnvelope)
def reproduce_endpoint(req: ReproduceRequest) -> RunEnvelope:
    return _run({"command": "reproduce", **req.model_dump()})
