"""HTTP wrapper around the report builders.

Every endpoint accepts/returns the same JSON documents the CLI prints, so
the CLI can run against a server (--server) with identical results.  Input
problems (bad model file, missing sections, size caps) map to HTTP 422.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .dist import parse_number
from .errors import ArgumentError, ModelFileError, ResourceError
from .geometry import MinkowskiEvent
from .modelfile import ParsedModel, parse_model_text
from .reports import (
    REPORT_VERSION,
    analysis_report,
    compat_report,
    geometry_apex_report,
    geometry_containment_report,
    geometry_future_report,
    geometry_precedes_report,
    loops_report,
    ns_report,
    scenario_report_doc,
    scenario_suite_doc,
)
from .scenarios import all_scenarios


class ModelRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())
    model_file: str
    conditional: bool = False
    max_nodes: int | None = None


class LoopsRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())
    model_file: str
    witness_file: str | None = None
    max_nodes: int | None = None


class EventPairRequest(BaseModel):
    events: list[list[str]]


class ContainmentRequest(BaseModel):
    pair: list[list[str]]
    inside: list[str]


class FutureRequest(BaseModel):
    left: list[list[str]]
    right: list[list[str]]


def _event(coords: list[str]) -> MinkowskiEvent:
    if len(coords) < 2:
        raise ArgumentError("an event needs spatial coordinates and a time")
    nums = [parse_number(c) for c in coords]
    return MinkowskiEvent(nums[:-1], nums[-1])


def _pair(req: EventPairRequest) -> tuple[MinkowskiEvent, MinkowskiEvent]:
    if len(req.events) != 2:
        raise ArgumentError("exactly two events required")
    return _event(req.events[0]), _event(req.events[1])


def _parsed(text: str) -> ParsedModel:
    return parse_model_text(text)


def create_app() -> FastAPI:
    app = FastAPI(title="causalcompat", version=str(REPORT_VERSION))

    @app.exception_handler(ModelFileError)
    @app.exception_handler(ArgumentError)
    @app.exception_handler(ResourceError)
    async def _input_error(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    async def health():
        return {"status": "ok", "report_version": REPORT_VERSION}

    @app.post("/analyze")
    async def analyze(req: ModelRequest):
        return analysis_report(_parsed(req.model_file),
                               include_conditional=req.conditional,
                               max_nodes=req.max_nodes)

    @app.post("/ns")
    async def ns(req: ModelRequest):
        return ns_report(_parsed(req.model_file))

    @app.post("/compat")
    async def compat(req: ModelRequest):
        return compat_report(_parsed(req.model_file), max_nodes=req.max_nodes)

    @app.post("/loops")
    async def loops(req: LoopsRequest):
        witness = _parsed(req.witness_file) if req.witness_file else None
        return loops_report(_parsed(req.model_file), witness,
                            max_nodes=req.max_nodes)

    @app.post("/geometry/precedes")
    async def geometry_precedes(req: EventPairRequest):
        return geometry_precedes_report(*_pair(req))

    @app.post("/geometry/apex")
    async def geometry_apex(req: EventPairRequest):
        return geometry_apex_report(*_pair(req))

    @app.post("/geometry/containment")
    async def geometry_containment(req: ContainmentRequest):
        if len(req.pair) != 2:
            raise ArgumentError("the pair takes exactly two events")
        return geometry_containment_report(_event(req.pair[0]),
                                           _event(req.pair[1]),
                                           _event(req.inside))

    @app.post("/geometry/future-contained")
    async def geometry_future(req: FutureRequest):
        return geometry_future_report([_event(e) for e in req.left],
                                      [_event(e) for e in req.right])

    @app.get("/scenarios")
    async def scenarios():
        return {"report_version": REPORT_VERSION, "names": sorted(all_scenarios())}

    @app.get("/scenarios/suite")
    async def suite():
        return scenario_suite_doc()

    @app.get("/scenario/{name}")
    async def scenario(name: str):
        return scenario_report_doc(name)

    return app


app = create_app()
