"""FastAPI service exposing every engine command over HTTP.

Errors surface as JSON bodies with a stable ``category`` so clients can
react the same way the CLI maps exit codes.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import CircuitError
from . import handlers
from .schemas import (
    DegeneracyRequest,
    DegeneracyResponse,
    ErrorResponse,
    FaultsRequest,
    FaultsResponse,
    PolyRequest,
    PolyResponse,
    SolveRequest,
    SolveResponse,
    TheveninRequest,
    TheveninResponse,
    TreesRequest,
    TreesResponse,
    ZparamsRequest,
    ZparamsResponse,
)

_STATUS = {
    "parse": 400,
    "patch": 422,
    "degenerate": 422,
    "dimension": 422,
    "internal": 500,
}


def create_app() -> FastAPI:
    app = FastAPI(
        title="homcirc",
        version=__version__,
        description="Linear circuit analysis with homogeneous branch models",
    )

    @app.exception_handler(CircuitError)
    async def circuit_error_handler(request: Request, exc: CircuitError):
        body = ErrorResponse.model_validate(
            {"error": {"category": exc.category, "message": str(exc)}}
        )
        return JSONResponse(
            status_code=_STATUS.get(exc.category, 500),
            content=body.model_dump(),
        )

    @app.get("/")
    async def root():
        return {
            "name": "homcirc",
            "version": __version__,
            "endpoints": [
                "/solve", "/poly", "/degeneracy", "/trees",
                "/thevenin", "/faults", "/zparams",
            ],
        }

    @app.post("/solve", response_model=SolveResponse)
    async def solve(req: SolveRequest):
        return handlers.handle_solve(req)

    @app.post("/poly", response_model=PolyResponse)
    async def poly(req: PolyRequest):
        return handlers.handle_poly(req)

    @app.post("/degeneracy", response_model=DegeneracyResponse)
    async def degeneracy(req: DegeneracyRequest):
        return handlers.handle_degeneracy(req)

    @app.post("/trees", response_model=TreesResponse)
    async def trees(req: TreesRequest):
        return handlers.handle_trees(req)

    @app.post("/thevenin", response_model=TheveninResponse)
    async def thevenin_route(req: TheveninRequest):
        return handlers.handle_thevenin(req)

    @app.post("/faults", response_model=FaultsResponse)
    async def faults(req: FaultsRequest):
        return handlers.handle_faults(req)

    @app.post("/zparams", response_model=ZparamsResponse)
    async def zparams(req: ZparamsRequest):
        return handlers.handle_zparams(req)

    return app


app = create_app()
