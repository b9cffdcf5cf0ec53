"""
ramplab FastAPI application.

Fits and simulations are CPU-bound, so handlers hand them to the thread
pool and keep the event loop for file I/O. Library errors map to status
codes in one place: DataError -> 422, EstimationError -> 409.
"""

import logging
import secrets
import time
from datetime import datetime, timezone

import pandas as pd
from fastapi import FastAPI, HTTPException, Request, Response, status
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from ramplab.config import APP_DESCRIPTION, APP_NAME, APP_VERSION, get_settings
from ramplab.dataset import DesignSpec, load_frame
from ramplab.exceptions import DataError, EstimationError
from ramplab.models import (
    FitReport,
    FitRequest,
    HealthCheckResponse,
    SimReport,
    SimScenario,
    SimulationRecord,
    SimulationRequest,
    TableInfo,
)
from ramplab.montecarlo import TABLES, describe, reproduce_table, run_mc
from ramplab.persistence import (
    delete_simulation_record,
    get_all_simulation_records,
    get_simulation_record,
    save_simulation_record,
)
from ramplab.report import build_fit_report

logger = logging.getLogger(__name__)

app = FastAPI(
    title=APP_NAME,
    version=APP_VERSION,
    description=APP_DESCRIPTION,
)


@app.exception_handler(DataError)
async def data_error_handler(request: Request, exc: DataError) -> JSONResponse:
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": str(exc), "error": type(exc).__name__},
    )


@app.exception_handler(ValidationError)
async def validation_error_handler(request: Request, exc: ValidationError) -> JSONResponse:
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": exc.errors(include_url=False, include_context=False)},
    )


@app.exception_handler(EstimationError)
async def estimation_error_handler(request: Request, exc: EstimationError) -> JSONResponse:
    return JSONResponse(
        status_code=status.HTTP_409_CONFLICT,
        content={"detail": str(exc), "error": type(exc).__name__},
    )


# =======
# HELPERS
# =======


def _fit(request: FitRequest) -> FitReport:
    design = request.design
    used = [
        *design.regressors,
        *(name for pair in design.interactions for name in pair),
        *([design.full_interactions_with] if design.full_interactions_with else []),
    ]
    frame = pd.DataFrame(request.data)
    dataset = load_frame(frame, request.outcome, list(dict.fromkeys(used)))
    spec = DesignSpec(
        regressors=tuple(design.regressors),
        interactions=tuple(tuple(pair) for pair in design.interactions),
        full_interactions_with=design.full_interactions_with,
    )
    return build_fit_report(
        dataset,
        spec,
        request.estimators,
        request.ape_variables,
        bootstrap_reps=request.bootstrap_reps,
        seed=request.seed,
    )


def _simulate(request: SimulationRequest) -> SimReport:
    if request.table_id is not None:
        return reproduce_table(
            request.table_id,
            request.seed,
            reps=request.reps,
            n_obs=request.n_obs,
            with_se=request.with_se,
        )
    update = {
        key: value
        for key, value in (("seed", request.seed), ("reps", request.reps), ("n_obs", request.n_obs))
        if value is not None
    }
    scenario = SimScenario.model_validate({**request.scenario.model_dump(), **update})
    return run_mc(scenario, with_se=request.with_se)


# ==============
# API ENDPOINTS
# ==============


@app.get("/", response_model=HealthCheckResponse)
async def health_check():
    return HealthCheckResponse(
        status="healthy",
        timestamp=datetime.now(timezone.utc),
        version=APP_VERSION,
    )


@app.get("/tables", response_model=list[TableInfo])
async def list_tables():
    """Table ids that ``POST /simulations`` can reproduce."""
    return [TableInfo(table_id=k, title=describe(s)) for k, s in TABLES.items()]


@app.post("/fits", response_model=FitReport)
async def create_fit(request: FitRequest):
    """Fit the requested estimators on posted data. Nothing is stored."""
    return await run_in_threadpool(_fit, request)


@app.post(
    "/simulations",
    response_model=SimulationRecord,
    status_code=status.HTTP_201_CREATED,
)
async def create_simulation(request: SimulationRequest):
    """Run a Monte Carlo study and store the report."""
    report = await run_in_threadpool(_simulate, request)
    record = SimulationRecord(
        simulation_id=f"sim_{int(time.time())}_{secrets.token_hex(4)}",
        report=report,
        timestamp=datetime.now(timezone.utc),
    )
    await save_simulation_record(record)
    return record


@app.get("/simulations", response_model=list[SimulationRecord])
async def list_simulations():
    return await get_all_simulation_records()


@app.get("/simulations/{simulation_id}", response_model=SimulationRecord)
async def get_simulation(simulation_id: str):
    record = await get_simulation_record(simulation_id)
    if record is None:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Simulation {simulation_id} not found",
        )
    return record


@app.delete("/simulations/{simulation_id}", status_code=status.HTTP_204_NO_CONTENT)
async def delete_simulation(simulation_id: str):
    if not await delete_simulation_record(simulation_id):
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Simulation {simulation_id} not found",
        )
    return Response(status_code=status.HTTP_204_NO_CONTENT)


def serve(host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the app under uvicorn."""
    import uvicorn

    logger.info("Serving %s %s on %s:%d", APP_NAME, APP_VERSION, host, port)
    uvicorn.run(app, host=host, port=port, log_level=get_settings().log_level.lower())
