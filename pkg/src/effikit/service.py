"""HTTP scoring service wrapping the core package.

Stateless: every endpoint takes the full payload and maps onto one library
call, so results are identical to the library and the CLI.  Long batch jobs
(dataset construction, candidate execution) stay on the CLI.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .codebleu import DEFAULT_WEIGHTS, codebleu
from .corpus import EfficiencyProfile
from .efficiency import BREAKPOINT_PERCENTS, npi, profile_from_times, time_breakpoints
from .evalstats import PredictionRecord, rmse, spearman
from .ioccb import ioccb
from .pynorm import CompileError, standardize_identifiers
from .schemas import (
    BreakpointsResponse,
    CodebleuRequest,
    HealthResponse,
    IoccbRequest,
    IoccbResponse,
    NormalizeRequest,
    NormalizeResponse,
    NpiRequest,
    NpiResponse,
    ProfileFromTimesRequest,
    ProfileModel,
    RmseRequest,
    RmseResponse,
    ScoreBreakdownResponse,
    SpearmanRequest,
    SpearmanResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="effikit", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/normalize", response_model=NormalizeResponse)
    def normalize(request: NormalizeRequest) -> NormalizeResponse:
        try:
            result = standardize_identifiers(request.source)
        except CompileError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return NormalizeResponse(
            source=result.source, rename_map=result.rename_map, compile_ok=result.compile_ok
        )

    @app.post("/score/codebleu", response_model=ScoreBreakdownResponse)
    def score_codebleu(request: CodebleuRequest) -> ScoreBreakdownResponse:
        try:
            breakdown = codebleu(
                request.candidate,
                request.reference,
                weights=request.weights or DEFAULT_WEIGHTS,
                keyword_weight=request.keyword_weight,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return ScoreBreakdownResponse(**breakdown.as_dict())

    @app.post("/score/ioccb", response_model=IoccbResponse)
    def score_ioccb(request: IoccbRequest) -> IoccbResponse:
        try:
            result = ioccb(
                request.generated,
                request.ground_truth,
                request.alternates,
                weights=request.weights or DEFAULT_WEIGHTS,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return IoccbResponse(**result.as_dict())

    @app.post("/score/npi", response_model=NpiResponse)
    def score_npi(request: NpiRequest) -> NpiResponse:
        try:
            profile = EfficiencyProfile(
                request.profile.t_min_ms, request.profile.t_med_ms, request.profile.t_max_ms
            )
            value = npi(request.time_ms, profile)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return NpiResponse(npi=value)

    @app.post("/stats/breakpoints", response_model=BreakpointsResponse)
    def stats_breakpoints(request: ProfileFromTimesRequest) -> BreakpointsResponse:
        try:
            profile = profile_from_times(request.times)
            breakpoints = [time_breakpoints(request.times, p) for p in BREAKPOINT_PERCENTS]
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return BreakpointsResponse(
            profile=ProfileModel(
                t_min_ms=profile.t_min_ms, t_med_ms=profile.t_med_ms, t_max_ms=profile.t_max_ms
            ),
            breakpoints=breakpoints,
        )

    @app.post("/eval/spearman", response_model=SpearmanResponse)
    def eval_spearman(request: SpearmanRequest) -> SpearmanResponse:
        try:
            rho, p = spearman(request.x, request.y)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return SpearmanResponse(rho=rho, p=p)

    @app.post("/eval/rmse", response_model=RmseResponse)
    def eval_rmse(request: RmseRequest) -> RmseResponse:
        try:
            records = [
                PredictionRecord(r.sample_id, r.predicted, r.actual, r.quantity)
                for r in request.records
            ]
            value = rmse(records)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return RmseResponse(rmse=value, n=len(records))

    return app


app = create_app()
