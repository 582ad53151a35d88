"""Pydantic request/response models for the HTTP scoring service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class NormalizeRequest(BaseModel):
    source: str


class NormalizeResponse(BaseModel):
    source: str
    rename_map: dict[str, str]
    compile_ok: bool


class CodebleuRequest(BaseModel):
    candidate: str
    reference: str
    weights: tuple[float, float, float, float] | None = None
    keyword_weight: float = 5.0


class ScoreBreakdownResponse(BaseModel):
    ngram: float
    weighted_ngram: float
    syntax: float
    dataflow: float
    combined: float
    weights: list[float]
    flags: list[str]


class IoccbRequest(BaseModel):
    generated: str
    ground_truth: str
    alternates: list[str] = Field(default_factory=list)
    weights: tuple[float, float, float, float] | None = None


class IoccbResponse(BaseModel):
    o_scores: list[float]
    s_scores: list[float]
    o_avg: float
    s_avg: float
    s_max: float
    score: float
    normalization_applied: bool
    warnings: list[str]


class ProfileModel(BaseModel):
    t_min_ms: float
    t_med_ms: float
    t_max_ms: float


class NpiRequest(BaseModel):
    time_ms: float
    profile: ProfileModel


class NpiResponse(BaseModel):
    npi: float


class ProfileFromTimesRequest(BaseModel):
    times: list[float]


class BreakpointsResponse(BaseModel):
    profile: ProfileModel
    breakpoints: list[float]


class SpearmanRequest(BaseModel):
    x: list[float]
    y: list[float]


class SpearmanResponse(BaseModel):
    rho: float
    p: float


class PredictionModel(BaseModel):
    sample_id: str
    predicted: float
    actual: float
    quantity: str = "time_ms"


class RmseRequest(BaseModel):
    records: list[PredictionModel]


class RmseResponse(BaseModel):
    rmse: float
    n: int


class HealthResponse(BaseModel):
    status: str
    version: str
