"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class AnalyzeOptions(BaseModel):
    tau: int = 22
    delta: int = 5
    threshold: float = 0.75
    ollivier: bool = True
    forman: bool = True
    menger: bool = True
    haantjes: bool = True
    haantjes_max_len: int = 4
    ollivier_mode: str = "weighted"
    path_mode: str = "hop"
    perturb_sigma: float = 0.0
    seed: int = 0
    fill_policy: str = "drop"


class AnalyzeRequest(BaseModel):
    csv_text: str = Field(description="Price panel: date column, one column per ticker, optional INDEX")
    options: AnalyzeOptions = AnalyzeOptions()


class CorrelogramPayload(BaseModel):
    columns: list[str]
    matrix: list[list[float]]


class AnalyzeResponse(BaseModel):
    columns: list[str]
    records: list[dict]
    correlogram: CorrelogramPayload
    manifest: dict


class SnapshotRequest(BaseModel):
    csv_text: str
    end_date: str
    options: AnalyzeOptions = AnalyzeOptions()


class SnapshotEdge(BaseModel):
    ticker_i: str
    ticker_j: str
    corr: float
    dist: float
    community_i: int
    community_j: int


class SnapshotResponse(BaseModel):
    end_date: str
    edges: list[SnapshotEdge]


class GraphEdge(BaseModel):
    i: int
    j: int
    corr: float = 1.0
    dist: float | None = None


class CurvatureRequest(BaseModel):
    node_count: int
    edges: list[GraphEdge]
    ollivier: bool = True
    forman: bool = True
    menger: bool = True
    haantjes: bool = True
    ollivier_mode: str = "hop"
    forman_edge_weight: str = "unit"
    haantjes_max_len: int = 4


class EdgeCurvaturePayload(BaseModel):
    i: int
    j: int
    ollivier: float | None = None
    forman: float | None = None
    menger: float | None = None
    haantjes: float | None = None


class CurvatureResponse(BaseModel):
    ore: float | None
    fre: float | None
    mre: float | None
    hre: float | None
    edges: list[EdgeCurvaturePayload]


class HealthResponse(BaseModel):
    status: str
    version: str
