"""FastAPI service exposing the pipeline, snapshots and raw curvature math."""

from __future__ import annotations

import io

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..curvature import CurvatureConfig, CurvatureError, all_edge_curvatures
from ..graph import GraphError, build_graph, corr_to_dist
from ..indicators import IndicatorError
from ..market import MarketError
from ..measures import MeasureError
from ..pipeline import (
    IngestError,
    PipelineConfig,
    PipelineError,
    ingest_prices,
    network_snapshot,
    run_pipeline,
)
from .schemas import (
    AnalyzeOptions,
    AnalyzeRequest,
    AnalyzeResponse,
    CorrelogramPayload,
    CurvatureRequest,
    CurvatureResponse,
    EdgeCurvaturePayload,
    HealthResponse,
    SnapshotEdge,
    SnapshotRequest,
    SnapshotResponse,
)

app = FastAPI(title="netcurv", version=__version__)

_INPUT_ERRORS = (IngestError, GraphError, MarketError, ValueError)
_NUMERICAL_ERRORS = (PipelineError, CurvatureError, IndicatorError, MeasureError)


def _config_from(options: AnalyzeOptions) -> PipelineConfig:
    return PipelineConfig(
        tau=options.tau, delta=options.delta, threshold=options.threshold,
        ollivier=options.ollivier, forman=options.forman, menger=options.menger,
        haantjes=options.haantjes, haantjes_max_len=options.haantjes_max_len,
        ollivier_mode=options.ollivier_mode, path_mode=options.path_mode,
        perturb_sigma=options.perturb_sigma, seed=options.seed,
    )


def _ingest(csv_text: str, options: AnalyzeOptions):
    return ingest_prices(io.StringIO(csv_text), policy=options.fill_policy,
                         min_rows=options.tau + 1)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
    try:
        config = _config_from(request.options)
        config.validate()
        panel = _ingest(request.csv_text, request.options)
        result = run_pipeline(config, panel)
    except _NUMERICAL_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except _INPUT_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    series = result.series
    records = []
    for k, end_date in enumerate(series.end_dates):
        row = {"end_date": end_date}
        for c in series.columns:
            if c != "end_date":
                value = series.data[c][k]
                row[c] = int(value) if c in ("edge_count", "community_count") else float(value)
        records.append(row)
    return AnalyzeResponse(
        columns=list(series.columns),
        records=records,
        correlogram=CorrelogramPayload(
            columns=list(result.correlogram_columns),
            matrix=[[float(v) for v in row] for row in result.correlogram],
        ),
        manifest=result.manifest,
    )


@app.post("/snapshot", response_model=SnapshotResponse)
def snapshot(request: SnapshotRequest) -> SnapshotResponse:
    try:
        config = _config_from(request.options)
        config.validate()
        panel = _ingest(request.csv_text, request.options)
        rows = network_snapshot(config, panel, request.end_date)
    except _NUMERICAL_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except _INPUT_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    edges = [SnapshotEdge(ticker_i=ti, ticker_j=tj, corr=c, dist=d,
                          community_i=ci, community_j=cj)
             for ti, tj, c, d, ci, cj in rows]
    return SnapshotResponse(end_date=request.end_date, edges=edges)


@app.post("/curvatures", response_model=CurvatureResponse)
def curvatures(request: CurvatureRequest) -> CurvatureResponse:
    try:
        edge_list = [(e.i, e.j, e.corr, corr_to_dist(e.corr) if e.dist is None else e.dist)
                     for e in request.edges]
        g = build_graph(request.node_count, edge_list)
        config = CurvatureConfig(
            ollivier=request.ollivier, forman=request.forman,
            menger=request.menger, haantjes=request.haantjes,
            ollivier_mode=request.ollivier_mode,
            forman_edge_weight=request.forman_edge_weight,
            haantjes_max_len=request.haantjes_max_len,
        )
        result = all_edge_curvatures(g, config)
    except (CurvatureError,) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except _INPUT_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    edges = []
    for e in result.edges:
        edges.append(EdgeCurvaturePayload(
            i=e[0], j=e[1],
            ollivier=result.ollivier[e] if result.ollivier else None,
            forman=result.forman[e] if result.forman else None,
            menger=result.menger[e] if result.menger else None,
            haantjes=result.haantjes[e] if result.haantjes else None,
        ))
    return CurvatureResponse(ore=result.ore, fre=result.fre, mre=result.mre,
                             hre=result.hre, edges=edges)
