"""Ingestion, configuration and the rolling-window indicator engine.

The engine walks every epoch of a validated price panel, builds the
correlation frame and threshold network, evaluates the enabled curvature
averages, the whole-graph summary, mean correlation and minimum portfolio
risk, then joins the full-history index return and GARCH volatility sampled
at epoch end dates. Output files are byte-reproducible: identical config,
panel and seed give identical ``indicators.csv``, ``correlogram.csv`` and
``manifest.json``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .curvature import CurvatureConfig, all_edge_curvatures
from .indicators import (
    garch11_fit,
    garch_volatility,
    index_return_series,
    indicator_correlogram,
    mean_market_correlation,
    min_risk_portfolio,
)
from .market import (
    ReturnWindow,
    log_returns,
    pearson_window,
    perturb_correlations,
    rolling_epochs,
    threshold_network,
)
from .measures import MeasureConfig, graph_summary, louvain_modularity

log = logging.getLogger(__name__)

#: Reserved ticker name for the market-index column of a price panel.
INDEX_COLUMN = "INDEX"

#: Indicator CSV column order; curvature and index columns drop out when
#: disabled or absent, the rest is fixed.
COLUMN_ORDER = (
    "end_date", "r", "mu", "volatility", "sigma_p", "ne", "ce",
    "ore", "fre", "fre_abs", "mre", "hre",
    "edge_count", "edge_density", "avg_degree", "avg_weighted_degree",
    "avg_path_length", "diameter", "clustering", "modularity", "community_count",
)

INT_COLUMNS = {"edge_count", "community_count"}

#: Columns eligible for the cross-indicator correlogram.
CORRELOGRAM_COLUMNS = ("r", "mu", "volatility", "sigma_p", "ne", "ce",
                       "ore", "fre", "fre_abs", "mre", "hre")


class PipelineError(RuntimeError):
    """A per-epoch or whole-run computation failed; fatal by design."""


class IngestError(ValueError):
    """The price panel file is malformed or fails validation."""


@dataclass(frozen=True)
class PipelineConfig:
    """Run parameters; defaults match the standard desk setup."""

    tau: int = 22
    delta: int = 5
    threshold: float = 0.75
    ollivier: bool = True
    forman: bool = True
    menger: bool = True
    haantjes: bool = True
    haantjes_max_len: int = 4
    ollivier_mode: str = "weighted"  # distance metric for Ollivier transport
    path_mode: str = "hop"  # metric for path length / diameter / CE
    weighted_degree_weight: str = "corr"
    perturb_sigma: float = 0.0
    seed: int = 0
    out_dir: str | None = None
    log_level: str = "INFO"

    def validate(self, total_returns: int | None = None) -> None:
        if self.tau < 2:
            raise IngestError("tau must be >= 2")
        if total_returns is not None and self.tau > total_returns:
            raise IngestError(f"tau={self.tau} exceeds the {total_returns} return rows")
        if self.delta < 1:
            raise IngestError("delta must be >= 1")
        if not (-1.0 < self.threshold <= 1.0):
            raise IngestError("threshold must lie in (-1, 1]")
        if self.haantjes_max_len < 2:
            raise IngestError("haantjes_max_len must be >= 2")
        if self.perturb_sigma < 0.0:
            raise IngestError("perturb_sigma must be >= 0")

    def curvature_config(self) -> CurvatureConfig:
        return CurvatureConfig(
            ollivier=self.ollivier, forman=self.forman,
            menger=self.menger, haantjes=self.haantjes,
            ollivier_mode=self.ollivier_mode,
            forman_edge_weight="dist",
            haantjes_max_len=self.haantjes_max_len,
        )

    def measure_config(self) -> MeasureConfig:
        return MeasureConfig(path_mode=self.path_mode,
                             weighted_degree_weight=self.weighted_degree_weight)


@dataclass(frozen=True)
class PricePanel:
    """Validated price matrix: ascending dates, positive prices, no gaps."""

    dates: tuple[str, ...]
    tickers: tuple[str, ...]
    prices: np.ndarray  # (T, N), index column excluded
    index_prices: np.ndarray | None  # (T,) when the panel has an INDEX column

    @property
    def rows(self) -> int:
        return len(self.dates)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update("\n".join(self.dates).encode())
        h.update("\n".join(self.tickers).encode())
        h.update(np.ascontiguousarray(self.prices).tobytes())
        if self.index_prices is not None:
            h.update(np.ascontiguousarray(self.index_prices).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class IndicatorSeries:
    """One row per epoch; column order is fixed and documented."""

    columns: tuple[str, ...]
    end_dates: tuple[str, ...]
    data: dict[str, np.ndarray]

    def column(self, name: str) -> np.ndarray:
        return self.data[name]

    def row_count(self) -> int:
        return len(self.end_dates)


@dataclass(frozen=True)
class PipelineResult:
    series: IndicatorSeries
    correlogram_columns: tuple[str, ...]
    correlogram: np.ndarray
    manifest: dict
    files: dict[str, str] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def ingest_prices(path, policy: str = "drop", min_rows: int = 3) -> PricePanel:
    """Read and validate a price-panel CSV.

    Layout: header ``date`` plus one column per ticker; the optional reserved
    column ``INDEX`` carries the market index. Missing cells follow
    ``policy``: ``drop`` removes the affected rows, ``ffill`` forward-fills
    (rows before a ticker's first observation are dropped). Both are logged
    with counts. Duplicate or non-ascending dates and non-positive prices are
    hard errors.
    """
    if policy not in ("drop", "ffill"):
        raise IngestError(f"unknown missing-cell policy {policy!r}")
    try:
        df = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except Exception as exc:
        raise IngestError(f"cannot parse CSV {path}: {exc}") from exc
    if df.shape[1] < 2:
        raise IngestError("panel needs a date column plus at least one ticker")
    date_col = df.columns[0]
    if date_col.strip().lower() != "date":
        raise IngestError(f"first column must be 'date', got {date_col!r}")

    dates = df[date_col].tolist()
    if any(d is None or str(d).strip() == "" for d in dates):
        raise IngestError("empty date cell")
    if len(set(dates)) != len(dates):
        raise IngestError("duplicate dates in panel")
    if any(b <= a for a, b in zip(dates, dates[1:])):
        raise IngestError("dates must be strictly ascending")

    tickers = [c for c in df.columns[1:]]
    if len(set(tickers)) != len(tickers):
        raise IngestError("duplicate ticker columns")
    values = np.full((len(df), len(tickers)), np.nan)
    for k, ticker in enumerate(tickers):
        col = pd.to_numeric(df[ticker], errors="coerce")
        raw_blank = df[ticker].isna() | (df[ticker].str.strip() == "")
        bad = col.isna() & ~raw_blank
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise IngestError(f"non-numeric price for {ticker} at row {row + 2}")
        values[:, k] = col.to_numpy()
        if np.all(np.isnan(values[:, k])):
            raise IngestError(f"column {ticker} has no values at all")

    nonpos = np.argwhere(values <= 0.0)
    if nonpos.size:
        r, c = nonpos[0]
        raise IngestError(
            f"non-positive price for {tickers[c]} at row {int(r) + 2} "
            f"(date {dates[int(r)]})")

    missing = np.isnan(values)
    if missing.any():
        if policy == "ffill":
            filled = int(missing.sum())
            for k in range(values.shape[1]):
                col = values[:, k]
                idx = np.where(np.isnan(col), 0, np.arange(len(col)))
                np.maximum.accumulate(idx, out=idx)
                values[:, k] = col[idx]
            keep = ~np.isnan(values).any(axis=1)
            dropped = int((~keep).sum())
            log.warning("forward-filled %d missing cells; dropped %d leading rows",
                        filled, dropped)
        else:
            keep = ~missing.any(axis=1)
            dropped = int((~keep).sum())
            log.warning("dropped %d rows with missing cells", dropped)
        values = values[keep]
        dates = [d for d, k in zip(dates, keep) if k]

    if len(dates) < min_rows:
        raise IngestError(f"only {len(dates)} clean rows; need at least {min_rows}")

    if INDEX_COLUMN in tickers:
        k = tickers.index(INDEX_COLUMN)
        index_prices = values[:, k]
        values = np.delete(values, k, axis=1)
        tickers = [t for t in tickers if t != INDEX_COLUMN]
    else:
        index_prices = None
    if not tickers:
        raise IngestError("panel contains no stock columns besides the index")

    return PricePanel(dates=tuple(dates), tickers=tuple(tickers),
                      prices=values, index_prices=index_prices)


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

def _epoch_frame(config, returns, dates, epoch_index, span, tickers):
    s, e = span
    window = ReturnWindow(returns=returns[s:e], end_date=dates[e], tickers=tickers)
    frame = pearson_window(window)
    if config.perturb_sigma > 0.0:
        frame = perturb_correlations(frame, config.perturb_sigma,
                                     seed=[config.seed, epoch_index])
    return window, frame


def run_pipeline(config: PipelineConfig, panel: PricePanel) -> PipelineResult:
    """Evaluate every epoch and, when configured, write the output files.

    Per-epoch failures abort the run with the epoch end date in the message;
    silent gaps would corrupt the correlogram alignment.
    """
    returns = log_returns(panel.prices)
    total = returns.shape[0]
    config.validate(total_returns=total)
    epochs = rolling_epochs(total, config.tau, config.delta)
    curv_cfg = config.curvature_config()
    meas_cfg = config.measure_config()
    any_curv = config.ollivier or config.forman or config.menger or config.haantjes

    acc: dict[str, list] = {name: [] for name in COLUMN_ORDER}
    end_dates: list[str] = []
    for k, span in enumerate(epochs):
        s, e = span
        end_date = panel.dates[e]
        try:
            window, frame = _epoch_frame(config, returns, panel.dates, k, span, panel.tickers)
            g = threshold_network(frame, config.threshold)
            summary = graph_summary(g, meas_cfg)
            curv = all_edge_curvatures(g, curv_cfg) if any_curv else None
            omega = np.cov(window.returns, rowvar=False, ddof=1)
            portfolio = min_risk_portfolio(omega)
        except Exception as exc:
            raise PipelineError(f"epoch ending {end_date}: {exc}") from exc
        end_dates.append(end_date)
        acc["mu"].append(mean_market_correlation(frame))
        acc["sigma_p"].append(portfolio.risk)
        acc["ne"].append(summary.network_entropy)
        acc["ce"].append(summary.communication_efficiency)
        if config.ollivier:
            acc["ore"].append(curv.ore)
        if config.forman:
            acc["fre"].append(curv.fre)
            acc["fre_abs"].append(abs(curv.fre))
        if config.menger:
            acc["mre"].append(curv.mre)
        if config.haantjes:
            acc["hre"].append(curv.hre)
        acc["edge_count"].append(summary.edge_count)
        acc["edge_density"].append(summary.edge_density)
        acc["avg_degree"].append(summary.avg_degree)
        acc["avg_weighted_degree"].append(summary.avg_weighted_degree)
        acc["avg_path_length"].append(summary.avg_path_length)
        acc["diameter"].append(summary.diameter)
        acc["clustering"].append(summary.clustering)
        acc["modularity"].append(summary.modularity)
        acc["community_count"].append(summary.community_count)

    if panel.index_prices is not None:
        try:
            acc["r"] = list(index_return_series(panel.index_prices, epochs))
            fit = garch11_fit(log_returns(panel.index_prices[:, None])[:, 0])
            vol = garch_volatility(fit)
            acc["volatility"] = [float(vol[e - 1]) for _, e in epochs]
        except Exception as exc:
            raise PipelineError(f"index indicators failed: {exc}") from exc

    columns = tuple(c for c in COLUMN_ORDER
                    if c == "end_date" or len(acc[c]) == len(end_dates))
    data = {c: np.asarray(acc[c]) for c in columns if c != "end_date"}
    series = IndicatorSeries(columns=columns, end_dates=tuple(end_dates), data=data)

    corr_cols, corr = _run_correlogram(series)
    manifest = {
        "config": asdict(config),
        "package_version": __version__,
        "panel_hash": panel.content_hash(),
        "stocks": len(panel.tickers),
        "epochs": len(end_dates),
        "columns": list(columns),
    }
    result = PipelineResult(series=series, correlogram_columns=corr_cols,
                            correlogram=corr, manifest=manifest)
    if config.out_dir is not None:
        result = _write_outputs(result, Path(config.out_dir))
    return result


def _run_correlogram(series: IndicatorSeries):
    """Correlogram over the indicator columns that exist and vary.

    Constant columns cannot enter a Pearson matrix; they are dropped with a
    warning instead of failing a whole historical run.
    """
    present = [c for c in CORRELOGRAM_COLUMNS if c in series.data]
    usable = []
    for c in present:
        if series.row_count() >= 3 and np.std(series.data[c]) > 0.0:
            usable.append(c)
        else:
            log.warning("correlogram: dropping constant or short column %r", c)
    if len(usable) < 2:
        return tuple(usable), np.ones((len(usable), len(usable)))
    matrix = indicator_correlogram(series.data, usable)
    return tuple(usable), matrix


# ---------------------------------------------------------------------------
# File emission
# ---------------------------------------------------------------------------

def _fmt(value, column: str) -> str:
    if column == "end_date":
        return str(value)
    if column in INT_COLUMNS:
        return str(int(value))
    return format(float(value), ".12g")


def indicators_csv_bytes(series: IndicatorSeries) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(series.columns)
    for k, end_date in enumerate(series.end_dates):
        row = []
        for c in series.columns:
            row.append(end_date if c == "end_date" else _fmt(series.data[c][k], c))
        writer.writerow(row)
    return buf.getvalue().encode()


def correlogram_csv_bytes(columns, matrix) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("indicator",) + tuple(columns))
    for name, row in zip(columns, matrix):
        writer.writerow((name,) + tuple(format(float(v), ".12g") for v in row))
    return buf.getvalue().encode()


def _write_outputs(result: PipelineResult, out_dir: Path) -> PipelineResult:
    out_dir.mkdir(parents=True, exist_ok=True)
    ind_bytes = indicators_csv_bytes(result.series)
    corr_bytes = correlogram_csv_bytes(result.correlogram_columns, result.correlogram)
    files = {}
    for name, payload in (("indicators.csv", ind_bytes), ("correlogram.csv", corr_bytes)):
        path = out_dir / name
        path.write_bytes(payload)
        files[name] = str(path)
    manifest = dict(result.manifest)
    manifest["outputs"] = {
        "indicators.csv": hashlib.sha256(ind_bytes).hexdigest(),
        "correlogram.csv": hashlib.sha256(corr_bytes).hexdigest(),
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    files["manifest.json"] = str(manifest_path)
    return PipelineResult(series=result.series,
                          correlogram_columns=result.correlogram_columns,
                          correlogram=result.correlogram,
                          manifest=manifest, files=files)


# ---------------------------------------------------------------------------
# Network snapshot export
# ---------------------------------------------------------------------------

def network_snapshot(config: PipelineConfig, panel: PricePanel, end_date: str):
    """Edge rows (ticker_i, ticker_j, corr, dist, community_i, community_j)
    for the epoch ending on ``end_date``."""
    returns = log_returns(panel.prices)
    config.validate(total_returns=returns.shape[0])
    epochs = rolling_epochs(returns.shape[0], config.tau, config.delta)
    span_by_date = {panel.dates[e]: (k, (s, e)) for k, (s, e) in enumerate(epochs)}
    if end_date not in span_by_date:
        raise IngestError(f"{end_date!r} is not an epoch end date of this run")
    k, span = span_by_date[end_date]
    try:
        _, frame = _epoch_frame(config, returns, panel.dates, k, span, panel.tickers)
        g = threshold_network(frame, config.threshold)
        weights = np.maximum(g.edge_corrs(), 0.0)
        _, communities = louvain_modularity(g, weights)
    except Exception as exc:
        raise PipelineError(f"epoch ending {end_date}: {exc}") from exc
    rows = []
    for u, v in g.edges():
        rows.append((g.label(u), g.label(v), g.corr(u, v), g.dist(u, v),
                     communities[u], communities[v]))
    return rows


def emit_network_snapshot(config: PipelineConfig, panel: PricePanel, end_date: str,
                          out_dir) -> str:
    """Write the snapshot edge list as CSV; returns the file path."""
    rows = network_snapshot(config, panel, end_date)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"network_{end_date}.csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("ticker_i", "ticker_j", "corr", "dist",
                     "community_i", "community_j"))
    for ti, tj, corr, dist, ci, cj in rows:
        writer.writerow((ti, tj, format(corr, ".12g"), format(dist, ".12g"),
                         str(ci), str(cj)))
    path.write_bytes(buf.getvalue().encode())
    return str(path)
