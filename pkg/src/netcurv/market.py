"""Rolling-window correlation frames and MST-plus-threshold market networks.

A window of log-returns becomes a Pearson correlation matrix ``C`` (population
moments; the 1/tau factors cancel in the ratio), the metric distance matrix
``D = sqrt(2 (1 - C))`` and, from there, the union of the distance MST with
every pair correlated at or above the threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph, build_graph, mst_prim

log = logging.getLogger(__name__)


class MarketError(ValueError):
    """Invalid market-network input."""


@dataclass(frozen=True)
class ReturnWindow:
    """One epoch of log-returns: tau rows by N stocks, no missing cells."""

    returns: np.ndarray
    end_date: str
    tickers: tuple[str, ...]

    def __post_init__(self):
        r = self.returns
        if r.ndim != 2 or r.shape[0] < 2:
            raise MarketError("a return window needs at least 2 rows")
        if r.shape[1] != len(self.tickers):
            raise MarketError("ticker count must match the return columns")
        if not np.all(np.isfinite(r)):
            raise MarketError("return window contains non-finite values")


@dataclass(frozen=True)
class CorrelationFrame:
    """Per-epoch correlation matrix, its distance transform and metadata."""

    c: np.ndarray
    d: np.ndarray
    end_date: str
    tickers: tuple[str, ...]

    @property
    def size(self) -> int:
        return self.c.shape[0]


def log_returns(prices: np.ndarray) -> np.ndarray:
    """Day-over-day log returns; requires strictly positive prices."""
    p = np.asarray(prices, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p <= 0.0):
        raise MarketError("prices must be finite and strictly positive")
    return np.diff(np.log(p), axis=0)


def pearson_window(window: ReturnWindow) -> CorrelationFrame:
    """Pearson correlations over one epoch and the distance transform.

    A column with zero variance (stock frozen over the epoch) gets zero
    correlation against everything instead of failing the epoch; the event is
    logged with ticker and end date.
    """
    x = window.returns
    tau = x.shape[0]
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / tau
    sd = np.sqrt(np.diag(cov).copy())
    frozen = np.flatnonzero(sd == 0.0)
    for k in frozen:
        log.warning("zero-variance column %s in epoch ending %s; correlations set to 0",
                    window.tickers[k], window.end_date)
    safe_sd = np.where(sd == 0.0, 1.0, sd)
    c = cov / np.outer(safe_sd, safe_sd)
    if frozen.size:
        c[frozen, :] = 0.0
        c[:, frozen] = 0.0
    np.clip(c, -1.0, 1.0, out=c)
    np.fill_diagonal(c, 1.0)
    d = np.sqrt(np.maximum(2.0 * (1.0 - c), 0.0))
    np.fill_diagonal(d, 0.0)
    return CorrelationFrame(c=c, d=d, end_date=window.end_date, tickers=window.tickers)


def threshold_network(frame: CorrelationFrame, threshold: float = 0.75) -> Graph:
    """Union of the distance-matrix MST and all pairs with C >= threshold.

    Connected by construction; every edge carries both weights.
    """
    if not (-1.0 < threshold <= 1.0):
        raise MarketError("threshold must lie in (-1, 1]")
    n = frame.size
    pairs = set(mst_prim(frame.d))
    hi, hj = np.nonzero(np.triu(frame.c >= threshold, k=1))
    pairs.update(zip(hi.tolist(), hj.tolist()))
    edge_list = [(i, j, float(frame.c[i, j]), float(frame.d[i, j]))
                 for i, j in sorted(pairs)]
    return build_graph(n, edge_list, labels=frame.tickers)


def rolling_epochs(total: int, tau: int, delta: int) -> list[tuple[int, int]]:
    """Window index ranges [s, s+tau) advancing by delta while they fit."""
    if tau < 2:
        raise MarketError("tau must be >= 2")
    if delta < 1:
        raise MarketError("delta must be >= 1")
    if total < tau:
        raise MarketError(f"series of length {total} shorter than tau={tau}")
    return [(s, s + tau) for s in range(0, total - tau + 1, delta)]


def perturb_correlations(frame: CorrelationFrame, sigma: float, seed) -> CorrelationFrame:
    """Gaussian noise on the off-diagonal correlations, symmetrised and clipped.

    Each unordered pair receives one i.i.d. N(0, sigma) draw; the diagonal
    stays 1 and distances are recomputed. Deterministic per seed.
    """
    if sigma < 0.0:
        raise MarketError("sigma must be >= 0")
    n = frame.size
    rng = np.random.default_rng(seed)
    noise = np.triu(rng.normal(0.0, sigma, size=(n, n)), k=1)
    c = np.clip(frame.c + noise + noise.T, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    d = np.sqrt(np.maximum(2.0 * (1.0 - c), 0.0))
    np.fill_diagonal(d, 0.0)
    return CorrelationFrame(c=c, d=d, end_date=frame.end_date, tickers=frame.tickers)
