"""Synthetic price panels for pipeline-level tests.

The one-factor model gives every stock pair the same population correlation
rho; a crash window raises rho over a block of days, reproducing the dense
network / collapsed community structure of stressed markets.
"""

import io

import numpy as np

from netcurv.pipeline import PricePanel


def factor_returns(n_stocks, n_days, rho, crash=None, seed=0, daily_vol=0.02):
    """One-factor log-returns with pairwise correlation ``rho``.

    ``crash=(start, end, rho_crash)`` switches the factor loading inside
    [start, end) of the return rows.
    """
    rng = np.random.default_rng(seed)
    factor = rng.standard_normal(n_days)
    eps = rng.standard_normal((n_days, n_stocks))
    load = np.full(n_days, rho)
    if crash is not None:
        start, end, rho_crash = crash
        load[start:end] = rho_crash
    mix = (np.sqrt(load)[:, None] * factor[:, None]
           + np.sqrt(1.0 - load)[:, None] * eps)
    return daily_vol * mix


def panel_from_returns(returns, with_index=False, start_price=100.0):
    """Wrap a return matrix into a PricePanel (prices via exp-cumsum)."""
    n_days, n_stocks = returns.shape
    log_prices = np.vstack([np.zeros(n_stocks), np.cumsum(returns, axis=0)])
    prices = start_price * np.exp(log_prices)
    dates = tuple(f"d{k:05d}" for k in range(n_days + 1))
    tickers = tuple(f"S{k:03d}" for k in range(n_stocks))
    index_prices = None
    if with_index:
        index_returns = returns.mean(axis=1)
        index_prices = start_price * np.exp(
            np.concatenate([[0.0], np.cumsum(index_returns)]))
    return PricePanel(dates=dates, tickers=tickers, prices=prices,
                      index_prices=index_prices)


def panel_csv_text(panel: PricePanel) -> str:
    """Serialise a panel back to the ingestion CSV format."""
    buf = io.StringIO()
    header = ["date", *panel.tickers]
    if panel.index_prices is not None:
        header.append("INDEX")
    buf.write(",".join(header) + "\n")
    for k, date in enumerate(panel.dates):
        cells = [date] + [format(v, ".12g") for v in panel.prices[k]]
        if panel.index_prices is not None:
            cells.append(format(panel.index_prices[k], ".12g"))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def small_demo_panel(seed=7, n_stocks=6, n_days=140, with_index=True):
    returns = factor_returns(n_stocks, n_days, rho=0.3, seed=seed)
    return panel_from_returns(returns, with_index=with_index)


REGIME_CRASH_SPAN = (270, 330)


def regime_panel(seed=2024):
    """One-factor panel with a leader block and a 60-day crash window.

    Fourteen "leader" stocks share a factor loading giving pairwise
    correlation 0.92 (comfortably above the 0.75 threshold, so their edges do
    not flap under small noise); the 36 peripheral stocks sit far below it.
    The population mean pairwise correlation is ~0.2 in normal times; inside
    the crash window every loading jumps so the mean is ~0.8.
    """
    rng = np.random.default_rng(seed)
    n, days = 50, 600
    rho = np.concatenate([np.full(14, 0.92), np.full(36, 0.06)])
    rho_crash = rng.uniform(0.68, 0.92, n)
    factor = rng.standard_normal(days)
    eps = rng.standard_normal((days, n))
    load = np.tile(rho, (days, 1))
    start, end = REGIME_CRASH_SPAN
    load[start:end] = rho_crash
    returns = 0.02 * (np.sqrt(load) * factor[:, None] + np.sqrt(1.0 - load) * eps)
    off = ~np.eye(n, dtype=bool)
    pop_normal = float(np.outer(np.sqrt(rho), np.sqrt(rho))[off].mean())
    pop_crash = float(np.outer(np.sqrt(rho_crash), np.sqrt(rho_crash))[off].mean())
    return panel_from_returns(returns), pop_normal, pop_crash
