"""Traditional market indicators: mean correlation, GARCH(1,1) volatility,
minimum-risk portfolio and the indicator correlogram."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

log = logging.getLogger(__name__)

#: Covariance-stationarity margin: alpha1 + beta1 <= 1 - GARCH_MARGIN.
GARCH_MARGIN = 1e-6


class IndicatorError(ValueError):
    """Degenerate indicator input or failed estimation."""


def mean_market_correlation(frame) -> float:
    """Mean off-diagonal correlation, each unordered pair counted once."""
    c = frame.c
    n = c.shape[0]
    if n < 2:
        raise IndicatorError("mean correlation needs at least 2 stocks")
    iu = np.triu_indices(n, k=1)
    return float(c[iu].mean())


# ---------------------------------------------------------------------------
# GARCH(1,1) quasi-maximum-likelihood
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GarchParams:
    alpha0: float
    alpha1: float
    beta1: float
    loglik: float
    sigma2_series: np.ndarray

    def __post_init__(self):
        if self.alpha0 <= 0.0 or self.alpha1 < 0.0 or self.beta1 < 0.0:
            raise IndicatorError("GARCH parameters violate positivity constraints")
        if self.alpha1 + self.beta1 >= 1.0:
            raise IndicatorError("GARCH parameters violate stationarity")
        if np.any(self.sigma2_series <= 0.0):
            raise IndicatorError("conditional variances must be positive")


def garch_recursion(x: np.ndarray, alpha0: float, alpha1: float, beta1: float,
                    init_var: float | None = None) -> np.ndarray:
    """Conditional variance series sigma2_t = a0 + a1 x_{t-1}^2 + b1 sigma2_{t-1}.

    The recursion is seeded with the sample variance of ``x`` unless
    ``init_var`` overrides it.
    """
    x = np.asarray(x, dtype=float)
    s0 = float(np.var(x)) if init_var is None else float(init_var)
    if len(x) == 0:
        return np.array([])
    # linear recursion solved as an IIR filter: sigma2_t - b1 sigma2_{t-1} = u_t
    u = alpha0 + alpha1 * x[:-1] ** 2
    tail, _ = lfilter([1.0], [1.0, -beta1], u, zi=np.array([beta1 * s0]))
    return np.concatenate([[s0], tail])


def garch_loglik(x: np.ndarray, alpha0: float, alpha1: float, beta1: float) -> float:
    """Gaussian log-likelihood of the series under the variance recursion."""
    sigma2 = garch_recursion(x, alpha0, alpha1, beta1)
    if np.any(sigma2 <= 0.0):
        return -np.inf
    return float(-0.5 * np.sum(np.log(2.0 * np.pi * sigma2) + x ** 2 / sigma2))


def garch11_fit(x, init: tuple[float, float, float] | None = None) -> GarchParams:
    """Quasi-maximum-likelihood GARCH(1,1) fit of a (demeaned) return series.

    The series is demeaned internally. Constraints alpha0 > 0 and
    alpha1, beta1 >= 0 with alpha1 + beta1 <= 1 - 1e-6 are enforced through
    a penalised derivative-free search (Nelder-Mead, cap 10000 iterations,
    log-likelihood tolerance 1e-10) started from (0.05, 0.90) loadings.
    """
    x = np.asarray(x, dtype=float)
    if len(x) < 100:
        raise IndicatorError("GARCH fit needs at least 100 observations")
    x = x - x.mean()
    var = float(np.var(x))
    if var <= 0.0:
        raise IndicatorError("GARCH fit needs a series with non-zero variance")

    if init is None:
        a1, b1 = 0.05, 0.90
        init = ((1.0 - a1 - b1) * var, a1, b1)

    floor = 1e-12 * max(var, 1e-30)

    def negloglik(theta):
        a0, a1, b1 = theta
        if a0 <= 0.0 or a1 < 0.0 or b1 < 0.0 or a1 + b1 > 1.0 - GARCH_MARGIN:
            return 1e12
        return -garch_loglik(x, a0, a1, b1)

    res = minimize(negloglik, np.asarray(init, dtype=float), method="Nelder-Mead",
                   options={"maxiter": 10000, "maxfev": 10000,
                            "xatol": 1e-10, "fatol": 1e-10})
    best = res.x
    if negloglik(best) > negloglik(init) + 1e-9:
        raise IndicatorError(f"GARCH optimisation failed to converge: {res.message}")
    a0, a1, b1 = float(max(best[0], floor)), float(max(best[1], 0.0)), float(max(best[2], 0.0))
    sigma2 = garch_recursion(x, a0, a1, b1)
    return GarchParams(alpha0=a0, alpha1=a1, beta1=b1,
                       loglik=float(garch_loglik(x, a0, a1, b1)),
                       sigma2_series=sigma2)


def garch_volatility(params: GarchParams) -> np.ndarray:
    """Per-day conditional volatility sqrt(sigma2_t), aligned with the input."""
    return np.sqrt(params.sigma2_series)


def simulate_garch11(alpha0, alpha1, beta1, length, seed) -> np.ndarray:
    """Simulate x_t = eta_t sigma_t with the multiplicative variance recursion
    sigma2_t = a0 + (a1 eta_{t-1}^2 + b1) sigma2_{t-1}; Gaussian innovations."""
    rng = np.random.default_rng(seed)
    eta = rng.standard_normal(length)
    x = np.empty(length)
    sigma2 = alpha0 / (1.0 - alpha1 - beta1)
    for t in range(length):
        x[t] = eta[t] * np.sqrt(sigma2)
        sigma2 = alpha0 + (alpha1 * eta[t] ** 2 + beta1) * sigma2
    return x


# ---------------------------------------------------------------------------
# Minimum-risk portfolio (long-only Markowitz)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Portfolio:
    weights: np.ndarray
    risk: float


def min_risk_portfolio(omega) -> Portfolio:
    """Long-only minimum-variance weights: argmin w'Ωw, sum(w)=1, w >= 0.

    Exact active-set solve over the simplex. The input must be symmetric
    (tolerance 1e-8); it is symmetrised and, if a restricted solve turns out
    singular, diagonally regularised by +1e-10.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise IndicatorError("covariance matrix must be square")
    n = omega.shape[0]
    scale = max(np.abs(omega).max(), 1.0)
    if np.abs(omega - omega.T).max() > 1e-8 * scale:
        raise IndicatorError("covariance matrix is not symmetric")
    omega = (omega + omega.T) / 2.0
    try:
        np.linalg.cholesky(omega)
    except np.linalg.LinAlgError:
        # singular PSD input (e.g. more assets than observations): the ridge
        # restores strict convexity so the active set terminates
        omega = omega + 1e-10 * np.eye(n)

    def solve_free(idx):
        sub = omega[np.ix_(idx, idx)]
        ones = np.ones(len(idx))
        try:
            y = np.linalg.solve(sub, ones)
            bad = not np.all(np.isfinite(y)) or np.abs(sub @ y - ones).max() > 1e-6
        except np.linalg.LinAlgError:
            bad = True
        if bad:
            y = np.linalg.solve(sub + 1e-10 * np.eye(len(idx)), ones)
        if abs(y.sum()) < 1e-300:
            raise IndicatorError("degenerate covariance: cannot normalise weights")
        return y / y.sum()

    # active-set with feasibility line search: each released constraint
    # strictly lowers the objective, so the iteration terminates
    free = sorted(range(n))
    w = np.full(n, 1.0 / n)
    for _ in range(20 * n + 100):
        wf = solve_free(free)
        if np.all(wf >= -1e-12):
            w = np.zeros(n)
            w[free] = np.maximum(wf, 0.0)
            grad = 2.0 * omega @ w
            lam = float(grad[free].mean())
            zero = [i for i in range(n) if i not in free]
            if not zero:
                break
            worst = min(zero, key=lambda i: grad[i])
            if grad[worst] < lam - 1e-8 * max(1.0, abs(lam)):
                free.append(worst)
                free.sort()
                continue
            break
        # walk from the current feasible point towards wf until a weight
        # hits zero; clamp it and resolve on the smaller set
        cur = w[free]
        step = wf - cur
        shrink = step < -1e-300
        with np.errstate(divide="ignore"):
            alphas = np.where(shrink, cur / -step, np.inf)
        alpha = min(float(alphas.min()), 1.0)
        cur = np.maximum(cur + alpha * step, 0.0)
        w = np.zeros(n)
        w[free] = cur
        free = sorted(i for i, v in zip(free, cur) if v > 1e-14)
        if not free:  # numerically everything collapsed; keep the best single asset
            free = [int(np.argmin(np.diag(omega)))]
    else:
        raise IndicatorError("active-set portfolio solve failed to terminate")
    if abs(w.sum() - 1.0) > 1e-15:  # keep exact solutions (e.g. 1/N) untouched
        w = w / w.sum()
    return Portfolio(weights=w, risk=float(np.sqrt(max(w @ omega @ w, 0.0))))


def index_return_series(index_prices, epochs) -> np.ndarray:
    """Log-return of the market index on each epoch's end date.

    ``epochs`` are [start, end) ranges over the *returns* panel; the value for
    an epoch is the single-day log-return at its last row.
    """
    p = np.asarray(index_prices, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p <= 0.0):
        raise IndicatorError("index prices must be finite and strictly positive")
    returns = np.diff(np.log(p))
    return np.array([returns[end - 1] for _, end in epochs])


def indicator_correlogram(series: dict[str, np.ndarray], columns) -> np.ndarray:
    """Pairwise Pearson correlations across epochs between indicator columns."""
    cols = list(columns)
    data = []
    length = None
    for name in cols:
        v = np.asarray(series[name], dtype=float)
        if length is None:
            length = len(v)
        elif len(v) != length:
            raise IndicatorError("indicator columns must share the same epochs")
        data.append(v)
    if length is None or length < 3:
        raise IndicatorError("correlogram needs at least 3 epochs")
    stack = np.vstack(data)
    if np.any(stack.std(axis=1) == 0.0):
        flat = [c for c, row in zip(cols, stack) if row.std() == 0.0]
        raise IndicatorError(f"zero-variance indicator column(s): {flat}")
    return np.corrcoef(stack)
