import statsmodels.api as sm
import numpy as np

from gridvol.exceptions import DomainError, InsufficientData, SingularDesign
from timeseries.utilities.statistics import observed_values
from timeseries.models import TimeSeries
from diagnostics.models import TestResult


TRENDS = ("none", "constant", "constant_trend")

# Dickey-Fuller t-ratio critical values (1%, 5%, 10%) by sample size; last row is asymptotic
DF_SAMPLE_SIZES = (25, 50, 100, 250, 500, np.inf)
DF_CRITICAL_VALUES = {
    "none": (
        (-2.66, -1.95, -1.60),
        (-2.62, -1.95, -1.61),
        (-2.60, -1.95, -1.61),
        (-2.58, -1.95, -1.62),
        (-2.58, -1.95, -1.62),
        (-2.58, -1.95, -1.62),
    ),
    "constant": (
        (-3.75, -3.00, -2.63),
        (-3.58, -2.93, -2.60),
        (-3.51, -2.89, -2.58),
        (-3.46, -2.88, -2.57),
        (-3.44, -2.87, -2.57),
        (-3.43, -2.86, -2.57),
    ),
    "constant_trend": (
        (-4.38, -3.60, -3.24),
        (-4.15, -3.50, -3.18),
        (-4.04, -3.45, -3.15),
        (-3.99, -3.43, -3.13),
        (-3.98, -3.42, -3.13),
        (-3.96, -3.41, -3.12),
    ),
}


def critical_values(trend: str, nobs: int) -> dict:
    """
    Dickey-Fuller critical values for `trend`, interpolated linearly in 1/nobs between
    the tabulated sample sizes.
    """
    if trend not in TRENDS:
        raise DomainError(f"Invalid trend case: {trend}. Expected one of {TRENDS}.")
    inv_sizes = np.array([1.0 / n for n in DF_SAMPLE_SIZES])[::-1] # ascending
    table = np.array(DF_CRITICAL_VALUES[trend])[::-1]
    x = 1.0 / nobs
    return {
        level: float(np.interp(x, inv_sizes, table[:, i]))
        for i, level in enumerate(("1%", "5%", "10%"))
    }


def bracket(statistic: float, crit: dict) -> str:
    if statistic < crit["1%"]:
        return "<0.01"
    if statistic < crit["5%"]:
        return "<0.05"
    if statistic < crit["10%"]:
        return "<0.10"
    return ">=0.10"


def _deterministic_terms(nobs: int, trend: str) -> list:
    if trend not in TRENDS:
        raise DomainError(f"Invalid trend case: {trend}. Expected one of {TRENDS}.")
    columns = []
    if trend in ("constant", "constant_trend"):
        columns.append(np.ones(nobs))
    if trend == "constant_trend":
        columns.append(np.arange(1, nobs + 1, dtype=float))
    return columns


def dickey_fuller_regression(y: np.ndarray, lags: int, trend: str):
    """
    OLS of dy_t on deterministic terms, y_{t-1} and dy_{t-1}..dy_{t-lags}.

    Returns the fitted statsmodels results and the column index of y_{t-1}.
    """
    dy = np.diff(y)
    nobs = len(dy) - lags
    columns = _deterministic_terms(nobs, trend)
    level_index = len(columns)
    columns.append(y[lags:-1])
    for i in range(1, lags + 1):
        columns.append(dy[lags - i:len(dy) - i])
    design = np.column_stack(columns)

    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise SingularDesign(f"Dickey-Fuller design with {lags} lags and trend '{trend}' is singular.")

    return sm.OLS(dy[lags:], design).fit(), level_index


def adf_test(s: TimeSeries, lags: int = 0, trend: str = "constant") -> TestResult:
    """
    Augmented Dickey-Fuller test: the statistic is the t-ratio on y_{t-1}; the null of a
    unit root is judged against the embedded critical-value table.
    """
    y = observed_values(s)
    if lags < 0:
        raise DomainError(f"lags must be nonnegative, got {lags}.")
    if len(y) <= lags + 10:
        raise InsufficientData(f"ADF with {lags} lags needs more than {lags + 10} observations, got {len(y)}.")

    results, level_index = dickey_fuller_regression(y, lags, trend)
    statistic = float(results.tvalues[level_index])
    crit = critical_values(trend, int(results.nobs))
    return TestResult(
        name="adf",
        statistic=statistic,
        p_bracket=bracket(statistic, crit),
        lags=lags,
        reject_at_5pct=statistic < crit["5%"],
        critical_values=crit,
        details={'trend': trend, 'nobs': int(results.nobs), 'rho_minus_one': float(results.params[level_index])},
    )


def adf_sweep(s: TimeSeries, max_lags: int = 7, trend: str = "constant_trend") -> list:
    """ADF results for lags 0..max_lags."""
    return [adf_test(s, lags=lag, trend=trend) for lag in range(max_lags + 1)]


def newey_west_bandwidth(n: int) -> int:
    return int(np.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def long_run_variance(u: np.ndarray, bandwidth: int) -> tuple:
    """
    Short-run variance gamma_0 and Bartlett-kernel (Newey-West) long-run variance of `u`.
    """
    T = len(u)
    gamma0 = np.dot(u, u) / T
    lrv = gamma0
    for j in range(1, bandwidth + 1):
        gamma_j = np.dot(u[j:], u[:-j]) / T
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma_j
    return gamma0, lrv


def pp_test(s: TimeSeries, trend: str = "constant") -> TestResult:
    """
    Phillips-Perron Z_t test: the zero-lag Dickey-Fuller t-ratio corrected for serial
    correlation with a Newey-West long-run variance.
    """
    y = observed_values(s)
    n = len(y)
    if n < 30:
        raise InsufficientData(f"Phillips-Perron needs at least 30 observations, got {n}.")

    # zero-lag Dickey-Fuller regression
    results, level_index = dickey_fuller_regression(y, 0, trend)
    t_ratio = float(results.tvalues[level_index])
    se = float(results.bse[level_index])
    T = int(results.nobs)
    resid = np.asarray(results.resid)
    s2 = float(results.ssr) / results.df_resid

    # Bartlett-weighted long-run variance of the residuals
    bandwidth = newey_west_bandwidth(n)
    gamma0, lrv = long_run_variance(resid, bandwidth)
    if lrv <= 0:
        raise SingularDesign("Phillips-Perron long-run variance is not positive.")

    # rescale the t-ratio and remove the serial-correlation bias
    statistic = float(
        np.sqrt(gamma0 / lrv) * t_ratio
        - (lrv - gamma0) / (2.0 * np.sqrt(lrv)) * (T * se / np.sqrt(s2))
    )
    crit = critical_values(trend, T)
    return TestResult(
        name="pp",
        statistic=statistic,
        p_bracket=bracket(statistic, crit),
        lags=bandwidth,
        reject_at_5pct=statistic < crit["5%"],
        critical_values=crit,
        details={
            'trend': trend,
            'nobs': T,
            'uncorrected_statistic': t_ratio,
            'short_run_variance': float(gamma0),
            'long_run_variance': float(lrv),
            'bandwidth': bandwidth,
        },
    )
