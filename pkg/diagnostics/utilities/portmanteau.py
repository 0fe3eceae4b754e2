import numpy as np

from gridvol.exceptions import DomainError, InsufficientData
from timeseries.utilities.correlation import autocorrelations, durbin_levinson
from timeseries.utilities.statistics import observed_values
from diagnostics.utilities.distributions import chi2_sf
from diagnostics.models import TestResult, CorrelogramRow
from timeseries.models import TimeSeries


def ljung_box_from_acf(rho, n: int, dof: int = 0) -> list:
    """
    Ljung-Box Q(m) = n(n+2) sum_{k<=m} rho_k^2/(n-k) for m = 1..len(rho).

    Parameters
    ----------
    rho : sequence of float
        Autocorrelations at lags 1..K.
    n : int
        Sample size the autocorrelations were computed on.
    dof : int
        Degrees of freedom absorbed by a fitted model; the chi-square reference for Q(m) has
        m - dof degrees of freedom. Lags with m <= dof carry no p-value.
    """
    rho = np.asarray(rho, dtype=float)
    if dof < 0:
        raise DomainError(f"dof must be nonnegative, got {dof}.")
    if len(rho) >= n:
        raise InsufficientData(f"{len(rho)} autocorrelations cannot come from a sample of {n}.")

    lags = np.arange(1, len(rho) + 1)
    q = n * (n + 2.0) * np.cumsum(rho ** 2 / (n - lags))

    results = []
    for m, statistic in zip(lags, q):
        df = int(m) - dof
        p_value = chi2_sf(statistic, df) if df >= 1 else None
        results.append(TestResult(
            name="ljung_box",
            statistic=float(statistic),
            p_value=p_value,
            lags=int(m),
            reject_at_5pct=p_value is not None and p_value < 0.05,
            details={'n': int(n), 'dof': int(dof)},
        ))
    return results


def _check_portmanteau_lag(n: int, max_lag: int):
    if max_lag < 1:
        raise DomainError(f"max_lag must be a positive integer, got {max_lag}.")
    if max_lag >= n / 4.0:
        raise InsufficientData(f"Ljung-Box needs max_lag < n/4, got max_lag={max_lag} with n={n}.")


def ljung_box(s: TimeSeries, max_lag: int, dof: int = 0) -> list:
    """One Ljung-Box result per lag 1..max_lag."""
    x = observed_values(s)
    _check_portmanteau_lag(len(x), max_lag)
    return ljung_box_from_acf(autocorrelations(x, max_lag), len(x), dof=dof)


def squared_residual_ljung_box(std_residuals: TimeSeries, max_lag: int) -> list:
    """Ljung-Box on squared standardized residuals, the check for leftover ARCH effects."""
    z = observed_values(std_residuals)
    _check_portmanteau_lag(len(z), max_lag)
    return ljung_box_from_acf(autocorrelations(z ** 2, max_lag), len(z))


def correlogram(s: TimeSeries, max_lag: int = 7) -> list:
    """
    Combined ACF / PACF / Ljung-Box table, one row per lag.
    """
    x = observed_values(s)
    _check_portmanteau_lag(len(x), max_lag)
    rho = autocorrelations(x, max_lag)
    phi = durbin_levinson(rho)
    q_results = ljung_box_from_acf(rho, len(x))
    return [
        CorrelogramRow(lag=k, acf=float(r), pacf=float(p), q_stat=q.statistic, p_value=q.p_value)
        for k, (r, p, q) in enumerate(zip(rho, phi, q_results), start=1)
    ]
