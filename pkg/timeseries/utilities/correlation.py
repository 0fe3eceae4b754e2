from statsmodels.tsa.tsatools import lagmat
import numpy as np

from gridvol.exceptions import ConstantSeries, DomainError, InsufficientData
from timeseries.utilities.statistics import observed_values
from timeseries.models import TimeSeries, CorrelogramEntry


def _check_lag(n: int, max_lag: int):
    if max_lag < 1:
        raise DomainError(f"max_lag must be a positive integer, got {max_lag}.")
    if max_lag >= n:
        raise InsufficientData(f"max_lag={max_lag} must be smaller than the sample size {n}.")


def autocorrelations(x: np.ndarray, max_lag: int) -> np.ndarray:
    """
    Sample autocorrelations rho_1..rho_max_lag of `x` with the single global denominator
    sum((x - mean)^2).
    """
    x = np.asarray(x, dtype=float)
    _check_lag(len(x), max_lag)
    dev = x - x.mean()
    denom = np.dot(dev, dev)
    if denom <= 0:
        raise ConstantSeries("Autocorrelation is undefined for a constant series.")
    return np.array([np.dot(dev[:-k], dev[k:]) / denom for k in range(1, max_lag + 1)])


def durbin_levinson(rho: np.ndarray) -> np.ndarray:
    """
    Partial autocorrelations from autocorrelations rho_1..rho_K by the Durbin-Levinson
    recursion. Element k-1 is the last coefficient of the order-k Yule-Walker fit.
    """
    K = len(rho)
    pacf = np.zeros(K)
    phi = np.zeros(K)
    v = 1.0
    for k in range(K):
        if k == 0:
            a = rho[0]
        else:
            a = (rho[k] - np.dot(phi[:k], rho[k - 1::-1][:k])) / v
            phi[:k] = phi[:k] - a * phi[:k][::-1]
        phi[k] = a
        pacf[k] = a
        v *= (1.0 - a * a)
    return pacf


def acf(s: TimeSeries, max_lag: int) -> list:
    rho = autocorrelations(observed_values(s), max_lag)
    return [CorrelogramEntry(lag=k, acf=float(r)) for k, r in enumerate(rho, start=1)]


def pacf(s: TimeSeries, max_lag: int) -> list:
    """ACF and Durbin-Levinson PACF for lags 1..max_lag."""
    rho = autocorrelations(observed_values(s), max_lag)
    phi = durbin_levinson(rho)
    return [CorrelogramEntry(lag=k, acf=float(r), pacf=float(p))
            for k, (r, p) in enumerate(zip(rho, phi), start=1)]


def pacf_ols(s: TimeSeries, max_lag: int) -> np.ndarray:
    """
    PACF by successive OLS autoregressions: the lag-k value is the last slope of a
    regression of x_t on a constant and x_{t-1}..x_{t-k}.
    """
    x = observed_values(s)
    _check_lag(len(x), max_lag)
    out = np.zeros(max_lag)
    for k in range(1, max_lag + 1):
        lags = lagmat(x, maxlag=k, trim="both")
        design = np.column_stack([np.ones(len(lags)), lags])
        coef, *_ = np.linalg.lstsq(design, x[k:], rcond=None)
        out[k - 1] = coef[-1]
    return out
