from scipy.signal import lfilter
import numpy as np

from gridvol.exceptions import DomainError, InsufficientData
from timeseries.models import TimeSeries
from volatility.models import VolPath


EWMA_INITS = ("first_squared", "sample_variance", "given")


def _check_lambda(lam: float):
    if not 0.0 < lam < 1.0:
        raise DomainError(f"EWMA lambda must lie in (0, 1), got {lam}.")


def ewma_filter(cross: np.ndarray, lam: float, start: float) -> np.ndarray:
    """
    s_0 = start and s_t = lam * s_{t-1} + (1 - lam) * cross_{t-1}, for t = 1..n-1.
    """
    out, _ = lfilter([0.0, 1.0 - lam], [1.0, -lam], np.asarray(cross, dtype=float), zi=[start])
    return out


def initial_variance(r: np.ndarray, init: str, v0: float = None) -> float:
    if init == "first_squared":
        return float(r[0] ** 2)
    elif init == "sample_variance":
        return float(np.var(r))
    elif init == "given":
        if v0 is None or v0 < 0:
            raise DomainError(f"init='given' needs a nonnegative v0, got {v0}.")
        return float(v0)
    raise DomainError(f"Invalid EWMA init: {init}. Expected one of {EWMA_INITS}.")


def ewma_variance(returns: TimeSeries, lam: float = 0.94, init: str = "sample_variance",
                  v0: float = None) -> VolPath:
    """
    Exponentially weighted moving-average variance filter,
    sigma_t^2 = (1 - lam) r_{t-1}^2 + lam sigma_{t-1}^2.

    The first variance is the sample variance of the returns, the first squared return, or a
    given `v0`. The result is the zero-intercept integrated GARCH(1,1) path with A = 1 - lam
    and G = lam.
    """
    _check_lambda(lam)
    r = returns.values
    if len(r) < 2:
        raise InsufficientData(f"EWMA needs at least 2 returns, got {len(r)}.")

    variance = ewma_filter(r * r, lam, initial_variance(r, init, v0))
    return VolPath(returns.dates, np.sqrt(variance), {'estimator': "ewma", 'lambda': lam, 'init': init})


def ewma_correlation(x: TimeSeries, y: TimeSeries, lam: float = 0.94) -> TimeSeries:
    """
    EWMA conditional correlation c_t / sqrt(vx_t vy_t), where the covariance c_t and the
    variances follow the same lagged recursion on demeaned values, started from the
    full-sample moments.
    Periods with a zero variance are reported as missing.
    """
    _check_lambda(lam)
    x.check_aligned(y)
    a, b = x.values, y.values
    if len(a) < 2:
        raise InsufficientData(f"EWMA correlation needs at least 2 observations, got {len(a)}.")

    da, db = a - a.mean(), b - b.mean()
    cov = ewma_filter(da * db, lam, float(np.mean(da * db)))
    var_x = ewma_filter(da * da, lam, float(np.mean(da * da)))
    var_y = ewma_filter(db * db, lam, float(np.mean(db * db)))

    denom = np.sqrt(var_x * var_y)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(denom > 0, cov / denom, np.nan)
    rho = np.clip(rho, -1.0, 1.0)
    return TimeSeries(x.dates, rho, f"ewma_corr_{x.name}_{y.name}")


def effective_window(lam: float, tolerance: float = 0.01) -> int:
    """Smallest K with lam^K <= tolerance."""
    _check_lambda(lam)
    if not 0.0 < tolerance < 1.0:
        raise DomainError(f"tolerance must lie in (0, 1), got {tolerance}.")
    return int(np.ceil(np.log(tolerance) / np.log(lam) - 1e-12))
