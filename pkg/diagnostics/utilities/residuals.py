from statsmodels.tsa.tsatools import lagmat
import statsmodels.api as sm
import numpy as np

from gridvol.exceptions import DegenerateResiduals, DomainError, InsufficientData
from timeseries.utilities.statistics import observed_values
from diagnostics.utilities.distributions import chi2_sf
from timeseries.models import TimeSeries
from diagnostics.models import TestResult


def arch_lm(residuals: TimeSeries, lags: int = 7) -> TestResult:
    """
    Engle's ARCH-LM test.

    Regresses e_t^2 on a constant and e_{t-1}^2..e_{t-lags}^2; the statistic is n_eff * R^2
    with n_eff = n - lags, referred to chi-square(lags).
    """
    e = observed_values(residuals)
    n = len(e)
    if lags < 1:
        raise DomainError(f"ARCH-LM lags must be a positive integer, got {lags}.")
    if n <= lags + 10:
        raise InsufficientData(f"ARCH-LM with {lags} lags needs more than {lags + 10} observations, got {n}.")

    e2 = e ** 2
    lagged = lagmat(e2, maxlag=lags, trim="both")
    target = e2[lags:]
    n_eff = len(target)

    # a flat squared-residual series carries no ARCH effect
    if np.ptp(target) == 0:
        r_squared = 0.0
    else:
        results = sm.OLS(target, sm.add_constant(lagged, has_constant="add")).fit()
        r_squared = float(np.clip(results.rsquared, 0.0, 1.0))

    statistic = n_eff * r_squared
    p_value = chi2_sf(statistic, lags)
    return TestResult(
        name="arch_lm",
        statistic=float(statistic),
        p_value=p_value,
        lags=lags,
        reject_at_5pct=p_value < 0.05,
        details={'n_eff': n_eff, 'r_squared': r_squared},
    )


def durbin_watson(residuals: TimeSeries) -> TestResult:
    e = observed_values(residuals)
    if len(e) < 3:
        raise InsufficientData(f"Durbin-Watson needs at least 3 residuals, got {len(e)}.")
    denom = np.dot(e, e)
    if denom == 0:
        raise DegenerateResiduals("Durbin-Watson is undefined for all-zero residuals.")
    statistic = float(np.sum(np.diff(e) ** 2) / denom)
    return TestResult(name="durbin_watson", statistic=statistic, lags=1, reject_at_5pct=False)
