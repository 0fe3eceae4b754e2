import numpy as np

from gridvol.exceptions import ConstantSeries, DomainError, VarianceNonPositive
from diagnostics.utilities.residuals import durbin_watson
from timeseries.models import TimeSeries
from estimation.models import FitResult


def information_criteria(loglik: float, k_params: int, n: float) -> tuple:
    """
    Per-observation Akaike, Schwarz and Hannan-Quinn criteria.

    aic = (-2l + 2k)/n, bic = (-2l + k ln n)/n, hq = (-2l + 2k ln ln n)/n
    """
    if k_params < 1:
        raise DomainError(f"k_params must be positive, got {k_params}.")
    if n <= k_params:
        raise DomainError(f"Criteria need more observations than parameters, got n={n}, k={k_params}.")
    aic = (-2.0 * loglik + 2.0 * k_params) / n
    bic = (-2.0 * loglik + k_params * np.log(n)) / n
    hq = (-2.0 * loglik + 2.0 * k_params * np.log(np.log(n))) / n
    return float(aic), float(bic), float(hq)


def goodness_of_fit_values(y: TimeSeries, residuals: TimeSeries, k_mean: int) -> tuple:
    """
    R^2 = 1 - SSR/SST, adjusted R^2 with k_mean mean-equation parameters, and the
    Durbin-Watson statistic (NaN for identically zero residuals).
    """
    y.check_aligned(residuals)
    values, e = y.values, residuals.values
    sst = np.sum((values - values.mean()) ** 2)
    if sst == 0:
        raise ConstantSeries(f"R-squared is undefined for the constant series '{y.name}'.")
    n = len(values)
    r_squared = 1.0 - np.dot(e, e) / sst
    adj = 1.0 - (1.0 - r_squared) * (n - 1) / (n - k_mean) if n > k_mean else float('nan')
    dw = durbin_watson(residuals).statistic if np.any(e != 0) else float('nan')
    return float(r_squared), float(adj), float(dw)


def goodness_of_fit(fit: FitResult, y: TimeSeries) -> tuple:
    """(r_squared, adj_r_squared, dw) on the post-conditioning sample of `y`."""
    fit.residuals.check_aligned(y)
    p0 = fit.spec.mean.conditioning
    return goodness_of_fit_values(y[p0:], fit.effective_residuals, fit.spec.mean.n_params)


def standardized_residuals(fit: FitResult) -> TimeSeries:
    e = fit.effective_residuals
    sigma = fit.variance.sigma
    if np.any(sigma <= 0):
        raise VarianceNonPositive("Standardized residuals need a strictly positive conditional sigma.")
    return e.with_values(e.values / sigma, f"std_{e.name}")
