import logging
import pandas as pd
import numpy as np

from gridvol.exceptions import ConstantSeries, DomainError, RangeError
from garch.utilities.recursions import LOG_VARIANCE_BOUNDS, expected_abs_z, persistence, regressor_matrix
from volatility.utilities.persistence import INTEGRATED_THRESHOLD, egarch_persistence_summary
from forecasting.models import ForecastReport, VarianceForecast
from timeseries.utilities.statistics import summary_stats
from garch.utilities.simulation import draw_innovations
from estimation.models import FitResult
from timeseries.models import TimeSeries


logger = logging.getLogger(__name__)


def theil_decomposition(actual: np.ndarray, fitted: np.ndarray) -> tuple:
    """
    Theil's U = sqrt(MSE) / (sqrt(mean f^2) + sqrt(mean y^2)) and the bias, variance and
    covariance proportions of the MSE (population standard deviations). A perfect fit gives
    U = 0 and proportions (0, 0, 1).
    """
    actual, fitted = np.asarray(actual, dtype=float), np.asarray(fitted, dtype=float)
    mse = float(np.mean((fitted - actual) ** 2))
    if mse == 0:
        return 0.0, 0.0, 0.0, 1.0
    theil_u = np.sqrt(mse) / (np.sqrt(np.mean(fitted ** 2)) + np.sqrt(np.mean(actual ** 2)))
    bias = (fitted.mean() - actual.mean()) ** 2 / mse
    variance = (fitted.std() - actual.std()) ** 2 / mse
    return float(theil_u), float(bias), float(variance), float(1.0 - bias - variance)


def _stats_or_none(s: TimeSeries):
    try:
        return summary_stats(s)
    except ConstantSeries:
        return None


def in_sample_forecast(fit: FitResult, y: TimeSeries) -> ForecastReport:
    """Static one-step fitted values y_t - e_t on the post-conditioning sample of `y`."""
    fit.residuals.check_aligned(y)
    p0 = fit.spec.mean.conditioning
    actual = y[p0:]
    fitted = actual.with_values(actual.values - fit.effective_residuals.values, f"fitted_{y.name}")
    theil_u, bias, variance, covariance = theil_decomposition(actual.values, fitted.values)
    logger.info(f"In-sample forecast of '{y.name}': Theil U={theil_u:.4f}, bias={bias:.4f}")
    return ForecastReport(
        fitted=fitted,
        theil_u=theil_u,
        bias_proportion=bias,
        variance_proportion=variance,
        covariance_proportion=covariance,
        fitted_stats=_stats_or_none(fitted),
        actual_stats=_stats_or_none(actual),
    )


def _origin_index(dates: pd.DatetimeIndex, origin) -> int:
    # last sample date on or before the origin
    origin = pd.Timestamp(origin).normalize()
    if origin < dates[0] or origin > dates[-1]:
        raise RangeError(
            f"Forecast origin {origin.date()} is outside the fitted sample "
            f"{dates[0].date()}..{dates[-1].date()}."
        )
    return int(dates.searchsorted(origin, side="right")) - 1


def _closed_form_path(fit: FitResult, t: int, horizon: int, drift: float) -> np.ndarray:
    spec, params = fit.spec.variance, fit.params
    init = fit.variance.params.get('init', float(fit.variance.variance[0]))
    e = fit.effective_residuals.values[:t + 1]
    h = list(np.r_[np.full(spec.p, init), fit.variance.variance[:t + 1]])
    e2 = list(np.r_[np.full(spec.q, init), e ** 2])
    neg = list(np.r_[np.full(spec.q, 0.5), (e < 0).astype(float)])
    leverage = params.l if spec.family == "gjr" else (0.0,) * spec.q

    path = np.empty(horizon)
    for step in range(horizon):
        value = drift
        for j in range(1, spec.q + 1):
            value += (params.a[j - 1] + leverage[j - 1] * neg[-j]) * e2[-j]
        for i in range(1, spec.p + 1):
            value += params.g[i - 1] * h[-i]
        path[step] = value
        # beyond the origin E[e^2] is the variance forecast and shocks are negative half the time
        h.append(value)
        e2.append(value)
        neg.append(0.5)
    return path


def _monte_carlo_path(fit: FitResult, t: int, horizon: int, drift: float, paths: int,
                      seed: int) -> np.ndarray:
    spec, params, dist = fit.spec.variance, fit.params, fit.spec.dist
    init = fit.variance.params.get('init', float(fit.variance.variance[0]))
    e_abs = expected_abs_z(dist, params.nu)
    lo, hi = LOG_VARIANCE_BOUNDS

    h = fit.variance.variance[:t + 1]
    z = fit.effective_residuals.values[:t + 1] / np.sqrt(h)
    # missing pre-sample shocks contribute nothing
    log_h = np.tile(np.r_[np.full(spec.p, np.log(init)), np.log(h)][-spec.p:], (paths, 1))
    z_hist = np.tile(np.r_[np.full(spec.q, np.nan), z][-spec.q:], (paths, 1))

    rng = np.random.default_rng(seed)
    draws = draw_innovations(rng, dist.kind, (paths, horizon), params.nu)
    path = np.empty(horizon)
    for step in range(horizon):
        value = np.full(paths, drift)
        for i in range(1, spec.p + 1):
            value += params.g[i - 1] * log_h[:, -i]
        for j in range(1, spec.q + 1):
            news = params.a[j - 1] * (np.abs(z_hist[:, -j]) - e_abs) + params.l[j - 1] * z_hist[:, -j]
            value += np.nan_to_num(news)
        value = np.clip(value, lo, hi)
        path[step] = np.mean(np.exp(value))
        log_h = np.column_stack([log_h[:, 1:], value])
        z_hist = np.column_stack([z_hist[:, 1:], draws[:, step]])
    return path


def forecast_variance(fit: FitResult, origin, horizon: int, paths: int = 10000,
                      seed: int = 0) -> VarianceForecast:
    """
    Multi-step conditional variance forecast from `origin`.

    Parameters
    ----------
    fit : FitResult
        Fitted model; variance regressors are held at their origin values.
    origin : date-like
        Forecast origin inside the fitted sample. A date between two sample dates uses the
        last sample date before it.
    horizon : int
        Number of steps ahead.
    paths, seed : int
        Monte Carlo controls for EGARCH, which has no closed-form multi-step forecast.

    Returns
    -------
    VarianceForecast
        GARCH and GJR paths follow the closed-form recursion and decay geometrically toward
        the unconditional variance when persistence is below one.
    """
    if horizon < 1:
        raise DomainError(f"Forecast horizon must be positive, got {horizon}.")
    spec, params = fit.spec.variance, fit.params
    dates = fit.variance.dates
    t = _origin_index(dates, origin)

    # variance intercept with regressors held at the origin
    drift = params.k
    if spec.regressors:
        drift += float(regressor_matrix(spec.regressors, dates[t:t + 1])[0] @ np.array(params.gamma))

    if spec.family == "egarch":
        if paths < 1:
            raise DomainError(f"Monte Carlo forecast needs at least one path, got {paths}.")
        path = _monte_carlo_path(fit, t, horizon, drift, paths, seed)
        unconditional = egarch_persistence_summary(drift, sum(params.g)).unconditional_variance
        method = "monte_carlo"
    else:
        path = _closed_form_path(fit, t, horizon, drift)
        total = persistence(params, spec)
        unconditional = drift / (1.0 - total) if total < INTEGRATED_THRESHOLD else None
        method = "closed_form"

    logger.info(
        f"Variance forecast of {fit.spec.label} from {dates[t].date()} over {horizon} steps ({method})"
    )
    return VarianceForecast(
        origin=dates[t],
        horizon=horizon,
        dates=pd.date_range(dates[t], periods=horizon + 1, freq="D")[1:],
        path=path,
        unconditional=None if unconditional is None else float(unconditional),
        method=method,
    )
