import pandas as pd
import numpy as np

from gridvol.exceptions import DomainError, InsufficientData
from volatility.models import VolPath, YearlyVolatility
from timeseries.models import TimeSeries


def annualize(sigma, window: int, days: int = 365):
    """Scale a window volatility by sqrt(days/window)."""
    if window < 1:
        raise DomainError(f"window must be a positive integer, got {window}.")
    return sigma * np.sqrt(days / window)


def rolling_volatility(returns: TimeSeries, window: int, annualize_result: bool = False,
                       days: int = 365) -> VolPath:
    """
    Trailing-window sample standard deviation of returns.

    Parameters
    ----------
    returns : TimeSeries
        Complete (imputed) return series.
    window : int
        Window length m >= 2; the value dated t uses observations t-m+1..t.
    annualize_result : bool
        Multiply by sqrt(days/m).
    days : int
        Trading days per year.

    Returns
    -------
    VolPath
        n - m + 1 values dated at each window end.
    """
    if window < 2:
        raise DomainError(f"Rolling window must be at least 2, got {window}.")
    if len(returns) < window:
        raise InsufficientData(f"Rolling window {window} exceeds series length {len(returns)}.")

    sigma = returns.to_series().rolling(window).std(ddof=1).iloc[window - 1:]
    # clip round-off below zero on flat windows
    values = np.clip(sigma.to_numpy(), 0.0, None)
    if annualize_result:
        values = annualize(values, window, days)

    return VolPath(
        sigma.index,
        values,
        {'estimator': "rolling", 'window': window, 'annualized': annualize_result, 'days': days},
    )


def volatility_by_year(path: VolPath, window: int, days: int = 365) -> list:
    """
    Per-calendar-year Min/Max/Mean/std of a (non-annualized) rolling volatility path, with the
    annualized Min/Max/Mean alongside.
    """
    sigma = pd.Series(path.sigma, index=path.dates)
    rows = []
    for year, values in sigma.groupby(sigma.index.year):
        rows.append(YearlyVolatility(
            year=int(year),
            min=float(values.min()),
            max=float(values.max()),
            mean=float(values.mean()),
            std=float(values.std(ddof=1)) if len(values) > 1 else 0.0,
            annualized_min=float(annualize(values.min(), window, days)),
            annualized_max=float(annualize(values.max(), window, days)),
            annualized_mean=float(annualize(values.mean(), window, days)),
        ))
    return rows
