import numpy as np

from gridvol.exceptions import ConstantSeries, InsufficientData
from timeseries.models import TimeSeries, SummaryStats


def observed_values(s: TimeSeries) -> np.ndarray:
    """Values with missing entries dropped."""
    values = s.values
    return values[~np.isnan(values)]


def central_moments(x: np.ndarray) -> tuple:
    """Second, third and fourth central moments with divisor n."""
    dev = x - x.mean()
    return np.mean(dev ** 2), np.mean(dev ** 3), np.mean(dev ** 4)


def moment_shape(x: np.ndarray) -> tuple:
    """
    Sample skewness m3/m2^1.5 and raw kurtosis m4/m2^2.
    """
    m2, m3, m4 = central_moments(x)
    if m2 <= 0:
        raise ConstantSeries("Skewness and kurtosis are undefined for a constant sample.")
    return m3 / m2 ** 1.5, m4 / m2 ** 2


def summary_stats(s: TimeSeries) -> SummaryStats:
    """
    Descriptive statistics of the observed values of `s`.

    Std uses divisor n-1, the shape moments divisor n, and quartiles are linearly
    interpolated (type 7). Kurtosis is raw, not excess.
    """
    x = observed_values(s)
    n = len(x)
    if n < 2:
        raise InsufficientData(f"Summary statistics need at least 2 observations, got {n}.")

    skewness, kurtosis = moment_shape(x)
    q1, median, q3 = np.percentile(x, [25, 50, 75])
    mean = float(x.mean())
    std = float(x.std(ddof=1))

    return SummaryStats(
        n=n,
        min=float(x.min()),
        max=float(x.max()),
        mean=mean,
        median=float(median),
        std=std,
        cv=std / mean if mean != 0 else float('nan'),
        skewness=float(skewness),
        kurtosis=float(kurtosis),
        iqr=float(q3 - q1),
    )
