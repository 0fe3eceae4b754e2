from gridvol.exceptions import InsufficientData
from timeseries.utilities.statistics import observed_values, moment_shape
from diagnostics.utilities.distributions import chi2_sf
from timeseries.models import TimeSeries
from diagnostics.models import TestResult


def jarque_bera_from_moments(skewness: float, kurtosis: float, n: int) -> TestResult:
    """
    Jarque-Bera statistic n/6 * (S^2 + (K-3)^2/4) from published moments (raw kurtosis).
    """
    statistic = n / 6.0 * (skewness ** 2 + (kurtosis - 3.0) ** 2 / 4.0)
    p_value = chi2_sf(statistic, 2)
    return TestResult(
        name="jarque_bera",
        statistic=float(statistic),
        p_value=p_value,
        lags=0,
        reject_at_5pct=p_value < 0.05,
        details={'skewness': float(skewness), 'kurtosis': float(kurtosis), 'n': int(n)},
    )


def jarque_bera(s: TimeSeries) -> TestResult:
    x = observed_values(s)
    if len(x) < 8:
        raise InsufficientData(f"Jarque-Bera needs at least 8 observations, got {len(x)}.")
    skewness, kurtosis = moment_shape(x)
    return jarque_bera_from_moments(skewness, kurtosis, len(x))
