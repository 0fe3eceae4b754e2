from dataclasses import dataclass
import pandas as pd
import numpy as np

from timeseries.models import SummaryStats, TimeSeries


# In-sample (static) forecast quality
@dataclass(frozen=True, eq=False)
class ForecastReport:
    """
    Fitted values y_t - e_t over the post-conditioning sample and Theil's inequality
    coefficient with its bias / variance / covariance decomposition.
    """
    fitted: TimeSeries
    theil_u: float
    bias_proportion: float
    variance_proportion: float
    covariance_proportion: float
    fitted_stats: SummaryStats = None
    actual_stats: SummaryStats = None


@dataclass(frozen=True, eq=False)
class VarianceForecast:
    """
    h-step conditional variance forecasts from `origin`. `unconditional` is None when the
    fitted variance equation has no finite long-run level.
    """
    origin: pd.Timestamp
    horizon: int
    dates: pd.DatetimeIndex
    path: np.ndarray
    unconditional: float = None
    method: str = "closed_form"

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(self.path)

    def to_timeseries(self, name: str = "variance_forecast") -> TimeSeries:
        return TimeSeries(self.dates, self.path, name)
