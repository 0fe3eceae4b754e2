from dataclasses import dataclass, field
import pandas as pd
import numpy as np

from gridvol.exceptions import AlignmentError, DomainError
from timeseries.models import TimeSeries


# Conditional standard deviation path produced by any volatility estimator
@dataclass(frozen=True, eq=False)
class VolPath:
    """
    Per-period conditional standard deviation on a date index. `params` records the estimator
    settings (window, lambda, or the fitted variance-equation coefficients).
    """
    dates: pd.DatetimeIndex
    sigma: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        dates = pd.DatetimeIndex(self.dates)
        sigma = np.array(self.sigma, dtype=float).reshape(-1)
        if len(dates) != len(sigma):
            raise AlignmentError(f"VolPath has {len(dates)} dates but {len(sigma)} values.")
        if np.any(sigma < 0):
            raise DomainError("Conditional standard deviation must be nonnegative.")
        sigma.setflags(write=False)
        object.__setattr__(self, 'dates', dates)
        object.__setattr__(self, 'sigma', sigma)

    def __len__(self):
        return len(self.sigma)

    @property
    def variance(self) -> np.ndarray:
        return self.sigma ** 2

    def to_timeseries(self, name: str = "sigma") -> TimeSeries:
        return TimeSeries(self.dates, self.sigma, name)


@dataclass(frozen=True)
class PersistenceSummary:
    """
    Persistence of volatility shocks. `half_life_days` and `unconditional_sigma` are None
    (Undefined) when the process is integrated or explosive.
    """
    persistence: float
    half_life_days: float = None
    unconditional_sigma: float = None

    @property
    def is_integrated(self) -> bool:
        return self.half_life_days is None

    @property
    def unconditional_variance(self):
        return None if self.unconditional_sigma is None else self.unconditional_sigma ** 2


@dataclass(frozen=True)
class PersistenceRow:
    label: str
    a: float
    g: float
    summary: PersistenceSummary
    half_life_whole_days: int = None


@dataclass(frozen=True)
class YearlyVolatility:
    year: int
    min: float
    max: float
    mean: float
    std: float
    annualized_min: float
    annualized_max: float
    annualized_mean: float
