from dataclasses import dataclass, field
import pandas as pd
import numpy as np

from gridvol.exceptions import AlignmentError, DomainError, InsufficientData


# Container for date-indexed observations (NaN marks a missing entry)
@dataclass(frozen=True, eq=False)
class TimeSeries:
    """
    Immutable daily series. Dates are normalised to midnight and must be strictly increasing;
    values are stored as a read-only float array of the same length.
    """
    dates: pd.DatetimeIndex
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        dates = pd.DatetimeIndex(self.dates).normalize()
        values = np.array(self.values, dtype=float).reshape(-1)

        if len(dates) == 0:
            raise InsufficientData(f"Series '{self.name}' is empty.")
        if len(dates) != len(values):
            raise AlignmentError(
                f"Series '{self.name}' has {len(dates)} dates but {len(values)} values."
            )
        if not (dates.is_monotonic_increasing and dates.is_unique):
            raise DomainError(f"Dates of series '{self.name}' must be strictly increasing.")

        values.setflags(write=False)
        object.__setattr__(self, 'dates', dates)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, key):
        if not isinstance(key, slice):
            raise TypeError("TimeSeries supports positional slicing only.")
        return TimeSeries(self.dates[key], self.values[key], self.name)

    @classmethod
    def from_series(cls, series: pd.Series, name: str = None):
        return cls(pd.DatetimeIndex(series.index), series.to_numpy(dtype=float), name or str(series.name or ""))

    @property
    def missing_count(self) -> int:
        return int(np.isnan(self.values).sum())

    @property
    def has_missing(self) -> bool:
        return self.missing_count > 0

    # method to return a pandas Series view (copy) of the data
    def to_series(self) -> pd.Series:
        return pd.Series(np.array(self.values), index=self.dates, name=self.name)

    # method to build a series with the same dates and new values
    def with_values(self, values, name: str = None):
        return TimeSeries(self.dates, values, self.name if name is None else name)

    # method to check that another series shares this series' dates exactly
    def check_aligned(self, other: "TimeSeries"):
        if len(other) != len(self) or not self.dates.equals(other.dates):
            raise AlignmentError(
                f"Series '{other.name}' is not aligned with '{self.name}' "
                f"({len(other)} vs {len(self)} observations)."
            )
        return other


@dataclass(frozen=True)
class SummaryStats:
    n: int
    min: float
    max: float
    mean: float
    median: float
    std: float
    cv: float
    skewness: float
    kurtosis: float # raw (normal = 3)
    iqr: float


@dataclass(frozen=True)
class CorrelogramEntry:
    lag: int
    acf: float
    pacf: float = field(default=float('nan'))
