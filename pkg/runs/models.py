from dataclasses import dataclass, field
import pandas as pd

from gridvol.exceptions import ConfigError
from timeseries.models import TimeSeries


# Named series read from one delimited file, all on its date index
@dataclass(frozen=True, eq=False)
class Dataset:
    dates: pd.DatetimeIndex
    series: dict
    sources: tuple = ()

    def __getitem__(self, name) -> TimeSeries:
        try:
            return self.series[name]
        except KeyError:
            raise ConfigError(f"Series '{name}' not found in dataset (available: {', '.join(self.names)}).")

    def __contains__(self, name):
        return name in self.series

    @property
    def names(self) -> list:
        return list(self.series)


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one `run` invocation needs, validated before any file is read. Model flags
    that a command does not use are ignored by it.
    """
    command: str
    name: str
    out: str = "."
    data: str = None
    date_col: str = "date"
    date_format: str = None
    target: str = None
    transforms: tuple = ()
    span: int = None
    max_gap: int = None
    # model
    ar: int = 0
    ma: int = 0
    garch: tuple = (1, 1)
    family: str = "garch"
    dist: str = "normal"
    nu: float = None
    xreg: tuple = ()
    vreg: tuple = ()
    dummies: tuple = ()
    dummy_in_variance: bool = False
    specs: tuple = ()
    # estimators and tests
    window: int = 30
    lam: float = 0.94
    max_lag: int = 7
    lags: int = 7
    ljung_box_lags: int = 7
    trend: str = "constant_trend"
    max_iterations: int = 500
    backend: str = "local"
    # forecast and simulation
    horizon: int = 10
    origin: str = None
    paths: int = 10000
    seed: int = 0
    n: int = None
    start: str = "2004-01-01"
    burn: int = 500
    params: dict = field(default_factory=dict)

    @property
    def referenced_series(self) -> list:
        names = [self.target] if self.target else []
        names += [name for name in self.xreg + self.vreg if name not in names]
        for spec in self.specs:
            names += [name for name in spec.get('xreg', ()) + spec.get('vreg', ()) if name not in names]
        return names
