from dataclasses import dataclass
from django.conf import settings
import numpy as np

from garch.models import ModelSpec, ParamVector
from timeseries.models import TimeSeries
from volatility.models import VolPath


# Optimizer and standard-error controls for a single fit
@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 500
    loglik_tolerance: float = 1e-8
    gradient_tolerance: float = 1e-5
    hessian_step: float = 1e-4
    seed: int = None
    restarts: int = 0

    @classmethod
    def from_settings(cls, **overrides):
        config = settings.GRIDVOL
        values = {
            'max_iterations': config['FIT_MAX_ITERATIONS'],
            'loglik_tolerance': config['FIT_LOGLIK_TOLERANCE'],
            'gradient_tolerance': config['FIT_GRADIENT_TOLERANCE'],
            'hessian_step': config['FIT_HESSIAN_STEP'],
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True, eq=False)
class FitResult:
    """
    Maximum-likelihood fit of a composite mean/variance model.

    `residuals` covers the whole sample (zero on the conditioning observations); `variance`
    and the criteria cover the n_obs post-conditioning observations only. Standard errors
    that could not be computed are NaN, as are their z and p values.
    """
    spec: ModelSpec
    params: ParamVector
    std_errors: tuple
    z_stats: tuple
    p_values: tuple
    loglik: float
    aic: float
    bic: float
    hq: float
    r_squared: float
    adj_r_squared: float
    dw: float
    residuals: TimeSeries
    variance: VolPath
    converged: bool
    iterations: int
    n_obs: int
    start_loglik: float = float('nan')
    message: str = ""

    @property
    def param_names(self) -> list:
        return self.spec.param_names()

    @property
    def n_params(self) -> int:
        return self.spec.n_params

    @property
    def coefficients(self) -> np.ndarray:
        return self.params.to_array(self.spec)

    @property
    def se_available(self) -> tuple:
        return tuple(bool(np.isfinite(se)) for se in self.std_errors)

    @property
    def effective_residuals(self) -> TimeSeries:
        return self.residuals[self.spec.mean.conditioning:]


@dataclass(frozen=True)
class CoefficientRow:
    name: str
    coefficient: float
    std_error: float
    z_stat: float
    p_value: float


@dataclass(frozen=True)
class InterventionRow:
    label: str
    beta: float
    impact_pct: float
    z_stat: float
    p_value: float
    significant: bool


@dataclass(frozen=True)
class ComparisonRow:
    """One candidate of the model-comparison matrix; failed candidates carry `error`."""
    index: int
    label: str
    n_params: int
    converged: bool = False
    loglik: float = None
    r_squared: float = None
    dw: float = None
    aic: float = None
    bic: float = None
    hq: float = None
    arch_statistic: float = None
    arch_p_value: float = None
    serial_correlation: str = None
    error: str = None
    rank: int = None

    @property
    def rankable(self) -> bool:
        return self.error is None and self.converged
