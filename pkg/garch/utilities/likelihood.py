from scipy.special import gammaln
import numpy as np

from garch.utilities.recursions import mean_residuals, variance_path
from garch.models import ModelSpec, ParamVector
from gridvol.exceptions import NonFinite
from timeseries.models import TimeSeries


def log_density(e: np.ndarray, h: np.ndarray, kind: str, nu: float = None) -> np.ndarray:
    """
    Pointwise log density of e_t given conditional variance h_t: normal, or Student's t
    rescaled so that h_t is the variance.
    """
    if kind == "normal":
        return -0.5 * (np.log(2.0 * np.pi) + np.log(h) + e ** 2 / h)
    const = gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0) - 0.5 * np.log(np.pi * (nu - 2.0))
    return const - 0.5 * np.log(h) - (nu + 1.0) / 2.0 * np.log1p(e ** 2 / (h * (nu - 2.0)))


def likelihood_terms(params: ParamVector, y: TimeSeries, spec: ModelSpec, init: float = None):
    """
    Residuals, post-conditioning residuals, their variance path and per-observation
    log-likelihood contributions.
    """
    params.check(spec)
    eps = mean_residuals(params, y, spec.mean)
    effective = eps[spec.mean.conditioning:]
    path = variance_path(params, effective, spec.variance, spec.dist, init=init)
    nu = params.nu if spec.dist.kind == "student_t" else None
    terms = log_density(effective.values, path.variance, spec.dist.kind, nu)
    return eps, effective, path, terms


def log_likelihood(params: ParamVector, y: TimeSeries, spec: ModelSpec, init: float = None) -> float:
    """
    Conditional Gaussian or Student's t log-likelihood summed over the post-conditioning sample.
    """
    *_, terms = likelihood_terms(params, y, spec, init=init)
    value = float(np.sum(terms))
    if not np.isfinite(value):
        raise NonFinite(f"Log-likelihood of {spec.label} is not finite.")
    return value
