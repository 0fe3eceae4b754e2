import dataclasses
import logging
import pandas as pd
import numpy as np

from gridvol.exceptions import AlignmentError, NonFinite, SpecMismatch, VarianceNonPositive
from garch.utilities.recursions import expected_abs_z, regressor_matrix, persistence
from garch.models import ModelSpec, ParamVector, SimulatedPaths
from timeseries.models import TimeSeries


logger = logging.getLogger(__name__)


def draw_innovations(rng: np.random.Generator, kind: str, size, nu: float = None) -> np.ndarray:
    """iid unit-variance innovations."""
    if kind == "normal":
        return rng.standard_normal(size)
    return rng.standard_t(nu, size=size) * np.sqrt((nu - 2.0) / nu)


def rebind_regressors(spec: ModelSpec, regressors: dict) -> ModelSpec:
    """Swap bound regressors for same-named series from `regressors`."""
    if not regressors:
        return spec

    def swap(bound):
        return tuple(regressors.get(reg.name, reg) for reg in bound)

    return ModelSpec(
        mean=dataclasses.replace(spec.mean, regressors=swap(spec.mean.regressors)),
        variance=dataclasses.replace(spec.variance, regressors=swap(spec.variance.regressors)),
        dist=spec.dist,
    )


def _simulation_dates(spec: ModelSpec, n: int, start) -> pd.DatetimeIndex:
    bound = spec.mean.regressors + spec.variance.regressors
    if not bound:
        return pd.date_range(start, periods=n, freq="D")
    if len(bound[0]) < n:
        raise AlignmentError(f"Regressor '{bound[0].name}' has {len(bound[0])} dates, simulation needs {n}.")
    return bound[0].dates[:n]


def _starting_variance(params: ParamVector, spec: ModelSpec) -> float:
    level = persistence(params, spec.variance)
    if spec.variance.family == "egarch":
        return float(np.exp(params.k / (1.0 - level))) if abs(level) < 1 else float(np.exp(params.k))
    return params.k / (1.0 - level) if level < 1 else max(params.k, 1e-8) * 100.0


def _simulate_variance(params: ParamVector, spec: ModelSpec, z: np.ndarray, v: np.ndarray):
    var = spec.variance
    total = len(z)
    h0 = _starting_variance(params, spec)
    h = np.empty(total)
    e = np.empty(total)
    gamma_term = v @ np.array(params.gamma) if v.shape[1] else np.zeros(total)

    if var.family == "egarch":
        e_abs = expected_abs_z(spec.dist, params.nu)
        log_h = np.empty(total)
        for t in range(total):
            value = params.k + gamma_term[t]
            for i, g in enumerate(params.g, start=1):
                value += g * (log_h[t - i] if t >= i else np.log(h0))
            for j in range(1, min(var.q, t) + 1):
                value += params.a[j - 1] * (abs(z[t - j]) - e_abs) + params.l[j - 1] * z[t - j]
            log_h[t] = value
        # z does not depend on the variance in the log form
        h = np.exp(log_h)
        e = np.sqrt(h) * z
    else:
        for t in range(total):
            value = params.k + gamma_term[t]
            for i, g in enumerate(params.g, start=1):
                value += g * (h[t - i] if t >= i else h0)
            for j, a in enumerate(params.a, start=1):
                e2 = e[t - j] ** 2 if t >= j else h0
                value += a * e2
                if var.family == "gjr":
                    s = float(e[t - j] < 0) if t >= j else 0.5
                    value += params.l[j - 1] * s * e2
            if value <= 0:
                raise VarianceNonPositive(f"Simulated {var.label} variance is not positive at step {t}.")
            h[t] = value
            e[t] = np.sqrt(value) * z[t]
    if not np.all(np.isfinite(h)):
        raise NonFinite(f"Simulated {var.label} variance is not finite.")
    return h, e


def simulate_paths(params: ParamVector, spec: ModelSpec, n: int, seed: int, burn: int = 500,
                   start="2004-01-01", regressors: dict = None) -> SimulatedPaths:
    """
    Simulate an ARMAX/GARCH-family process.

    Parameters
    ----------
    params : ParamVector
        Generating coefficients, checked against `spec`.
    spec : ModelSpec
        Mean, variance and innovation specification.
    n : int
        Length of the returned series, at least max(R, M, P, Q) + 1.
    seed : int
        Seed of the numpy Generator; identical seeds give identical paths.
    burn : int
        Variance steps discarded before the first returned date; regressors are held at their
        first-date values during the burn-in.
    start : date-like
        First date when the spec binds no regressors (otherwise the regressor dates are used).
    regressors : dict, optional
        Same-named series replacing the regressors bound in `spec`.

    Returns
    -------
    SimulatedPaths
        y, the innovations e_t (zero on the conditioning sample, as mean_residuals reports them),
        the conditional variances and the standardized draws z_t.
    """
    spec = rebind_regressors(spec, regressors)
    params.check(spec)
    mean = spec.mean
    minimum = max(mean.ar, mean.ma, spec.variance.p, spec.variance.q) + 1
    if n < minimum:
        raise SpecMismatch(f"Simulating {spec.label} needs n >= {minimum}, got {n}.")

    # dates and regressor matrices, variance regressors padded over the burn-in
    dates = _simulation_dates(spec, n, start)
    x = regressor_matrix(mean.regressors, dates)
    v = regressor_matrix(spec.variance.regressors, dates)
    if burn and v.shape[1]:
        v = np.vstack([np.repeat(v[:1], burn, axis=0), v])
    elif burn:
        v = np.zeros((burn + n, 0))

    # variance path with burn-in, then drop the burn-in
    rng = np.random.default_rng(seed)
    z = draw_innovations(rng, spec.dist.kind, burn + n, params.nu)
    h, e = _simulate_variance(params, spec, z, v)
    h, e, z = h[burn:], e[burn:], z[burn:]

    # ARMAX mean on top of the simulated innovations
    p0 = mean.conditioning
    drift = params.c + (x @ np.array(params.beta) if x.shape[1] else np.zeros(n))
    ar_sum = sum(params.phi)
    y = np.empty(n)
    eps = np.zeros(n)
    # conditioning observations sit at the unconditional mean
    y[:p0] = drift[:p0] / (1.0 - ar_sum) if abs(1.0 - ar_sum) > 1e-8 else drift[:p0]
    for t in range(p0, n):
        value = drift[t] + e[t]
        for i, phi in enumerate(params.phi, start=1):
            value += phi * y[t - i]
        for j, theta in enumerate(params.theta, start=1):
            value += theta * eps[t - j]
        eps[t] = e[t]
        y[t] = value

    logger.debug(f"Simulated {n} observations of {spec.label} (seed {seed}, burn {burn})")
    return SimulatedPaths(
        y=TimeSeries(dates, y, "y"),
        eps=TimeSeries(dates, eps, "eps"),
        sigma2=TimeSeries(dates, h, "sigma2"),
        z=TimeSeries(dates, z, "z"),
        params=params,
    )


def simulate(params: ParamVector, spec: ModelSpec, n: int, seed: int, burn: int = 500,
             start="2004-01-01", regressors: dict = None) -> TimeSeries:
    return simulate_paths(params, spec, n, seed, burn=burn, start=start, regressors=regressors).y
