from scipy.signal import lfilter, lfiltic
from scipy.special import gammaln
import numpy as np

from gridvol.exceptions import AlignmentError, DomainError, NonFinite, SpecMismatch, VarianceNonPositive
from garch.models import MeanSpec, VarianceSpec, InnovationDist, ParamVector
from timeseries.models import TimeSeries
from volatility.models import VolPath


# bounds on log variance in the EGARCH recursion
LOG_VARIANCE_BOUNDS = (-60.0, 60.0)


def regressor_matrix(regressors, dates) -> np.ndarray:
    """
    Values of each bound regressor on `dates`, one column per regressor.
    """
    if not regressors:
        return np.zeros((len(dates), 0))
    columns = []
    for reg in regressors:
        values = reg.to_series().reindex(dates)
        if values.isna().any():
            raise AlignmentError(f"Regressor '{reg.name}' does not cover the dates of the modeled series.")
        columns.append(values.to_numpy())
    return np.column_stack(columns)


def mean_residuals(params: ParamVector, y: TimeSeries, spec: MeanSpec) -> TimeSeries:
    """
    ARMAX residuals e_t = y_t - c - sum phi_i y_{t-i} - sum theta_j e_{t-j} - sum beta_k X(t,k).

    The first max(R, M) observations form the conditioning sample; their residuals are set to
    zero and they enter later steps only through the lagged terms.
    """
    if len(params.phi) != spec.ar or len(params.theta) != spec.ma or len(params.beta) != len(spec.regressors):
        raise SpecMismatch(
            f"Mean parameters (phi={len(params.phi)}, theta={len(params.theta)}, beta={len(params.beta)}) "
            f"do not match ARMAX({spec.ar},{spec.ma}) with {len(spec.regressors)} regressors."
        )
    values = y.values
    if np.isnan(values).any():
        raise DomainError(f"Series '{y.name}' has missing values; impute before fitting.")

    p0 = spec.conditioning
    n = len(values)
    eps = np.zeros(n)
    if n <= p0:
        return y.with_values(eps, f"resid_{y.name}")

    w = values[p0:] - params.c
    for i, phi in enumerate(params.phi, start=1):
        w = w - phi * values[p0 - i:n - i]
    if spec.regressors:
        w = w - regressor_matrix(spec.regressors, y.dates[p0:]) @ np.array(params.beta)

    # e_t + sum theta_j e_{t-j} = w_t, zero residuals before the conditioning point
    eps[p0:] = lfilter([1.0], np.r_[1.0, params.theta], w) if spec.ma else w
    return y.with_values(eps, f"resid_{y.name}")


def expected_abs_z(dist: InnovationDist, nu: float = None) -> float:
    """E|z| for a unit-variance normal or standardized Student's t innovation."""
    if dist.kind == "normal":
        return float(np.sqrt(2.0 / np.pi))
    nu = dist.nu if nu is None else nu
    if nu <= 2:
        raise DomainError(f"Student's t degrees of freedom must exceed 2, got {nu}.")
    return float(np.sqrt((nu - 2.0) / np.pi) * np.exp(gammaln((nu - 1.0) / 2.0) - gammaln(nu / 2.0)))


def check_family_constraints(params: ParamVector, spec: VarianceSpec):
    if spec.family == "egarch":
        return
    if params.k < 0:
        raise DomainError(f"Variance intercept k must be nonnegative, got {params.k}.")
    if min(params.a) < 0 or min(params.g) < 0:
        raise DomainError(f"ARCH and GARCH coefficients must be nonnegative, got A={params.a}, G={params.g}.")
    if spec.family == "gjr" and min(a + l for a, l in zip(params.a, params.l)) < 0:
        raise DomainError(f"GJR needs A_j + L_j >= 0, got A={params.a}, L={params.l}.")


def _lagged(ext: np.ndarray, offset: int, lag: int, n: int) -> np.ndarray:
    # ext holds `offset` pre-sample entries; returns ext values at t - lag for t = 1..n-1
    return ext[offset + 1 - lag:offset + n - lag]


def _garch_variance(params: ParamVector, e: np.ndarray, spec: VarianceSpec, init: float,
                    v: np.ndarray) -> np.ndarray:
    n, q = len(e), spec.q
    e2_ext = np.r_[np.full(q, init), e ** 2]
    drive = np.full(n - 1, params.k)
    for j, a in enumerate(params.a, start=1):
        drive += a * _lagged(e2_ext, q, j, n)
    if spec.family == "gjr":
        # pre-sample shocks are negative half of the time
        s_ext = np.r_[np.full(q, 0.5), (e < 0).astype(float)]
        for j, l in enumerate(params.l, start=1):
            drive += l * _lagged(s_ext, q, j, n) * _lagged(e2_ext, q, j, n)
    if v.shape[1]:
        drive += v[1:] @ np.array(params.gamma)

    denominator = np.r_[1.0, -np.array(params.g)]
    zi = lfiltic([1.0], denominator, y=np.full(spec.p, init))
    h = np.empty(n)
    h[0] = init
    h[1:], _ = lfilter([1.0], denominator, drive, zi=zi)
    return h


def _egarch_variance(params: ParamVector, e: np.ndarray, spec: VarianceSpec, dist: InnovationDist,
                     init: float, v: np.ndarray) -> np.ndarray:
    n, p, q = len(e), spec.p, spec.q
    e_abs = expected_abs_z(dist, params.nu)
    gamma_term = v @ np.array(params.gamma) if v.shape[1] else np.zeros(n)
    lo, hi = LOG_VARIANCE_BOUNDS

    log_h = np.empty(n)
    z = np.zeros(n)
    log_h[0] = np.log(init)
    z[0] = e[0] / np.sqrt(init)
    for t in range(1, n):
        value = params.k + gamma_term[t]
        for i in range(1, p + 1):
            value += params.g[i - 1] * (log_h[t - i] if t >= i else log_h[0])
        for j in range(1, min(q, t) + 1):
            value += params.a[j - 1] * (abs(z[t - j]) - e_abs) + params.l[j - 1] * z[t - j]
        log_h[t] = min(max(value, lo), hi)
        z[t] = e[t] * np.exp(-0.5 * log_h[t])
    return np.exp(log_h)


def variance_path(params: ParamVector, eps: TimeSeries, spec: VarianceSpec, dist: InnovationDist,
                  init: float = None) -> VolPath:
    """
    Conditional variance recursion of the chosen family.

    Parameters
    ----------
    params : ParamVector
        Coefficients satisfying the family constraints.
    eps : TimeSeries
        Mean-equation residuals, conditioning sample already removed.
    spec : VarianceSpec
        Family, orders and variance regressors (entering contemporaneously).
    dist : InnovationDist
        Needed for E|z| in the EGARCH news term.
    init : float, optional
        First variance; defaults to the sample variance of `eps`. Pre-sample variances and
        squared shocks take the same value.

    Returns
    -------
    VolPath
        sigma_t for every date of `eps`.
    """
    e = eps.values
    if len(params.a) != spec.q or len(params.g) != spec.p or len(params.gamma) != len(spec.regressors):
        raise SpecMismatch(f"Variance parameters do not match {spec.label}.")
    if spec.has_leverage and len(params.l) != spec.q:
        raise SpecMismatch(f"{spec.label} needs {spec.q} leverage coefficients, got {len(params.l)}.")
    check_family_constraints(params, spec)

    init = float(np.var(e)) if init is None else float(init)
    if not init > 0:
        raise VarianceNonPositive(f"Initial variance must be positive, got {init}.")

    v = regressor_matrix(spec.regressors, eps.dates)
    if spec.family == "egarch":
        h = _egarch_variance(params, e, spec, dist, init, v)
    else:
        h = _garch_variance(params, e, spec, init, v)

    if not np.all(np.isfinite(h)):
        raise NonFinite(f"{spec.label} variance recursion produced non-finite values.")
    if np.any(h <= 0):
        t = int(np.argmax(h <= 0))
        raise VarianceNonPositive(f"{spec.label} variance is not positive at {eps.dates[t].date()}.")

    return VolPath(eps.dates, np.sqrt(h), {'family': spec.family, 'p': spec.p, 'q': spec.q, 'init': init})


def persistence(params: ParamVector, spec: VarianceSpec) -> float:
    """Sum of variance-recursion coefficients that carry a shock forward one step."""
    if spec.family == "egarch":
        return float(sum(params.g))
    value = sum(params.a) + sum(params.g)
    if spec.family == "gjr":
        value += 0.5 * sum(params.l)
    return float(value)
