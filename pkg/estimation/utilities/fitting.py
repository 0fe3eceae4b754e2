from statsmodels.tools.numdiff import approx_fprime, approx_hess3
from statsmodels.tsa.tsatools import lagmat
from scipy.optimize import minimize
from scipy import stats
import statsmodels.api as sm
import warnings
import logging
import numpy as np

from estimation.utilities.reparameterization import positive_mask, to_natural, to_unconstrained
from estimation.utilities.criteria import goodness_of_fit_values, information_criteria
from gridvol.exceptions import ConvergenceWarning, GridvolError, InsufficientData
from garch.utilities.recursions import regressor_matrix, persistence
from garch.utilities.likelihood import likelihood_terms
from estimation.models import FitOptions, FitResult
from garch.models import ModelSpec, ParamVector
from timeseries.models import TimeSeries


logger = logging.getLogger(__name__)

# objective value returned where the recursion breaks down
PENALTY = 1e6
# scale floor of the Hessian step for parameters near zero
HESSIAN_STEP_FLOOR = 1e-2
# abnormal line-search exits count as converged below this gradient
ABNORMAL_GRADIENT_TOLERANCE = 1e-3


def starting_values(y: TimeSeries, spec: ModelSpec) -> ParamVector:
    """
    Two-step warm start: mean coefficients from OLS of y on a constant, its lags and the mean
    regressors (MA terms at zero); variance terms scaled to the OLS residual variance.
    """
    mean, var = spec.mean, spec.variance
    p0 = mean.conditioning
    target = y.values[p0:]

    columns = []
    if mean.include_constant:
        columns.append(np.ones(len(target)))
    if mean.ar:
        lags = lagmat(y.values, maxlag=mean.ar, trim="forward")[p0:]
        columns.extend(lags.T)
    if mean.regressors:
        columns.extend(regressor_matrix(mean.regressors, y.dates[p0:]).T)

    if columns:
        design = np.column_stack(columns)
        ols = sm.OLS(target, design).fit()
        coef, resid = np.asarray(ols.params), np.asarray(ols.resid)
    else:
        coef, resid = np.zeros(0), target

    pos = 0
    c = 0.0
    if mean.include_constant:
        c, pos = coef[0], 1
    phi = coef[pos:pos + mean.ar]
    beta = coef[pos + mean.ar:]

    variance = float(np.var(resid))
    if not variance > 0:
        variance = 1.0
    if var.family == "egarch":
        k = 0.2 * np.log(variance)
    else:
        k = 0.1 * variance

    return ParamVector(
        c=c,
        phi=phi,
        theta=np.zeros(mean.ma),
        beta=beta,
        k=k,
        g=np.full(var.p, 0.8 / var.p),
        a=np.full(var.q, 0.1 / var.q),
        l=np.zeros(var.q) if var.has_leverage else (),
        gamma=np.zeros(len(var.regressors)),
        nu=spec.dist.nu if spec.dist.kind == "student_t" else None,
    )


def _loglik_natural(theta: np.ndarray, y: TimeSeries, spec: ModelSpec) -> float:
    try:
        params = ParamVector.from_array(theta, spec)
        *_, terms = likelihood_terms(params, y, spec)
        value = float(np.sum(terms))
    except GridvolError:
        return np.nan
    return value if np.isfinite(value) else np.nan


def _objective(u: np.ndarray, y: TimeSeries, spec: ModelSpec, n_obs: int) -> float:
    value = _loglik_natural(to_natural(u, spec), y, spec)
    if np.isnan(value):
        return PENALTY
    return -value / n_obs


def _gradient(u: np.ndarray, y: TimeSeries, spec: ModelSpec, n_obs: int) -> np.ndarray:
    return np.ravel(approx_fprime(u, _objective, args=(y, spec, n_obs), centered=True))


def hessian_steps(theta: np.ndarray, spec: ModelSpec, step: float) -> np.ndarray:
    """
    Relative central-difference steps, capped for positive parameters so that every
    evaluation stays inside the feasible region.
    """
    h = step * np.maximum(np.abs(theta), HESSIAN_STEP_FLOOR)
    mask = positive_mask(spec)
    names = np.array(spec.param_names())
    distance = np.where(names == "nu", theta - 2.0, theta)
    h[mask] = np.minimum(h[mask], np.abs(distance[mask]) / 4.0)
    return h


def standard_errors(theta: np.ndarray, y: TimeSeries, spec: ModelSpec, step: float) -> np.ndarray:
    """
    Square roots of the diagonal of the inverse negative Hessian of the log-likelihood.
    Entries that cannot be computed are NaN.
    """
    n = len(theta)
    try:
        hess = approx_hess3(theta, _loglik_natural, epsilon=hessian_steps(theta, spec, step), args=(y, spec))
        if not np.all(np.isfinite(hess)):
            raise np.linalg.LinAlgError("Hessian has non-finite entries")
        cov = np.linalg.inv(-hess)
    except np.linalg.LinAlgError as e:
        logger.warning(f"Hessian of {spec.label} is not invertible ({e}); standard errors unavailable")
        return np.full(n, np.nan)

    diag = np.diag(cov)
    se = np.full(n, np.nan)
    ok = np.isfinite(diag) & (diag > 0)
    se[ok] = np.sqrt(diag[ok])
    if not ok.all():
        names = [name for name, flag in zip(spec.param_names(), ok) if not flag]
        logger.warning(f"Standard errors unavailable for {names} in {spec.label}")
    return se


def _minimize(u0: np.ndarray, y: TimeSeries, spec: ModelSpec, n_obs: int, options: FitOptions):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return minimize(
            _objective,
            x0=u0,
            args=(y, spec, n_obs),
            jac=_gradient,
            method="L-BFGS-B",
            options={
                'maxiter': options.max_iterations,
                'ftol': options.loglik_tolerance,
                'gtol': options.gradient_tolerance,
            },
        )


def fit(y: TimeSeries, spec: ModelSpec, options: FitOptions = None, start: ParamVector = None) -> FitResult:
    """
    Maximum-likelihood fit of an ARMAX/GARCH-family model.

    Parameters
    ----------
    y : TimeSeries
        Complete target series.
    spec : ModelSpec
        Mean, variance and innovation specification.
    options : FitOptions, optional
        Iteration budget, tolerances, Hessian step and optional seeded restarts.
    start : ParamVector, optional
        Starting point; defaults to the OLS warm start.

    Returns
    -------
    FitResult
        Non-convergence is reported through `converged` (with a ConvergenceWarning), never
        raised.
    """
    options = options or FitOptions()
    n_obs = len(y) - spec.mean.conditioning
    if n_obs < 10 * spec.n_params:
        raise InsufficientData(
            f"{spec.label} has {spec.n_params} parameters and needs at least "
            f"{10 * spec.n_params} effective observations, got {n_obs}."
        )

    logger.info(f"Fitting {spec.label} on '{y.name}' ({n_obs} effective observations)")
    # warm start in the unconstrained space
    start = (start or starting_values(y, spec)).check(spec)
    u0 = to_unconstrained(start.to_array(spec), spec)
    start_objective = _objective(u0, y, spec, n_obs)

    # optimize from the warm start
    best = _minimize(u0, y, spec, n_obs, options)
    # seeded restarts around the warm start, keep the lowest objective
    if options.restarts:
        rng = np.random.default_rng(options.seed)
        for _ in range(options.restarts):
            candidate = _minimize(u0 + rng.normal(0.0, 0.5, len(u0)), y, spec, n_obs, options)
            if candidate.fun < best.fun:
                best = candidate

    # never accept a point worse than the start
    u_hat = best.x if best.fun <= start_objective else u0
    grad_norm = float(np.max(np.abs(best.jac))) if best.jac is not None else np.inf
    converged = bool(
        best.status == 0 or (best.status == 2 and grad_norm < ABNORMAL_GRADIENT_TOLERANCE)
    ) and best.fun < PENALTY
    message = str(best.message)

    # back to natural parameters and the likelihood at the optimum
    theta = to_natural(u_hat, spec)
    params = ParamVector.from_array(theta, spec)
    eps, effective, path, terms = likelihood_terms(params, y, spec)
    loglik = float(np.sum(terms))

    # inference from the numerical Hessian
    se = standard_errors(theta, y, spec, options.hessian_step)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = theta / se
    p = 2.0 * stats.norm.sf(np.abs(z))

    # criteria and goodness of fit
    aic, bic, hq = information_criteria(loglik, spec.n_params, n_obs)
    r2, adj_r2, dw = goodness_of_fit_values(y[spec.mean.conditioning:], effective, spec.mean.n_params)

    if not converged:
        warnings.warn(f"{spec.label} did not converge: {message}", ConvergenceWarning)
    logger.info(
        f"Finished {spec.label}: converged={converged}, iterations={best.nit}, "
        f"loglik={loglik:.4f}, persistence={persistence(params, spec.variance):.4f}"
    )

    return FitResult(
        spec=spec,
        params=params,
        std_errors=tuple(se.tolist()),
        z_stats=tuple(z.tolist()),
        p_values=tuple(p.tolist()),
        loglik=loglik,
        aic=aic,
        bic=bic,
        hq=hq,
        r_squared=r2,
        adj_r_squared=adj_r2,
        dw=dw,
        residuals=eps,
        variance=path,
        converged=converged,
        iterations=int(best.nit),
        n_obs=n_obs,
        start_loglik=-start_objective * n_obs if start_objective < PENALTY else float('-inf'),
        message=message,
    )
