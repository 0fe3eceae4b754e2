from dataclasses import replace
from celery import group
import logging

from estimation.utilities.criteria import standardized_residuals
from diagnostics.utilities.residuals import arch_lm
from gridvol.exceptions import DomainError, GridvolError
from estimation.models import ComparisonRow, FitOptions
from estimation.utilities.fitting import fit
from timeseries.models import TimeSeries
from garch.models import ModelSpec

logger = logging.getLogger(__name__)

BACKENDS = ("local", "celery")


def fit_candidate(y: TimeSeries, spec: ModelSpec, options: FitOptions = None, index: int = 0,
                  arch_lags: int = 7) -> ComparisonRow:
    """
    Fit one candidate and summarise it as a comparison row. A candidate that fails to fit
    is kept in the table with its error message instead of aborting the comparison.
    """
    try:
        result = fit(y, spec, options)
        arch = arch_lm(standardized_residuals(result), arch_lags)
    except GridvolError as e:
        logger.exception(f"Error fitting candidate {index} ({spec.label}): {str(e)}")
        return ComparisonRow(index=index, label=spec.label, n_params=spec.n_params, error=str(e))
    return ComparisonRow(
        index=index,
        label=spec.label,
        n_params=spec.n_params,
        converged=result.converged,
        loglik=result.loglik,
        r_squared=result.r_squared,
        dw=result.dw,
        aic=result.aic,
        bic=result.bic,
        hq=result.hq,
        arch_statistic=arch.statistic,
        arch_p_value=arch.p_value,
        serial_correlation="yes" if arch.reject_at_5pct else "no",
    )


def rank_rows(rows) -> list:
    """
    Rank converged candidates by AIC, then BIC, then fewer parameters, then input order.
    Failed or non-converged candidates keep rank None and follow the ranked ones.
    """
    rankable = sorted((row for row in rows if row.rankable),
                      key=lambda row: (row.aic, row.bic, row.n_params, row.index))
    ranked = [
        replace(row, rank=position)
        for position, row in enumerate(rankable, start=1)
    ]
    rest = sorted((row for row in rows if not row.rankable), key=lambda row: row.index)
    return ranked + rest


def _fit_with_celery(y, specs, options, arch_lags) -> list:
    # Import here to avoid circular imports
    from estimation.serializers import CandidateSerializer, ComparisonRowSerializer
    from estimation.tasks import fit_candidate_task

    payloads = [
        CandidateSerializer({'index': index, 'y': y, 'spec': spec, 'options': options,
                             'arch_lags': arch_lags}).data
        for index, spec in enumerate(specs)
    ]
    results = group(fit_candidate_task.s(payload) for payload in payloads).apply_async().get()
    rows = []
    for data in results:
        serializer = ComparisonRowSerializer(data=data)
        serializer.is_valid(raise_exception=True)
        rows.append(serializer.save())
    return rows


def compare(y: TimeSeries, specs, options: FitOptions = None, arch_lags: int = 7,
            backend: str = "local") -> list:
    """
    Fit every candidate specification on `y` and return the ranked comparison table.

    Parameters
    ----------
    y : TimeSeries
        Complete target series shared by all candidates.
    specs : sequence of ModelSpec
        At least two candidates.
    options : FitOptions, optional
        Optimizer controls applied to every candidate.
    arch_lags : int
        Lags of the ARCH-LM test on the standardized residuals.
    backend : {"local", "celery"}
        "celery" fans the candidates out as a task group; the rows are identical either way.
    """
    specs = list(specs)
    if len(specs) < 2:
        raise DomainError(f"compare needs at least two candidate specifications, got {len(specs)}.")
    if backend not in BACKENDS:
        raise DomainError(f"Unknown compare backend '{backend}', expected one of {BACKENDS}.")
    options = options or FitOptions()

    logger.info(f"Comparing {len(specs)} candidates on '{y.name}' ({backend} backend)")
    if backend == "celery":
        rows = _fit_with_celery(y, specs, options, arch_lags)
    else:
        rows = [fit_candidate(y, spec, options, index, arch_lags) for index, spec in enumerate(specs)]
    table = rank_rows(rows)
    if table and table[0].rank is not None:
        logger.info(f"Best candidate by AIC: {table[0].label}")
    else:
        logger.warning("No candidate converged; comparison table is unranked")
    return table
