import numpy as np

from volatility.utilities.persistence import egarch_persistence_summary, persistence_summary
from forecasting.utilities.interventions import intervention_impact, is_step_dummy
from estimation.models import CoefficientRow, FitResult, InterventionRow
from volatility.models import PersistenceSummary


def coefficient_table(fit: FitResult) -> list:
    """Coefficient / Std. Error / z-Statistic / Prob. rows in parameter order."""
    return [
        CoefficientRow(name=name, coefficient=float(coef), std_error=se, z_stat=z, p_value=p)
        for name, coef, se, z, p in zip(fit.param_names, fit.coefficients, fit.std_errors,
                                         fit.z_stats, fit.p_values)
    ]


def _rows_by_name(fit: FitResult) -> dict:
    return {row.name: row for row in coefficient_table(fit)}


def intervention_table(fit: FitResult, labels=None) -> list:
    """
    Percentage impact of each mean-equation step dummy. Without `labels`, every mean regressor
    that is a 0/1 step is treated as an intervention.
    """
    if labels is None:
        labels = [reg.name for reg in fit.spec.mean.regressors if is_step_dummy(reg)]
    rows = _rows_by_name(fit)
    table = []
    for label in labels:
        row = rows[f"beta_{label}"]
        table.append(InterventionRow(
            label=label,
            beta=row.coefficient,
            impact_pct=intervention_impact(row.coefficient),
            z_stat=row.z_stat,
            p_value=row.p_value,
            significant=bool(np.isfinite(row.p_value) and row.p_value < 0.05),
        ))
    return table


def leverage_table(fit: FitResult) -> list:
    if not fit.spec.variance.has_leverage:
        return []
    return [row for row in coefficient_table(fit) if row.name[0] == "l" and row.name[1:].isdigit()]


def fit_persistence(fit: FitResult) -> PersistenceSummary:
    """
    Persistence summary of the fitted variance equation. GJR counts half of the leverage
    coefficients (shocks are negative half of the time).
    """
    params, family = fit.params, fit.spec.variance.family
    if family == "egarch":
        return egarch_persistence_summary(params.k, sum(params.g))
    a = sum(params.a) + (0.5 * sum(params.l) if family == "gjr" else 0.0)
    return persistence_summary(params.k, max(a, 0.0), sum(params.g))
