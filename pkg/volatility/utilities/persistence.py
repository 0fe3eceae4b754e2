import numpy as np

from volatility.models import PersistenceSummary, PersistenceRow
from gridvol.exceptions import DomainError


# persistence at or above this level counts as integrated
INTEGRATED_THRESHOLD = 1.0 - 1e-12


def half_life(persistence: float):
    """Days for a volatility shock to decay halfway: ln(0.5)/ln(persistence)."""
    if persistence >= INTEGRATED_THRESHOLD:
        return None
    if persistence <= 0:
        return 0.0
    return float(np.log(0.5) / np.log(persistence))


def persistence_summary(k: float, a: float, g: float) -> PersistenceSummary:
    """
    Persistence A+G of a GARCH(1,1) variance equation with its half-life and unconditional
    volatility sqrt(k/(1-A-G)). Both are Undefined (None) once persistence reaches one.
    """
    if k < 0 or a < 0 or g < 0:
        raise DomainError(f"GARCH coefficients must be nonnegative, got k={k}, A={a}, G={g}.")
    persistence = a + g
    if persistence >= INTEGRATED_THRESHOLD:
        return PersistenceSummary(persistence=float(persistence))
    return PersistenceSummary(
        persistence=float(persistence),
        half_life_days=half_life(persistence),
        unconditional_sigma=float(np.sqrt(k / (1.0 - persistence))),
    )


def egarch_persistence_summary(k: float, g: float) -> PersistenceSummary:
    """
    Log-variance persistence G of an EGARCH(1,1). The unconditional volatility is the
    approximation sqrt(exp(k/(1-G))), valid for |G| < 1.
    """
    if abs(g) >= INTEGRATED_THRESHOLD:
        return PersistenceSummary(persistence=float(g))
    return PersistenceSummary(
        persistence=float(g),
        half_life_days=half_life(abs(g)),
        unconditional_sigma=float(np.sqrt(np.exp(k / (1.0 - g)))),
    )


def half_life_whole_days(summary: PersistenceSummary):
    if summary.half_life_days is None:
        return None
    return int(np.ceil(summary.half_life_days))


def persistence_table(rows) -> list:
    """Persistence and half-life for each (label, A, G) row."""
    table = []
    for label, a, g in rows:
        summary = persistence_summary(0.0, a, g)
        table.append(PersistenceRow(
            label=label,
            a=float(a),
            g=float(g),
            summary=summary,
            half_life_whole_days=half_life_whole_days(summary),
        ))
    return table
