import warnings
import logging
import pandas as pd
import numpy as np

from gridvol.exceptions import InterventionOutOfRangeWarning
from timeseries.models import TimeSeries


logger = logging.getLogger(__name__)


def intervention_impact(beta: float) -> float:
    """Percentage effect 100(e^beta - 1) of a step dummy in a log-price mean equation."""
    return float(100.0 * np.expm1(beta))


def make_step_dummy(dates, intervention, label: str = "dummy") -> TimeSeries:
    """
    Step regressor: 0 strictly before `intervention`, 1 on and after it. An intervention
    between two sample dates switches on at the first later date; one after the last date
    gives an all-zero series and an InterventionOutOfRangeWarning.
    """
    dates = pd.DatetimeIndex(dates).normalize()
    when = pd.Timestamp(intervention).normalize()
    values = (dates >= when).astype(float)
    if when > dates[-1]:
        message = f"Intervention '{label}' on {when.date()} falls after the last date {dates[-1].date()}."
        logger.warning(message)
        warnings.warn(message, InterventionOutOfRangeWarning)
    return TimeSeries(dates, values, label)


def is_step_dummy(s: TimeSeries) -> bool:
    values = s.values
    return bool(np.all(np.isin(values, (0.0, 1.0))) and np.all(np.diff(values) >= 0))
