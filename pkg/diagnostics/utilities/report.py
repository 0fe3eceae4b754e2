import logging
import numpy as np

from diagnostics.utilities.portmanteau import correlogram, ljung_box
from diagnostics.utilities.unit_root import adf_sweep, pp_test
from timeseries.utilities.statistics import observed_values
from diagnostics.utilities.residuals import arch_lm
from diagnostics.utilities.normality import jarque_bera
from diagnostics.models import PreEstimationReport
from timeseries.models import TimeSeries


logger = logging.getLogger(__name__)


def pre_estimation_report(s: TimeSeries, adf_lags: int = 7, trend: str = "constant_trend",
                          ljung_box_lags: int = 7, arch_lags: int = 7) -> PreEstimationReport:
    """
    Normality, unit-root, serial-correlation and ARCH-effect tests on `s`.

    ARCH-LM runs on the demeaned observations.
    """
    logger.info(f"Running pre-estimation tests on '{s.name}' ({len(s)} observations)")
    x = observed_values(s)
    demeaned = TimeSeries(s.dates[~np.isnan(s.values)], x - x.mean(), f"demeaned_{s.name}")

    return PreEstimationReport(
        series=s.name,
        jarque_bera=jarque_bera(s),
        adf=adf_sweep(s, max_lags=adf_lags, trend=trend),
        pp=pp_test(s, trend=trend),
        ljung_box=ljung_box(s, ljung_box_lags),
        arch_lm=arch_lm(demeaned, lags=arch_lags),
        correlogram=correlogram(s, ljung_box_lags),
    )
