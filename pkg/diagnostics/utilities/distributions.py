from scipy.special import gammaincc
import numpy as np


def chi2_sf(statistic: float, df: int) -> float:
    """
    Upper tail of the chi-square distribution via the regularized incomplete gamma function.
    """
    if df < 1:
        raise ValueError(f"Chi-square degrees of freedom must be >= 1, got {df}.")
    if statistic <= 0:
        return 1.0
    return float(np.clip(gammaincc(df / 2.0, statistic / 2.0), 0.0, 1.0))
