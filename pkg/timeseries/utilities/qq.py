from scipy import stats
import numpy as np

from gridvol.exceptions import DomainError, InsufficientData
from timeseries.utilities.statistics import observed_values
from timeseries.models import TimeSeries


def plotting_positions(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def reference_quantiles(p: np.ndarray, dist: str = "normal", loc: float = 0.0,
                        scale: float = 1.0, nu: float = None) -> np.ndarray:
    """
    Quantiles of the Q-Q reference distribution: normal(loc, scale), or Student's t with
    `nu` degrees of freedom rescaled to unit variance.
    """
    if dist == "normal":
        if scale <= 0:
            raise DomainError(f"Normal reference needs a positive scale, got {scale}.")
        return stats.norm.ppf(p, loc=loc, scale=scale)
    elif dist == "student_t":
        if nu is None or nu <= 2:
            raise DomainError(f"Student's t reference needs nu > 2 to standardise, got {nu}.")
        return stats.t.ppf(p, df=nu) * np.sqrt((nu - 2.0) / nu)
    raise DomainError(f"Invalid Q-Q reference distribution: {dist}.")


def qq_points(s: TimeSeries, dist: str = "normal", loc: float = 0.0, scale: float = 1.0,
              nu: float = None) -> list:
    """
    Pairs (theoretical_quantile, empirical_quantile) for the sorted sample at plotting
    positions (i - 0.5)/n.
    """
    x = np.sort(observed_values(s))
    n = len(x)
    if n < 3:
        raise InsufficientData(f"Q-Q points need at least 3 observations, got {n}.")
    theoretical = reference_quantiles(plotting_positions(n), dist=dist, loc=loc, scale=scale, nu=nu)
    return list(zip(theoretical.tolist(), x.tolist()))
