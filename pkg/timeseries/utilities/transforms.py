import pandas as pd
import numpy as np

from gridvol.exceptions import DomainError, EndpointMissing, GapTooLarge, InsufficientData
from timeseries.models import TimeSeries


TRANSFORM_KINDS = ("log", "diff", "log_return", "ewma_smooth")


def missing_runs(values: np.ndarray) -> list:
    """
    Return (start, length) for each run of consecutive NaN entries in `values`.
    """
    missing = pd.Series(np.isnan(values))
    # label each block of equal flags, then keep the missing blocks
    blocks = missing.ne(missing.shift()).cumsum()
    runs = missing.index.to_series()[missing].groupby(blocks[missing]).agg(["min", "size"])
    return list(zip(runs["min"].tolist(), runs["size"].tolist()))


def impute_missing(s: TimeSeries, max_gap: int) -> TimeSeries:
    """
    Fill sporadic missing values by linear interpolation between the bounding observations.

    Parameters
    ----------
    s : TimeSeries
        Series whose first and last values are present.
    max_gap : int
        Longest run of consecutive missing values that may be filled.

    Returns
    -------
    TimeSeries
        Same dates, no missing values. A complete series is returned unchanged.
    """
    if max_gap < 1:
        raise DomainError(f"max_gap must be a positive integer, got {max_gap}.")
    if not s.has_missing:
        return s

    values = s.values
    if np.isnan(values).all():
        raise InsufficientData(f"Series '{s.name}' has no observed values.")
    if np.isnan(values[0]) or np.isnan(values[-1]):
        raise EndpointMissing(f"Series '{s.name}' is missing its first or last value.")

    for start, length in missing_runs(values):
        if length > max_gap:
            raise GapTooLarge(
                f"Series '{s.name}' has {length} consecutive missing values starting at "
                f"{s.dates[start].date()} (max_gap={max_gap})."
            )

    # positional interpolation: each missing day sits evenly between its neighbours
    filled = pd.Series(values).interpolate(method="linear", limit_area="inside")
    return s.with_values(filled.to_numpy())


def transform(s: TimeSeries, kind: str, span: int = None) -> TimeSeries:
    """
    Apply one of the series transforms: 'log', 'diff', 'log_return' or 'ewma_smooth'
    (which needs `span`; smoothing factor 2/(span+1), first value kept as is).
    """
    values = s.values

    if kind in ("log", "log_return"):
        if np.any(values[~np.isnan(values)] <= 0):
            raise DomainError(f"'{kind}' requires strictly positive values in series '{s.name}'.")

    if kind in ("diff", "log_return") and len(s) < 2:
        raise InsufficientData(f"'{kind}' requires at least 2 observations, got {len(s)}.")

    if kind == "log":
        return TimeSeries(s.dates, np.log(values), f"log_{s.name}")
    elif kind == "diff":
        return TimeSeries(s.dates[1:], np.diff(values), f"diff_{s.name}")
    elif kind == "log_return":
        return TimeSeries(s.dates[1:], np.diff(np.log(values)), f"logret_{s.name}")
    elif kind == "ewma_smooth":
        if span is None or span < 1:
            raise DomainError(f"ewma_smooth requires a span >= 1, got {span}.")
        smoothed = s.to_series().ewm(span=span, adjust=False).mean()
        return TimeSeries(s.dates, smoothed.to_numpy(), f"ewma{span}_{s.name}")
    else:
        raise DomainError(f"Invalid transform: {kind}. Expected one of {TRANSFORM_KINDS}.")


def apply_transforms(s: TimeSeries, chain: list) -> TimeSeries:
    """Apply a chain of (kind, span) transforms left to right."""
    for kind, span in chain:
        s = transform(s, kind, span=span)
    return s
