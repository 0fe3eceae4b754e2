import logging
import re
import pandas as pd
import numpy as np

from gridvol.exceptions import DuplicateDate, ParseError
from timeseries.models import TimeSeries
from runs.models import Dataset


logger = logging.getLogger(__name__)


def _parse_dates(raw: pd.Series, date_format: str = None) -> pd.DatetimeIndex:
    dates = pd.to_datetime(raw, format=date_format or "ISO8601", errors="coerce")
    bad = np.flatnonzero(dates.isna().to_numpy())
    if len(bad):
        row = int(bad[0])
        raise ParseError(f"cannot parse date '{raw.iloc[row]}'", row=row + 1)
    return pd.DatetimeIndex(dates).normalize()


def _parse_values(raw: pd.Series, column: str) -> np.ndarray:
    stripped = raw.str.strip()
    values = pd.to_numeric(stripped.replace("", np.nan), errors="coerce")
    bad = np.flatnonzero(values.isna().to_numpy() & (stripped != "").to_numpy())
    if len(bad):
        row = int(bad[0])
        raise ParseError(f"cannot parse '{raw.iloc[row]}' in column '{column}' as a number", row=row + 1)
    return values.to_numpy(dtype=float)


def ingest(path, date_column: str = "date", date_format: str = None) -> Dataset:
    """
    Read a comma-delimited file with a header row into a Dataset.

    Parameters
    ----------
    path : str or Path
        Input file.
    date_column : str
        Header of the date column; every other column becomes a TimeSeries.
    date_format : str, optional
        strftime format of the dates; ISO-8601 when omitted.

    Returns
    -------
    Dataset
        Series sorted by date. Empty fields become missing values.
    """
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as e:
        raise ParseError(f"data file '{path}' not found") from e
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"data file '{path}' is empty") from e
    except pd.errors.ParserError as e:
        # pandas counts the header as line 1
        match = re.search(r"line (\d+)", str(e))
        row = int(match.group(1)) - 1 if match else None
        raise ParseError(f"malformed row in '{path}' ({e})".replace("\n", " "), row=row) from e

    # the header fixes the field count, so longer rows fail to parse above
    frame = raw.iloc[1:].reset_index(drop=True)
    frame.columns = [str(column).strip() for column in raw.iloc[0]]

    if date_column not in frame.columns:
        raise ParseError(f"date column '{date_column}' not in header {list(frame.columns)}")
    if len(frame) == 0:
        raise ParseError(f"data file '{path}' has no data rows")

    # short rows leave NaN; present-but-empty fields are ""
    ragged = np.flatnonzero(frame.isna().any(axis=1).to_numpy())
    if len(ragged):
        raise ParseError(f"expected {len(frame.columns)} fields", row=int(ragged[0]) + 1)

    dates = _parse_dates(frame[date_column], date_format)
    duplicated = np.flatnonzero(dates.duplicated())
    if len(duplicated):
        row = int(duplicated[0])
        raise DuplicateDate(f"duplicate date {dates[row].date()}", row=row + 1)

    order = np.argsort(dates.to_numpy(), kind="stable")
    dates = dates[order]
    series = {}
    for column in frame.columns:
        if column == date_column:
            continue
        values = _parse_values(frame[column], column)[order]
        series[column] = TimeSeries(dates, values, column)

    dataset = Dataset(dates=dates, series=series, sources=(str(path),))
    logger.info(
        f"Ingested {len(dates)} rows and {len(series)} series from {path} "
        f"({dates[0].date()} to {dates[-1].date()})"
    )
    return dataset
