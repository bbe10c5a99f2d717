"""
CSV Parser
Parse transaction CSV files into Datasets
"""

import logging
import re
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from ..common.errors import DataIngestError
from .models import CREDITCARD_FEATURES, LABEL_COLUMN, Dataset

logger = logging.getLogger(__name__)

_PANDAS_FIELD_COUNT = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


class CsvParser:
    """
    Parse transaction files

    Supports layouts:
    - "Time,V1,...,V28,Amount,Class" (the credit-card schema)
    - any header whose last column is "Class" (synthetic data)

    Every malformed row is reported with its 1-based file line number.
    """

    def __init__(self, label_column: str = LABEL_COLUMN, strict_schema: bool = False):
        """
        Initialize parser

        Args:
            label_column: Name of the label column
            strict_schema: Require exactly the 31-column credit-card header
        """
        self.label_column = label_column
        self.strict_schema = strict_schema

    def parse(self, path: Union[str, Path]) -> Dataset:
        """
        Parse a transaction CSV

        Args:
            path: CSV file path; the first row is the header

        Returns:
            Dataset with one row per data line

        Raises:
            DataIngestError: missing file, malformed row, non-numeric cell
                or unknown header layout
        """
        path = Path(path)
        if not path.is_file():
            raise DataIngestError(f"File not found: {path}")

        raw = self._read_raw(path)
        if raw.shape[0] == 0:
            raise DataIngestError("File is empty; a header row is required", line_number=1)

        header = [str(c).strip() for c in raw.iloc[0].tolist()]
        feature_columns = self._check_header(header)

        body = raw.iloc[1:]
        # Line numbers are 1-based and include the header row
        line_numbers = np.arange(2, 2 + body.shape[0])
        blank = body.isna().all(axis=1).to_numpy()
        body = body.loc[~blank]
        line_numbers = line_numbers[~blank]

        short_rows = body.isna().any(axis=1).to_numpy()
        if short_rows.any():
            i = int(np.argmax(short_rows))
            found = int(body.iloc[i].notna().sum())
            raise DataIngestError(
                f"expected {len(header)} columns, found {found}", line_number=int(line_numbers[i])
            )

        values = np.empty(body.shape, dtype=np.float64)
        first_bad: Optional[tuple] = None
        for j, name in enumerate(header):
            column = body.iloc[:, j].astype(str).str.strip()
            numeric = pd.to_numeric(column, errors="coerce").to_numpy(dtype=np.float64)
            bad = ~np.isfinite(numeric)
            if bad.any():
                i = int(np.argmax(bad))
                if first_bad is None or line_numbers[i] < first_bad[0]:
                    first_bad = (int(line_numbers[i]), name, column.iloc[i])
            values[:, j] = numeric
        if first_bad is not None:
            line, name, cell = first_bad
            raise DataIngestError(f"non-numeric or non-finite value {cell!r} in column {name!r}", line_number=line)

        label_idx = header.index(self.label_column)
        labels = values[:, label_idx]
        bad_label = (labels != 0) & (labels != 1)
        if bad_label.any():
            i = int(np.argmax(bad_label))
            raise DataIngestError(
                f"label must be 0 or 1, found {labels[i]!r}", line_number=int(line_numbers[i])
            )

        feature_idx = [header.index(c) for c in feature_columns]
        dataset = Dataset(
            features=values[:, feature_idx].reshape(-1, len(feature_idx)),
            labels=labels.astype(np.int64),
            column_names=feature_columns,
        )
        logger.info(
            "Parsed %s: %d rows, %d features, %d fraud",
            path.name, dataset.n_rows, dataset.n_features, dataset.class_counts()[1],
        )
        return dataset

    def _read_raw(self, path: Path) -> pd.DataFrame:
        """Read every cell as text so that bad cells can be located"""
        try:
            return pd.read_csv(
                path,
                header=None,
                dtype=str,
                keep_default_na=False,
                skip_blank_lines=False,
                encoding="utf-8",
            )
        except pd.errors.EmptyDataError:
            return pd.DataFrame()
        except pd.errors.ParserError as exc:
            match = _PANDAS_FIELD_COUNT.search(str(exc))
            if match:
                expected, line, saw = (int(g) for g in match.groups())
                raise DataIngestError(f"expected {expected} columns, found {saw}", line_number=line) from exc
            raise DataIngestError(f"Could not parse CSV: {exc}") from exc
        except UnicodeDecodeError as exc:
            raise DataIngestError(f"File is not UTF-8: {exc}") from exc

    def _check_header(self, header: List[str]) -> List[str]:
        """Validate the header and return the feature columns in order"""
        if len(set(header)) != len(header):
            raise DataIngestError("unknown header layout: duplicate column names", line_number=1)
        if self.label_column not in header:
            raise DataIngestError(
                f"unknown header layout: no {self.label_column!r} column", line_number=1
            )
        features = [c for c in header if c != self.label_column]
        if not features:
            raise DataIngestError("unknown header layout: no feature columns", line_number=1)
        if self.strict_schema and features != CREDITCARD_FEATURES:
            raise DataIngestError(
                "unknown header layout: expected Time,V1..V28,Amount,Class", line_number=1
            )
        return features


def parse_csv(path: Union[str, Path], drop_time: bool = False) -> Dataset:
    """
    Parse a transaction CSV

    Args:
        path: File path
        drop_time: Remove the Time column after parsing

    Returns:
        Parsed Dataset
    """
    dataset = CsvParser().parse(path)
    if drop_time and "Time" in dataset.column_names:
        dataset = dataset.drop_columns(["Time"])
    return dataset
