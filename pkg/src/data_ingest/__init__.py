"""
Data Ingest Module - LatentGuard v1.0
Transaction data loading and preprocessing

This module handles:
- Parsing the transaction CSV (Time, V1..V28, Amount, Class)
- Robust median/IQR normalization fitted on training rows
- Stratified train/validation splitting
- Synthetic two-Gaussian transaction data for desk-scale runs
"""

from .models import (
    CREDITCARD_FEATURES,
    LABEL_COLUMN,
    TransactionRecord,
    Dataset,
    NormalizationParams,
    SplitIndices,
)
from .csv_parser import CsvParser, parse_csv
from .normalizer import RobustNormalizer, fit_normalizer, apply_normalizer
from .splitter import stratified_split
from .synthetic import make_synthetic_transactions, write_transactions_csv

__all__ = [
    "CREDITCARD_FEATURES",
    "LABEL_COLUMN",
    "TransactionRecord",
    "Dataset",
    "NormalizationParams",
    "SplitIndices",
    "CsvParser",
    "parse_csv",
    "RobustNormalizer",
    "fit_normalizer",
    "apply_normalizer",
    "stratified_split",
    "make_synthetic_transactions",
    "write_transactions_csv",
]

__version__ = "1.0.0"
