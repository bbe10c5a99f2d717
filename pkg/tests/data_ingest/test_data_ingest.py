"""
Tests for Data Ingest Module
Test coverage for CSV parsing, robust normalization and the stratified split
"""

import os

import numpy as np
import pytest

from src.common.errors import DataIngestError, NotFittedError, ShapeMismatchError, SingleClassError
from src.data_ingest import (
    CREDITCARD_FEATURES,
    CsvParser,
    Dataset,
    NormalizationParams,
    RobustNormalizer,
    SplitIndices,
    apply_normalizer,
    fit_normalizer,
    make_synthetic_transactions,
    parse_csv,
    stratified_split,
    write_transactions_csv,
)

HEADER = ",".join(CREDITCARD_FEATURES + ["Class"])


def _row(value: float, label: int, n: int = 30) -> str:
    return ",".join([str(value)] * n + [str(label)])


@pytest.fixture
def creditcard_file(tmp_path):
    """Small file in the credit-card layout"""
    path = tmp_path / "cc.csv"
    lines = [HEADER] + [_row(float(i), 1 if i % 4 == 0 else 0) for i in range(8)]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def imbalanced_dataset():
    """8 normal rows followed by 2 fraud rows"""
    features = np.arange(20, dtype=np.float64).reshape(10, 2)
    labels = np.array([0] * 8 + [1] * 2)
    return Dataset(features=features, labels=labels, column_names=["a", "b"])


class TestCsvParser:
    """Test CSV parsing"""

    def test_parse_creditcard_layout(self, creditcard_file):
        """Test parsing a well-formed file"""
        ds = parse_csv(creditcard_file)

        assert ds.n_rows == 8
        assert ds.n_features == 30
        assert ds.column_names == CREDITCARD_FEATURES
        assert ds.class_counts() == {0: 6, 1: 2}
        assert ds.features[3, 0] == 3.0

    def test_header_only_gives_empty_dataset(self, tmp_path):
        """Test header-only file"""
        path = tmp_path / "empty.csv"
        path.write_text(HEADER + "\n")

        ds = parse_csv(path)
        assert ds.n_rows == 0
        assert ds.n_features == 30

    def test_short_row_names_line(self, tmp_path):
        """Test a 30-column row in a 31-column file"""
        path = tmp_path / "short.csv"
        lines = [HEADER, _row(1.0, 0), ",".join(["1.0"] * 30)]
        path.write_text("\n".join(lines) + "\n")

        with pytest.raises(DataIngestError) as exc:
            parse_csv(path)
        assert exc.value.line_number == 3
        assert "line 3" in str(exc.value)

    def test_long_row_names_line(self, tmp_path):
        """Test a row with too many fields"""
        path = tmp_path / "long.csv"
        lines = [HEADER, _row(1.0, 0), _row(1.0, 0, n=31)]
        path.write_text("\n".join(lines) + "\n")

        with pytest.raises(DataIngestError) as exc:
            parse_csv(path)
        assert exc.value.line_number == 3

    def test_non_numeric_cell(self, tmp_path):
        """Test a non-numeric value"""
        path = tmp_path / "bad.csv"
        cells = ["1.0"] * 30 + ["0"]
        cells[5] = "abc"
        path.write_text("\n".join([HEADER, _row(2.0, 0), ",".join(cells)]) + "\n")

        with pytest.raises(DataIngestError) as exc:
            parse_csv(path)
        assert exc.value.line_number == 3
        assert "V5" in str(exc.value)

    def test_label_outside_binary(self, tmp_path):
        """Test a label of 2"""
        path = tmp_path / "label.csv"
        path.write_text("\n".join([HEADER, _row(1.0, 2)]) + "\n")

        with pytest.raises(DataIngestError, match="label"):
            parse_csv(path)

    def test_missing_class_column(self, tmp_path):
        """Test unknown header layout"""
        path = tmp_path / "nolabel.csv"
        path.write_text("a,b\n1,2\n")

        with pytest.raises(DataIngestError, match="header"):
            parse_csv(path)

    def test_missing_file(self, tmp_path):
        """Test missing file"""
        with pytest.raises(DataIngestError):
            parse_csv(tmp_path / "nope.csv")

    def test_strict_schema_rejects_synthetic_header(self, tmp_path):
        """Test strict schema mode"""
        path = tmp_path / "syn.csv"
        path.write_text("f1,f2,Class\n1,2,0\n")

        assert CsvParser().parse(path).n_features == 2
        with pytest.raises(DataIngestError):
            CsvParser(strict_schema=True).parse(path)

    def test_drop_time(self, creditcard_file):
        """Test dropping the Time column"""
        ds = parse_csv(creditcard_file, drop_time=True)
        assert ds.n_features == 29
        assert "Time" not in ds.column_names

    def test_synthetic_file_round_trips_through_parser(self, tmp_path):
        """Test writing then parsing synthetic data"""
        ds = make_synthetic_transactions(n_rows=200, minority_fraction=0.05, seed=3)
        path = write_transactions_csv(ds, tmp_path / "syn.csv")

        parsed = parse_csv(path)
        np.testing.assert_allclose(parsed.features, ds.features, rtol=1e-12)
        np.testing.assert_array_equal(parsed.labels, ds.labels)

    @pytest.mark.skipif(
        not os.environ.get("LATENTGUARD_CREDITCARD_CSV"), reason="credit-card file not configured"
    )
    def test_kaggle_file_counts(self):
        """Test the published credit-card file"""
        ds = parse_csv(os.environ["LATENTGUARD_CREDITCARD_CSV"])
        assert ds.n_rows == 284_807
        assert ds.class_counts()[1] == 492


class TestNormalizer:
    """Test robust normalization"""

    def test_median_and_iqr(self):
        """Test linear-interpolation quantiles"""
        params = fit_normalizer(np.array([[1.0], [2.0], [3.0], [4.0], [5.0]]))
        assert params.medians[0] == 3.0
        assert params.iqrs[0] == 2.0

    def test_constant_column_unit_divisor(self):
        """Test zero IQR"""
        params = fit_normalizer(np.array([[7.0], [7.0], [7.0]]))
        assert params.medians[0] == 7.0
        assert params.iqrs[0] == 1.0

    def test_single_row(self):
        """Test one sample"""
        params = fit_normalizer(np.array([[4.5, -1.0]]))
        np.testing.assert_array_equal(params.medians, [4.5, -1.0])
        np.testing.assert_array_equal(params.iqrs, [1.0, 1.0])

    def test_apply(self):
        """Test (x - median) / iqr"""
        train = np.array([[1.0], [2.0], [3.0], [4.0], [5.0]])
        params = fit_normalizer(train)
        out = apply_normalizer(params, np.array([[5.0], [3.0]]))
        np.testing.assert_allclose(out, [[1.0], [0.0]])

    def test_validation_rows_do_not_influence_fit(self):
        """Test fit/apply separation"""
        rng = np.random.default_rng(0)
        train, val = rng.normal(size=(50, 3)), rng.normal(size=(20, 3)) + 100.0
        params = fit_normalizer(train)
        apply_normalizer(params, val)
        refit = fit_normalizer(train)
        np.testing.assert_array_equal(params.medians, refit.medians)

    def test_shape_mismatch(self):
        """Test column-count mismatch"""
        params = fit_normalizer(np.ones((3, 2)))
        with pytest.raises(ShapeMismatchError):
            apply_normalizer(params, np.ones((3, 3)))

    def test_invert_restores_input(self):
        """Test denormalization"""
        rng = np.random.default_rng(1)
        x = rng.normal(size=(30, 4)) * 5 + 2
        norm = RobustNormalizer().fit(x)
        np.testing.assert_allclose(norm.invert(norm.transform(x)), x, atol=1e-12)

    def test_round_trip_over_seeds(self):
        """Test zero medians after normalizing and exact inversion on 200 random matrices"""
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(1, 80))
            x = np.column_stack([
                rng.normal(size=n) * rng.uniform(0.1, 100.0) + rng.uniform(-50.0, 50.0),
                rng.lognormal(mean=3.0, sigma=1.5, size=n),
                np.full(n, rng.uniform(-5.0, 5.0)),
            ])
            params = fit_normalizer(x)
            out = apply_normalizer(params, x)
            assert np.all(np.abs(np.median(out, axis=0)) < 1e-9), seed
            norm = RobustNormalizer().fit(x)
            np.testing.assert_allclose(norm.invert(out), x, rtol=1e-12, atol=1e-9)

    def test_unfitted(self):
        """Test using an unfitted normalizer"""
        with pytest.raises(NotFittedError):
            RobustNormalizer().transform(np.ones((2, 2)))

    def test_params_document(self, tmp_path):
        """Test saved parameters"""
        params = fit_normalizer(np.array([[1.0, 2.0], [3.0, 6.0]]), columns=["a", "b"])
        path = params.save(tmp_path / "norm.json")
        loaded = NormalizationParams.load(path)
        np.testing.assert_array_equal(loaded.medians, params.medians)
        assert loaded.columns == ["a", "b"]

    def test_non_positive_divisor_rejected(self):
        """Test model validation"""
        with pytest.raises(ValueError):
            NormalizationParams(medians=[0.0], iqrs=[0.0], columns=[])


class TestStratifiedSplit:
    """Test the stratified split"""

    def test_ten_rows_half(self, imbalanced_dataset):
        """Test 8 normal + 2 fraud at ratio 0.5"""
        split = stratified_split(imbalanced_dataset, 0.5, seed=7)
        train_labels = imbalanced_dataset.labels[split.train_idx]

        assert int(np.sum(train_labels == 0)) == 4
        assert int(np.sum(train_labels == 1)) == 1
        assert split.covers(imbalanced_dataset.n_rows)

    def test_kaggle_shaped_counts(self):
        """Test the credit-card class counts at ratio 0.7"""
        n_normal, n_fraud = 284_315, 492
        labels = np.concatenate([np.zeros(n_normal, dtype=np.int64), np.ones(n_fraud, dtype=np.int64)])
        ds = Dataset(features=np.zeros((labels.size, 1)), labels=labels, column_names=["x"])

        split = stratified_split(ds, 0.7, seed=0)
        train = labels[split.train_idx]
        val = labels[split.val_idx]
        assert (int(np.sum(train == 0)), int(np.sum(train == 1))) == (199_020, 344)
        assert (int(np.sum(val == 0)), int(np.sum(val == 1))) == (85_295, 148)

    def test_deterministic(self, imbalanced_dataset):
        """Test same seed gives same split"""
        a = stratified_split(imbalanced_dataset, 0.6, seed=11)
        b = stratified_split(imbalanced_dataset, 0.6, seed=11)
        np.testing.assert_array_equal(a.train_idx, b.train_idx)
        np.testing.assert_array_equal(a.val_idx, b.val_idx)

    def test_sorted_and_disjoint(self, imbalanced_dataset):
        """Test index invariants"""
        split = stratified_split(imbalanced_dataset, 0.5, seed=2)
        assert np.all(np.diff(split.train_idx) > 0)
        assert np.intersect1d(split.train_idx, split.val_idx).size == 0

    def test_single_class(self):
        """Test a dataset without fraud"""
        ds = Dataset(features=np.zeros((4, 1)), labels=np.zeros(4, dtype=np.int64), column_names=["x"])
        with pytest.raises(SingleClassError):
            stratified_split(ds, 0.5, seed=0)

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.2, 1.5])
    def test_ratio_bounds(self, imbalanced_dataset, ratio):
        """Test invalid ratios"""
        with pytest.raises(ValueError):
            stratified_split(imbalanced_dataset, ratio, seed=0)

    def test_partition_and_stratification_over_seeds(self):
        """Test 1,000 seeds on 100-row datasets"""
        for seed in range(1000):
            rng = np.random.default_rng(seed)
            n_fraud = int(rng.integers(1, 51))
            labels = rng.permutation(np.concatenate([np.zeros(100 - n_fraud), np.ones(n_fraud)]).astype(np.int64))
            ratio = float(rng.uniform(0.05, 0.95))
            ds = Dataset(features=np.zeros((100, 1)), labels=labels, column_names=["x"])

            split = stratified_split(ds, ratio, seed=seed)
            assert np.intersect1d(split.train_idx, split.val_idx).size == 0
            np.testing.assert_array_equal(np.union1d(split.train_idx, split.val_idx), np.arange(100))
            train = labels[split.train_idx]
            for c in (0, 1):
                count = int(np.sum(labels == c))
                share = np.sum(train == c) / count
                assert abs(share - ratio) <= 1.0 / count + 1e-12, (seed, c)

    def test_empty_training_class_warns(self, caplog):
        """Test a lone fraud row at ratio 0.5"""
        labels = np.array([0] * 9 + [1])
        ds = Dataset(features=np.zeros((10, 1)), labels=labels, column_names=["x"])
        split = stratified_split(ds, 0.5, seed=0)
        assert not np.any(labels[split.train_idx] == 1)
        assert "no training rows" in caplog.text

    def test_overlapping_indices_rejected(self):
        """Test SplitIndices validation"""
        with pytest.raises(ValueError):
            SplitIndices(train_idx=[0, 1], val_idx=[1, 2], seed=0)

    def test_split_document(self, tmp_path, imbalanced_dataset):
        """Test saved split indices"""
        split = stratified_split(imbalanced_dataset, 0.5, seed=4)
        loaded = SplitIndices.load(split.save(tmp_path / "split.json"))
        np.testing.assert_array_equal(loaded.train_idx, split.train_idx)
        assert loaded.seed == 4
