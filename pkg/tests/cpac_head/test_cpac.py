"""
Tests for CPAC Head Module
Test coverage for attention, distances, penalties, gradients and standalone training
"""

import numpy as np
import pytest

from src.common.errors import ShapeMismatchError, SingleClassError
from src.cpac_head import (
    CpacConfig,
    CpacModel,
    CpacTrainConfig,
    anchor_penalty,
    attention,
    cpac_total_loss,
    explain,
    predict,
    scale_penalty,
    train_standalone,
    weighted_distance,
)
from src.neural_core import FocalConfig, LossMode, bce_loss, focal_loss, grad_check


@pytest.fixture
def rng():
    return np.random.default_rng(77)


@pytest.fixture
def model(rng):
    m = CpacModel(CpacConfig(input_dim=4, seed=3))
    m.p0.value = rng.normal(size=4)
    m.p1.value = rng.normal(size=4)
    m.alpha.value = np.array([0.7])
    m.prototypes_initialized = True
    return m


def _two_gaussians(n: int, minority: float, seed: int):
    rng = np.random.default_rng(seed)
    n1 = int(round(n * minority))
    x = np.vstack([rng.normal(-3.0, 1.0, (n - n1, 2)), rng.normal(3.0, 1.0, (n1, 2))])
    y = np.concatenate([np.zeros(n - n1, dtype=int), np.ones(n1, dtype=int)])
    order = rng.permutation(n)
    return x[order], y[order]


def _check_full_path(model, x, y):
    model.zero_grad()
    _, dx = model.loss_and_backward(x, y)
    targets = {p.name: (p.value, p.grad.copy()) for p in model.parameters()}
    targets["input"] = (x, dx)
    return grad_check(lambda: model.total_loss(x, y).total, targets)


class TestAttentionAndDistance:
    """Test the mask and the weighted distances"""

    def test_zero_attention_weights(self, model, rng):
        """Test sigmoid(0) everywhere"""
        for p in model.attention_net.parameters():
            p.value[:] = 0.0
        np.testing.assert_array_equal(attention(model, rng.normal(size=(5, 4))), 0.5)

    def test_attention_range(self, model, rng):
        w = attention(model, rng.normal(size=(100, 4)) * 10)
        assert w.min() > 0.0 and w.max() < 1.0

    def test_hidden_width_default(self):
        assert CpacConfig(input_dim=2).attention_width == 8
        assert CpacConfig(input_dim=30).attention_width == 30

    def test_weighted_distance_examples(self):
        x = np.array([1.0, 2.0])
        assert weighted_distance(x, x, np.array([0.3, 0.9]), 4.0) == 0.0
        assert weighted_distance(x, np.zeros(2), np.ones(2), 1.0) == pytest.approx(5.0)
        assert weighted_distance(x, np.zeros(2), np.full(2, 0.5), 2.0) == pytest.approx(5.0)

    def test_dimension_mismatch(self, model):
        with pytest.raises(ShapeMismatchError):
            predict(model, np.ones((2, 3)))


class TestPredict:
    """Test fraud probabilities"""

    def test_equal_distances(self, model):
        model.p1.value = model.p0.value.copy()
        np.testing.assert_allclose(predict(model, np.ones((3, 4))), 0.5)

    def test_row_at_fraud_prototype(self, model):
        model.p0.value = np.full(4, 50.0)
        assert predict(model, model.p1.value[None, :])[0] > 0.5

    def test_softmax_identity(self, model, rng):
        """Test softmax(-d0, -d1)[1] = sigmoid(d0 - d1)"""
        x = rng.normal(size=(50, 4))
        _, d0, d1 = model.distances(x)
        soft = np.exp(-d1) / (np.exp(-d0) + np.exp(-d1))
        np.testing.assert_allclose(predict(model, x), soft, atol=1e-12)

    def test_alpha_scaling_keeps_decision(self, model, rng):
        """Test argmax invariance"""
        x = rng.normal(size=(200, 4))
        before = predict(model, x) > 0.5
        model.alpha.value = model.alpha.value * 13.0
        np.testing.assert_array_equal(predict(model, x) > 0.5, before)


class TestPenalties:
    """Test scale and anchor penalties"""

    def test_prototypes_at_centroids(self, model, rng):
        x = rng.normal(size=(20, 4))
        y = np.array([0, 1] * 10)
        model.p0.value = x[y == 0].mean(axis=0)
        model.p1.value = x[y == 1].mean(axis=0)
        assert anchor_penalty(model, x, y) == pytest.approx(0.0, abs=1e-15)

    def test_zero_alpha(self, model):
        model.alpha.value = np.array([0.0])
        assert scale_penalty(model) == 0.0

    def test_absent_class_skipped(self, model, rng):
        x = rng.normal(size=(6, 4))
        y = np.zeros(6)
        expected = 0.01 * np.sum((model.p0.value - x.mean(axis=0)) ** 2)
        assert anchor_penalty(model, x, y) == pytest.approx(expected)

    def test_total_is_sum_of_terms(self, model, rng):
        x = rng.normal(size=(30, 4))
        y = rng.integers(0, 2, 30)
        parts = model.total_loss(x, y)
        cls = bce_loss(y.astype(float), predict(model, x))
        expected = cls + scale_penalty(model) + anchor_penalty(model, x, y)
        assert cpac_total_loss(model, x, y, LossMode.BCE) == pytest.approx(expected, abs=1e-12)
        assert parts.classification == pytest.approx(cls, abs=1e-12)

    def test_no_penalties_is_pure_classification(self, rng):
        m = CpacModel(CpacConfig(input_dim=3, lambda_scale=0.0, lambda_anchor=0.0))
        x, y = rng.normal(size=(10, 3)), rng.integers(0, 2, 10)
        m.init_prototypes(x, y)
        assert cpac_total_loss(m, x, y) == pytest.approx(bce_loss(y.astype(float), predict(m, x)), abs=1e-12)

    def test_focal_degeneracy(self, model, rng):
        """Test focal(gamma=0, alpha=0.5) = 0.5 * BCE + penalties"""
        x, y = rng.normal(size=(25, 4)), rng.integers(0, 2, 25)
        penalties = scale_penalty(model) + anchor_penalty(model, x, y)
        bce_total = cpac_total_loss(model, x, y, LossMode.BCE)
        model.set_loss(LossMode.FOCAL, FocalConfig(alpha_fl=0.5, gamma=0.0))
        focal_total = model.total_loss(x, y).total
        assert focal_total == pytest.approx(0.5 * (bce_total - penalties) + penalties, abs=1e-12)

    def test_prototype_pull(self, model, rng):
        """Test one anchor-only gradient step moves each prototype toward its centroid"""
        x, y = rng.normal(size=(40, 4)), np.array([0, 1] * 20)
        _, grads, _ = model.anchor_terms(x, y)
        for c, proto in ((0, model.p0), (1, model.p1)):
            centroid = x[y == c].mean(axis=0)
            before = np.linalg.norm(proto.value - centroid)
            after = np.linalg.norm(proto.value - 1.0 * grads[c] - centroid)
            assert after < before


class TestGradients:
    """Test analytic gradients of the full path"""

    @pytest.mark.parametrize("mode", [LossMode.BCE, LossMode.FOCAL])
    def test_full_path(self, model, rng, mode):
        model.set_loss(mode)
        x = rng.normal(size=(12, 4))
        y = np.array([0, 1] * 6)
        assert _check_full_path(model, x, y).passed

    def test_many_probe_points(self, rng):
        """Test 100 random single-row probes"""
        m = CpacModel(CpacConfig(input_dim=3, seed=8))
        worst = 0.0
        for i in range(100):
            m.p0.value, m.p1.value = rng.normal(size=3), rng.normal(size=3)
            m.alpha.value = rng.uniform(0.2, 2.0, size=1)
            m.prototypes_initialized = True
            x = rng.normal(size=(1, 3))
            y = np.array([i % 2])
            worst = max(worst, _check_full_path(m, x, y).max_rel_error)
        assert worst < 1e-4

    @pytest.mark.parametrize(
        "flags",
        [
            {"use_attention": False},
            {"use_prototypes": False},
            {"use_penalties": False},
        ],
    )
    def test_ablations(self, rng, flags):
        m = CpacModel(CpacConfig(input_dim=3, seed=2, **flags))
        x = rng.normal(size=(10, 3))
        y = np.array([0, 1] * 5)
        m.init_prototypes(x + 0.3, y)
        m.readout.value = rng.normal(size=3)
        assert _check_full_path(m, x, y).passed

    def test_alpha_stays_positive(self, model, rng):
        model.alpha.value = np.array([-1.0])
        model.post_step()
        assert model.alpha.value[0] >= 1e-6


class TestExplain:
    """Test transparency records"""

    def test_consistent_with_predict(self, model, rng):
        row = rng.normal(size=4)
        record = explain(model, row)
        assert record.prob == pytest.approx(predict(model, row[None, :])[0], abs=1e-12)
        assert all(0.0 < w < 1.0 for w in record.attention)

    def test_contributions_sum_to_distances(self, model, rng):
        record = explain(model, rng.normal(size=4))
        assert sum(record.contributions0) == pytest.approx(record.d0, abs=1e-12)
        assert sum(record.contributions1) == pytest.approx(record.d1, abs=1e-12)


class TestStandaloneTraining:
    """Test standalone training"""

    def test_single_class(self, model):
        with pytest.raises(SingleClassError):
            train_standalone(model, np.ones((5, 4)), np.zeros(5), np.ones((2, 4)), np.array([0, 1]))

    def test_best_checkpoint_and_patience(self):
        x, y = _two_gaussians(600, 0.05, seed=1)
        vx, vy = _two_gaussians(300, 0.05, seed=2)
        m = CpacModel(CpacConfig(input_dim=2, seed=0))
        cfg = CpacTrainConfig(epochs=40, batch_size=64, patience=2, learning_rate=0.01)
        result = train_standalone(m, x, y, vx, vy, cfg)

        assert result.best_score >= result.history[-1].val_score
        assert result.best_score == max(h.val_score for h in result.history)
        if result.stopped_early:
            assert result.epochs_run < cfg.epochs

    @pytest.mark.slow
    def test_separated_gaussians(self):
        """Test recall and prototype placement on centers at -3 and +3"""
        x, y = _two_gaussians(2000, 0.01, seed=11)
        vx, vy = _two_gaussians(2000, 0.01, seed=12)
        m = CpacModel(CpacConfig(input_dim=2, seed=0))
        train_standalone(m, x, y, vx, vy, CpacTrainConfig(epochs=60, batch_size=64, learning_rate=0.01))

        recall = np.mean(predict(m, vx[vy == 1]) > 0.5)
        assert recall >= 0.95
        assert np.linalg.norm(m.p0.value - x[y == 0].mean(axis=0)) < 0.5
        assert np.linalg.norm(m.p1.value - x[y == 1].mean(axis=0)) < 0.5

    def test_save_and_load(self, model, tmp_path, rng):
        path = model.save(tmp_path / "cpac.json")
        loaded = CpacModel.load(path)
        x = rng.normal(size=(5, 4))
        np.testing.assert_array_equal(predict(loaded, x), predict(model, x))
