"""
Tests for Eval Metrics Module
Test coverage for confusion metrics, AUC-ROC, the threshold agent, PCA and silhouette
"""

import numpy as np
import pytest
from sklearn.metrics import roc_auc_score, silhouette_score

from src.common.errors import ShapeMismatchError, SingleClassError
from src.eval_metrics import (
    ConfusionCounts,
    PowerIterationPCA,
    ThresholdAgent,
    ThresholdAgentConfig,
    auc_roc,
    composite,
    confusion,
    evaluate,
    fit_threshold,
    pca_project,
    prf,
    silhouette,
)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


class TestConfusion:
    """Test confusion counts and derived scores"""

    def test_perfect_scores(self):
        """Test probabilities equal to labels"""
        y = np.array([1, 0, 1, 1, 0])
        counts = confusion(y, y.astype(float), 0.5)
        assert counts.fp == 0 and counts.fn == 0
        assert counts.total == 5

    def test_hand_counted(self):
        """Test one of each outcome"""
        counts = confusion([1, 0, 1, 0], [0.9, 0.8, 0.4, 0.1], 0.5)
        assert (counts.tp, counts.fp, counts.fn, counts.tn) == (1, 1, 1, 1)

    def test_strict_threshold(self):
        """Test probability exactly at tau predicts 0"""
        counts = confusion([1], [0.5], 0.5)
        assert counts.tp == 0 and counts.fn == 1

    def test_length_mismatch(self):
        """Test mismatched inputs"""
        with pytest.raises(ShapeMismatchError):
            confusion([1, 0], [0.5], 0.5)

    def test_prf_and_composite(self):
        """Test standard definitions"""
        assert prf(ConfusionCounts(tp=3, fp=0, tn=5, fn=0)) == (1.0, 1.0, 1.0)
        assert composite(1.0, 1.0) == 1.0
        assert composite(0.9, 0.7) == pytest.approx(0.8)
        assert prf(ConfusionCounts(tp=0, fp=0, tn=4, fn=2)) == (0.0, 0.0, 0.0)

    def test_f1_harmonic(self, rng):
        """Test F1 against 2PR/(P+R)"""
        for _ in range(50):
            tp, fp, fn = (int(v) for v in rng.integers(1, 100, size=3))
            p, r, f1 = prf(ConfusionCounts(tp=tp, fp=fp, tn=0, fn=fn))
            assert f1 == pytest.approx(2 * p * r / (p + r), abs=1e-12)

    def test_evaluate_report(self):
        """Test the full report"""
        report = evaluate([1, 0, 1, 0], [0.9, 0.8, 0.4, 0.1], 0.5)
        assert report.precision == 0.5
        assert report.recall == 0.5
        assert report.auc_roc == pytest.approx(0.75)
        assert report.composite == 0.5

    def test_evaluate_single_class(self):
        """Test undefined AUC"""
        assert evaluate([0, 0], [0.1, 0.2]).auc_roc is None


class TestAucRoc:
    """Test rank-based AUC"""

    def test_perfect_order(self):
        assert auc_roc([0, 0, 1, 1], [0.1, 0.2, 0.3, 0.4]) == 1.0

    def test_all_ties(self):
        assert auc_roc([0, 1, 0, 1], [0.3] * 4) == 0.5

    def test_all_pairs_oracle(self, rng):
        """Test 200 random pairs against brute force"""
        y = rng.integers(0, 2, size=200)
        s = np.round(rng.random(200), 2)
        pos, neg = s[y == 1], s[y == 0]
        expected = np.mean([(a > b) + 0.5 * (a == b) for a in pos for b in neg])
        assert auc_roc(y, s) == pytest.approx(expected, abs=1e-9)
        assert auc_roc(y, s) == pytest.approx(roc_auc_score(y, s), abs=1e-9)

    def test_monotone_invariance(self, rng):
        """Test exp and cube transforms"""
        y = rng.integers(0, 2, size=300)
        s = rng.normal(size=300)
        base = auc_roc(y, s)
        assert auc_roc(y, np.exp(s)) == pytest.approx(base, abs=1e-12)
        assert auc_roc(y, s ** 3) == pytest.approx(base, abs=1e-12)

    def test_single_class(self):
        with pytest.raises(SingleClassError):
            auc_roc([1, 1], [0.2, 0.9])


class TestThresholdAgent:
    """Test the learned threshold"""

    def test_probs_equal_labels(self):
        """Test degenerate optimum"""
        y = np.array([0, 1] * 50)
        fit = ThresholdAgent().fit(y.astype(float), y)
        assert 0.0 < fit.threshold < 1.0
        assert fit.best_f1 == 1.0

    def test_calibration_gap(self, rng):
        """Test threshold lands between the classes"""
        pos = rng.uniform(0.75, 1.0, size=500)
        neg = rng.uniform(0.0, 0.65, size=500)
        p = np.concatenate([pos, neg])
        y = np.concatenate([np.ones(500), np.zeros(500)])
        tau = fit_threshold(ThresholdAgent(), p, y)
        assert 0.65 <= tau <= 0.75

    def test_stays_in_unit_interval(self, rng):
        """Test 10,000 steps with lr 1"""
        p = rng.random(100)
        y = (rng.random(100) > 0.5).astype(int)
        agent = ThresholdAgent(ThresholdAgentConfig(learning_rate=1.0, steps=10_000))
        fit = agent.fit(p, y)
        assert 0.0 < fit.threshold < 1.0

    def test_all_equal_probabilities(self, caplog):
        """Test degenerate input"""
        fit = ThresholdAgent().fit(np.full(10, 0.3), np.array([0, 1] * 5))
        assert fit.threshold == 0.5
        assert fit.degenerate
        assert "equal" in caplog.text

    def test_trajectory_recorded(self, rng):
        """Test visited taus"""
        p = rng.random(50)
        y = (p + rng.normal(0, 0.2, 50) > 0.5).astype(int)
        fit = ThresholdAgent(ThresholdAgentConfig(steps=25)).fit(p, y)
        assert len(fit.taus) == 26
        assert fit.taus[0] == pytest.approx(0.5)

    def test_refit_starts_fresh(self, rng):
        """Test a reused agent matches a new one"""
        p = rng.random(80)
        y = (p + rng.normal(0, 0.2, 80) > 0.5).astype(int)
        agent = ThresholdAgent(ThresholdAgentConfig(steps=200))
        first = agent.fit(p, y)
        second = agent.fit(p, y)
        fresh = ThresholdAgent(ThresholdAgentConfig(steps=200)).fit(p, y)
        assert second.taus == first.taus == fresh.taus
        assert second.threshold == fresh.threshold
        assert fit.best_f1 == max(fit.f1_scores)

    def test_single_class(self):
        with pytest.raises(SingleClassError):
            ThresholdAgent().fit([0.2, 0.4], [1, 1])


class TestProjection:
    """Test power-iteration PCA"""

    def test_line_in_plane(self, rng):
        """Test rank-1 data"""
        t = rng.normal(size=500)
        x = np.column_stack([t, 2 * t + 1])
        proj = pca_project(x, 2)
        assert proj.explained_ratio[0] >= 0.999
        assert proj.coords.shape == (500, 2)

    def test_isotropic_gaussian(self, rng):
        """Test ratios near one half"""
        proj = pca_project(rng.normal(size=(10_000, 2)), 2)
        np.testing.assert_allclose(proj.explained_ratio, [0.5, 0.5], atol=0.05)

    def test_deterministic_signs(self, rng):
        """Test projecting twice"""
        x = rng.normal(size=(200, 5)) @ rng.normal(size=(5, 5))
        a, b = pca_project(x, 3), pca_project(x, 3)
        np.testing.assert_array_equal(a.coords, b.coords)
        for comp in a.components:
            assert comp[np.argmax(np.abs(comp))] > 0

    def test_matches_eigendecomposition(self, rng):
        """Test against numpy eigh"""
        x = rng.normal(size=(400, 4)) * np.array([5.0, 3.0, 1.0, 0.5])
        pca = PowerIterationPCA(n_components=2).fit(x)
        cov = np.cov(x, rowvar=False)
        vals, vecs = np.linalg.eigh(cov)
        for i in range(2):
            ref = vecs[:, -1 - i]
            assert abs(np.dot(ref, pca.components[i])) == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(pca.explained_ratio, vals[::-1][:2] / vals.sum(), rtol=1e-6)

    def test_variance_not_increased(self, rng):
        """Test projection is a contraction"""
        x = rng.normal(size=(300, 6))
        proj = pca_project(x, 3)
        assert proj.coords.var(axis=0, ddof=1).sum() <= np.trace(np.cov(x, rowvar=False)) + 1e-9

    def test_zero_variance(self):
        with pytest.raises(ValueError):
            pca_project(np.ones((10, 3)), 2)

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            pca_project(np.ones((1, 3)), 2)


class TestSilhouette:
    """Test the silhouette score"""

    def test_separated_clusters(self, rng):
        x = np.vstack([rng.normal(0, 0.1, (50, 2)), rng.normal(100, 0.1, (50, 2))])
        y = np.array([0] * 50 + [1] * 50)
        assert silhouette(x, y) > 0.9

    def test_overlapping_clusters(self, rng):
        x = rng.normal(size=(1000, 2))
        y = rng.integers(0, 2, size=1000)
        assert abs(silhouette(x, y)) < 0.1

    def test_matches_textbook_formula(self, rng):
        """Test 30 points against the O(n^2) formula"""
        x = rng.normal(size=(30, 3))
        y = np.array([0] * 12 + [1] * 18)
        d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
        scores = []
        for i in range(30):
            same = (y == y[i]) & (np.arange(30) != i)
            a = d[i, same].mean()
            b = d[i, y != y[i]].mean()
            scores.append((b - a) / max(a, b))
        assert silhouette(x, y) == pytest.approx(np.mean(scores), abs=1e-9)
        assert silhouette(x, y) == pytest.approx(silhouette_score(x, y), abs=1e-9)

    def test_singleton_scores_zero(self):
        x = np.array([[0.0], [0.1], [5.0]])
        y = np.array([0, 0, 1])
        a0, b0 = 0.1, 5.0
        a1, b1 = 0.1, 4.9
        expected = ((b0 - a0) / b0 + (b1 - a1) / b1 + 0.0) / 3
        assert silhouette(x, y) == pytest.approx(expected)

    def test_single_cluster(self):
        with pytest.raises(SingleClassError):
            silhouette(np.zeros((4, 2)), [1, 1, 1, 1])
