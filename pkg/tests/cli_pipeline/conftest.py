"""
Shared fixtures for pipeline tests
"""

import logging

import pytest

from src.cli_pipeline import ExperimentConfig


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("LATENTGUARD_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("LATENTGUARD_LOG_LEVEL", raising=False)


@pytest.fixture
def make_config(tmp_path):
    """Desk-scale config factory: 2,000 rows, 6 features, 2% fraud"""
    def factory(**overrides) -> ExperimentConfig:
        values = dict(
            synthetic_rows=2000,
            synthetic_features=6,
            synthetic_shifted=3,
            synthetic_minority_fraction=0.02,
            counts=[10, 20],
            vaegan_epochs=2,
            vaegan_batch_size=128,
            clf_epochs=2,
            logreg_epochs=50,
            output_dir=str(tmp_path / "run"),
            seed=3,
        )
        values.update(overrides)
        return ExperimentConfig(**values)
    return factory


@pytest.fixture(autouse=True)
def restore_root_logging():
    """main() installs its own root handler; put pytest's back afterwards"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
