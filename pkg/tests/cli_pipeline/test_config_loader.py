"""
Tests for experiment configuration
"""

import pytest
from pydantic import ValidationError

from src.cli_pipeline import ExperimentConfig, OversampleMethod, dump_config, load_config, read_config_file
from src.common.errors import ConfigError
from src.common.settings import Settings


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text("seed: 3\nmethod: smote\ncounts: [50, 75]\noutput_dir: from-file\n")
    return path


class TestLoadConfig:
    """Test precedence and validation"""

    def test_defaults(self):
        cfg = load_config(settings=Settings())
        assert cfg.method == OversampleMethod.NONE
        assert cfg.counts == [50, 75, 100]
        assert cfg.train_ratio == 0.7

    def test_file_values(self, config_file):
        cfg = load_config(config_file, settings=Settings())
        assert cfg.seed == 3 and cfg.method == OversampleMethod.SMOTE and cfg.counts == [50, 75]

    def test_env_beats_file(self, config_file):
        cfg = load_config(config_file, settings=Settings(output_dir="from-env"))
        assert cfg.output_dir == "from-env"

    def test_flags_beat_env_and_file(self, config_file):
        cfg = load_config(
            config_file, {"seed": 9, "output_dir": "from-flag", "method": None}, Settings(output_dir="from-env")
        )
        assert cfg.seed == 9 and cfg.output_dir == "from-flag"
        assert cfg.method == OversampleMethod.SMOTE

    def test_env_read_from_process(self, monkeypatch):
        monkeypatch.setenv("LATENTGUARD_OUTPUT_DIR", "env-dir")
        assert load_config().output_dir == "env-dir"

    def test_unknown_file_key(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("sed: 3\n")
        with pytest.raises(ConfigError, match="sed"):
            load_config(path, settings=Settings())

    def test_unknown_flag(self):
        with pytest.raises(ConfigError):
            load_config(overrides={"colour": "red"}, settings=Settings())

    def test_nested_value_rejected(self, tmp_path):
        path = tmp_path / "nested.yaml"
        path.write_text("method:\n  name: smote\n")
        with pytest.raises(ConfigError):
            read_config_file(path)

    def test_invalid_value(self):
        with pytest.raises(ConfigError):
            load_config(overrides={"counts": [0, 50]}, settings=Settings())

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.yaml", settings=Settings())

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert read_config_file(path) == {}

    def test_dump_round_trip(self, tmp_path):
        cfg = ExperimentConfig(method="vaegan-cpac", counts=[5], no_penalties=True, seed=4)
        loaded = load_config(dump_config(cfg, tmp_path / "c.yaml"), settings=Settings())
        assert loaded == cfg


class TestExperimentConfig:
    """Test model invariants"""

    @pytest.mark.parametrize("flag", ["no_attention", "no_prototypes", "no_penalties"])
    def test_ablation_needs_cpac(self, flag):
        with pytest.raises(ValidationError):
            ExperimentConfig(method="smote", **{flag: True})
        ExperimentConfig(method="vaegan-cpac", **{flag: True})
        ExperimentConfig(method="smote", classifiers=["cpac"], **{flag: True})

    def test_no_head_needs_head_method(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(method="vaegan", no_head=True)
        ExperimentConfig(method="vaegan-mlp2", no_head=True)

    def test_grid_counts(self):
        assert ExperimentConfig(method="none").grid_counts == [0]
        assert ExperimentConfig(method="smote", counts=[50, 75, 100]).grid_counts == [50, 75, 100]

    def test_method_properties(self):
        assert OversampleMethod("vaegan-cpac").head_kind == "cpac"
        assert OversampleMethod("vaegan").head_kind is None
        assert OversampleMethod("vaegan-mlp3").uses_vaegan
        assert not OversampleMethod("smote").uses_vaegan

    def test_echo_is_plain_json(self):
        doc = ExperimentConfig(method="vaegan-mlp1", classifiers=["logreg", "cpac"]).echo()
        assert doc["method"] == "vaegan-mlp1"
        assert doc["classifiers"] == ["logreg", "cpac"]
        assert doc["loss_mode"] == "focal"
        assert doc["head_loss_mode"] == "bce"
