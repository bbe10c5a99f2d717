"""
Tests for the command line
"""

import json

import pandas as pd
import pytest

from src.cli_pipeline import main
from src.cli_pipeline.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, config_from_args
from src.neural_core import LossMode
from src.vaegan_core import GenerativeScope

FAST = [
    "--synthetic-rows", "2000", "--seed", "3", "--vaegan-epochs", "2", "--clf-epochs", "2",
]


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "synthetic_features: 6\nsynthetic_shifted: 3\nsynthetic_minority_fraction: 0.02\n"
        "logreg_epochs: 50\nvaegan_batch_size: 128\ncounts: [10, 20]\n"
    )
    return path


def _args(command, config_file, out, *extra):
    return [command, "--config", str(config_file), "--output-dir", str(out), *FAST, *extra]


class TestParser:
    """Test argument parsing"""

    def test_subcommands(self):
        parser = build_parser()
        for command in ("prep", "train-oversampler", "run", "grad-check", "export-latent"):
            assert parser.parse_args([command]).command == command

    def test_list_flags(self):
        args = build_parser().parse_args(["run", "--counts", "50,75", "--classifiers", "logreg,cpac"])
        assert args.counts == [50, 75]
        assert args.classifiers == ["logreg", "cpac"]

    def test_ablation_flags_default_none(self):
        args = build_parser().parse_args(["run"])
        assert args.no_attention is None and args.drop_time is None

    def test_scope_and_k(self):
        args = build_parser().parse_args(
            ["train-oversampler", "--method", "vaegan-cpac", "--pretrain-smote", "75", "--scope", "all"]
        )
        assert args.generative_scope == "all" and args.pretrain_smote == 75
        args = build_parser().parse_args(["oversample", "--method", "smote", "--count", "9", "--k", "3", "--seed", "4"])
        assert (args.smote_k, args.count, args.seed) == (3, 9, 4)

    def test_bad_scope(self):
        assert main(["train-oversampler", "--scope", "fraud"]) == EXIT_USAGE

    def test_train_clf_model_and_loss(self):
        args = build_parser().parse_args(["train-clf", "--model", "cpac", "--loss", "focal"])
        assert args.classifier == "cpac" and args.loss_mode == "focal"
        args = build_parser().parse_args(["train-clf", "--classifier", "mlp3", "--loss-mode", "bce"])
        assert args.classifier == "mlp3" and args.loss_mode == "bce"

    def test_explain_flags(self):
        args = build_parser().parse_args(["explain", "--model-file", "head.json", "--row-index", "7"])
        assert args.checkpoint == "head.json" and args.row == 7

    def test_flags_reach_config(self):
        args = build_parser().parse_args(
            ["run", "--method", "vaegan-mlp2", "--scope", "all", "--k", "4", "--head-loss", "focal"]
        )
        cfg = config_from_args(args)
        assert cfg.generative_scope == GenerativeScope.ALL
        assert cfg.smote_k == 4
        assert cfg.head_loss_mode == LossMode.FOCAL


class TestExitCodes:
    """Test 0 / 2 / 1"""

    def test_usage_error(self):
        assert main(["run", "--method", "forest"]) == EXIT_USAGE

    def test_missing_subcommand(self):
        assert main([]) == EXIT_USAGE

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK

    def test_invalid_config(self, tmp_path, capsys):
        code = main(["run", "--method", "smote", "--no-attention", "--output-dir", str(tmp_path / "o")])
        assert code == EXIT_USAGE
        assert "config error" in capsys.readouterr().err

    def test_stage_failure(self, tmp_path, capsys):
        code = main(["run", "--data", str(tmp_path / "absent.csv"), "--output-dir", str(tmp_path / "o")])
        assert code == EXIT_FAILURE
        assert "stage ingest failed" in capsys.readouterr().err

    def test_untrained_oversampler(self, tmp_path, config_file, capsys):
        code = main(_args("export-augmented", config_file, tmp_path / "o", "--method", "vaegan", "--count", "5"))
        assert code == EXIT_FAILURE
        assert "NotFittedError" in capsys.readouterr().err

    def test_grad_check(self, capsys):
        assert main(["grad-check", "--probes", "dense,kl,cpac"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "cpac" in out and "FAIL" not in out

    def test_grad_check_unknown_probe(self):
        assert main(["grad-check", "--probes", "conv"]) == EXIT_USAGE


class TestWorkflow:
    """Test the stage-by-stage subcommands"""

    def test_run(self, tmp_path, config_file, capsys):
        out = tmp_path / "o"
        assert main(_args("run", config_file, out, "--method", "smote")) == EXIT_OK
        assert "| 10 | logreg |" in capsys.readouterr().out
        assert len(json.loads((out / "report.json").read_text())["cells"]) == 2

    def test_prep(self, tmp_path, config_file, capsys):
        out = tmp_path / "o"
        assert main(_args("prep", config_file, out)) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["train_frauds"] == 28 and summary["val_frauds"] == 12
        assert (out / "split.json").exists() and (out / "normalizer.json").exists()

    def test_smote_stages(self, tmp_path, config_file, capsys):
        out = tmp_path / "o"
        common = ("--method", "smote")
        assert main(_args("train-oversampler", config_file, out, *common)) == EXIT_OK
        assert main(_args("oversample", config_file, out, *common, "--count", "15", "--k", "3")) == EXIT_OK
        augmented = pd.read_csv(out / "augmented_15.csv")
        synthetic = augmented[augmented["is_synthetic"] == 1]
        assert len(synthetic) == 15 and (synthetic["Class"] == 1).all()
        assert len(augmented) == 15 + 1400

        assert main(_args("train-clf", config_file, out, *common, "--count", "15", "--model", "mlp1",
                          "--loss", "bce")) == EXIT_OK
        assert (out / "classifiers" / "mlp1_15.json").exists()
        capsys.readouterr()
        assert main(_args("eval", config_file, out, *common, "--count", "15", "--classifier", "mlp1",
                          "--threshold-mode", "agent")) == EXIT_OK
        metrics = json.loads(capsys.readouterr().out)
        assert 0.0 < metrics["threshold"] < 1.0
        assert "threshold_best_f1" in metrics

        assert main(_args("export-augmented", config_file, out, *common, "--count", "15")) == EXIT_OK
        assert pd.read_csv(out / "augmented_15.csv")["is_synthetic"].sum() == 15

    def test_cpac_latent_stages(self, tmp_path, config_file, capsys):
        out = tmp_path / "o"
        common = ("--method", "vaegan-cpac")
        assert main(_args("train-oversampler", config_file, out, *common)) == EXIT_OK
        assert (out / "oversampler" / "vaegan.json").exists()
        assert (out / "oversampler" / "head.json").exists()

        assert main(_args("export-latent", config_file, out, *common, "--dims", "3")) == EXIT_OK
        assert list(pd.read_csv(out / "latent_3d.csv").columns) == ["pc1", "pc2", "pc3", "label"]

        capsys.readouterr()
        assert main(_args("explain", config_file, out, *common, "--row-index", "4")) == EXIT_OK
        record = json.loads(capsys.readouterr().out)
        assert record["row"] == 4
        assert len(record["attention"]) == 2
        assert 0.0 <= record["prob"] <= 1.0

    def test_explain_row_out_of_range(self, tmp_path, config_file):
        out = tmp_path / "o"
        assert main(_args("train-oversampler", config_file, out, "--method", "vaegan-cpac")) == EXIT_OK
        assert main(_args("explain", config_file, out, "--method", "vaegan-cpac", "--row", "100000")) == EXIT_USAGE
