"""
LatentGuard command line
Subcommands for every pipeline stage plus the full run and the gradient suite

Exit codes: 0 success, 2 configuration or usage error, 1 stage failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..common.errors import ConfigError, LatentGuardError, PipelineStageError
from ..common.logging_config import configure_logging
from ..common.settings import get_settings
from ..cpac_head.cpac import CpacModel
from .checkpoint_service import load_checkpoint, save_checkpoint
from .config_loader import load_config
from .grad_suite import PROBES, format_table, run_grad_suite
from .models import ClassifierKind, ExperimentConfig
from .pipeline_service import (
    HEAD_FILE,
    OVERSAMPLER_DIR,
    augment,
    classifier_path,
    evaluate_classifier,
    export_augmented_csv,
    export_latent,
    load_oversampler,
    prepare_data,
    run_experiment,
    sampling_seed,
    save_prepared,
    stage,
    train_classifier,
    train_oversampler,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="Flat YAML experiment file")
    p.add_argument("--data", dest="data_path", help="Transaction CSV (omit for the synthetic generator)")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--train-ratio", dest="train_ratio", type=float)
    p.add_argument("--drop-time", dest="drop_time", action="store_true", default=None)
    p.add_argument("--synthetic-rows", dest="synthetic_rows", type=int)
    p.add_argument("--method", choices=[
        "none", "smote", "vaegan", "vaegan-mlp1", "vaegan-mlp2", "vaegan-mlp3", "vaegan-cpac",
    ])
    p.add_argument("--pretrain-smote", dest="pretrain_smote", type=int)
    p.add_argument("--pretrain-method", dest="pretrain_method", choices=["smote", "vaegan"])
    p.add_argument("--scope", dest="generative_scope", choices=["minority", "all"])
    p.add_argument("--k", dest="smote_k", type=int, help="SMOTE neighbours")
    p.add_argument("--counts", type=_int_list)
    p.add_argument("--classifiers", type=_str_list)
    p.add_argument("--loss", "--loss-mode", dest="loss_mode", choices=["bce", "focal"])
    p.add_argument("--head-loss", dest="head_loss_mode", choices=["bce", "focal"])
    p.add_argument("--threshold-mode", dest="threshold_mode", choices=["fixed", "agent"])
    p.add_argument("--latent-dim", dest="latent_dim", type=int)
    p.add_argument("--vaegan-epochs", dest="vaegan_epochs", type=int)
    p.add_argument("--clf-epochs", dest="clf_epochs", type=int)
    p.add_argument("--n-jobs", dest="n_jobs", type=int)
    for flag in ("no-head", "no-attention", "no-prototypes", "no-penalties"):
        p.add_argument(f"--{flag}", dest=flag.replace("-", "_"), action="store_true", default=None)
    p.add_argument("--log-level", dest="log_level")


CONFIG_KEYS = (
    "data_path", "output_dir", "seed", "train_ratio", "drop_time", "synthetic_rows", "method",
    "pretrain_smote", "pretrain_method", "generative_scope", "smote_k", "counts", "classifiers", "loss_mode",
    "head_loss_mode", "threshold_mode", "latent_dim", "vaegan_epochs", "clf_epochs", "n_jobs", "no_head",
    "no_attention", "no_prototypes", "no_penalties",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latentguard", description="Latent-space fraud oversampling experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _add_config_flags(p)
        return p

    add("prep", "Ingest, split and normalize; writes split.json and normalizer.json")
    add("train-oversampler", "Train the configured oversampler")
    add("oversample", "Training rows plus N synthetic frauds as CSV").add_argument("--count", type=int, required=True)
    for name, help_text in (("train-clf", "Train one classifier"), ("eval", "Evaluate a trained classifier")):
        p = add(name, help_text)
        p.add_argument("--count", type=int, default=0)
        p.add_argument(
            "--model", "--classifier", dest="classifier", choices=[k.value for k in ClassifierKind], default="logreg"
        )
    add("export-latent", "PCA projection of validation latents").add_argument("--dims", type=int, choices=[2, 3], default=2)
    add("export-augmented", "Training rows plus synthetic frauds as CSV").add_argument("--count", type=int, required=True)
    add("run", "Full grid over counts and classifiers")
    p = add("grad-check", "Developer gradient-check suite")
    p.add_argument("--probes", type=_str_list, help=f"Subset of: {', '.join(PROBES)}")
    p = add("explain", "Explain one validation row with a CPAC checkpoint")
    p.add_argument("--row-index", "--row", dest="row", type=int, required=True)
    p.add_argument(
        "--model-file", "--checkpoint", dest="checkpoint", help="CPAC checkpoint (default: the oversampler's latent head)"
    )
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides: Dict[str, Any] = {k: getattr(args, k, None) for k in CONFIG_KEYS}
    return load_config(args.config, overrides)


def _print_json(doc: Any) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


# ------------------------------------------------------------------ commands


def cmd_prep(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    data = prepare_data(cfg)
    written = save_prepared(cfg, data)
    _print_json({
        "train_rows": int(data.train_y.size), "train_frauds": int(data.train_y.sum()),
        "val_rows": int(data.val_y.size), "val_frauds": int(data.val_y.sum()), "files": written,
    })
    return EXIT_OK


def cmd_train_oversampler(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    data = prepare_data(cfg)
    written = save_prepared(cfg, data)
    oversampler = train_oversampler(cfg, data)
    with stage("checkpoint"):
        written.update(oversampler.save(Path(cfg.output_dir)))
    _print_json(written)
    return EXIT_OK


def cmd_oversample(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    print(export_augmented_csv(cfg, args.count))
    return EXIT_OK


def cmd_train_clf(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    data = prepare_data(cfg)
    synthetic = load_oversampler(cfg, data).sample(args.count, sampling_seed(cfg, args.count))
    x, y = augment(data, synthetic)
    clf = train_classifier(cfg, ClassifierKind(args.classifier), x, y, data.val_x, data.val_y)
    path = Path(cfg.output_dir) / classifier_path(args.classifier, args.count)
    save_checkpoint(clf, path, metadata={"count": args.count})
    print(path)
    return EXIT_OK


def cmd_eval(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    data = prepare_data(cfg)
    clf = load_checkpoint(Path(cfg.output_dir) / classifier_path(args.classifier, args.count))
    metrics, fit = evaluate_classifier(cfg, clf, data.val_x, data.val_y)  # type: ignore[arg-type]
    doc = json.loads(metrics.json())
    if fit is not None:
        doc["threshold_best_f1"] = fit.best_f1
    _print_json(doc)
    return EXIT_OK


def cmd_export_latent(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    print(export_latent(cfg, args.dims))
    return EXIT_OK


def cmd_export_augmented(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    print(export_augmented_csv(cfg, args.count))
    return EXIT_OK


def cmd_run(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    print(run_experiment(cfg).to_markdown(), end="")
    return EXIT_OK


def cmd_grad_check(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    try:
        reports = run_grad_suite(cfg.seed, args.probes)
    except KeyError as e:
        raise ConfigError(str(e.args[0])) from e
    print(format_table(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILURE


def cmd_explain(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    data = prepare_data(cfg)
    path = Path(args.checkpoint) if args.checkpoint else Path(cfg.output_dir) / OVERSAMPLER_DIR / HEAD_FILE
    model = load_checkpoint(path)
    if not isinstance(model, CpacModel):
        raise ConfigError(f"{path} is not a CPAC checkpoint")
    if not 0 <= args.row < data.val_y.size:
        raise ConfigError(f"row must lie in [0, {data.val_y.size})")
    row = data.val_x[args.row]
    if model.input_dim != data.n_features:
        row = load_oversampler(cfg, data).encode(row[None, :])[0]
    doc = json.loads(model.explain(np.asarray(row)).json())
    doc.update({"row": args.row, "label": int(data.val_y[args.row])})
    _print_json(doc)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[ExperimentConfig, argparse.Namespace], int]] = {
    "prep": cmd_prep,
    "train-oversampler": cmd_train_oversampler,
    "oversample": cmd_oversample,
    "train-clf": cmd_train_clf,
    "eval": cmd_eval,
    "export-latent": cmd_export_latent,
    "export-augmented": cmd_export_augmented,
    "run": cmd_run,
    "grad-check": cmd_grad_check,
    "explain": cmd_explain,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    configure_logging(args.log_level or get_settings().log_level)
    try:
        cfg = config_from_args(args)
        with stage(args.command):
            return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        print(f"latentguard: config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineStageError as e:
        if isinstance(e.cause, ConfigError):
            print(f"latentguard: config error: {e.cause}", file=sys.stderr)
            return EXIT_USAGE
        print(f"latentguard: stage {e.stage} failed: {type(e.cause).__name__}: {e.cause}", file=sys.stderr)
        return EXIT_FAILURE
    except LatentGuardError as e:
        print(f"latentguard: {e}", file=sys.stderr)
        return EXIT_FAILURE
