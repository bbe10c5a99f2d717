"""
Pipeline Service
Seeded end-to-end experiments: ingest, split, oversample, classify, evaluate, export
"""

import json
import logging
import os
import shutil
import tempfile
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..classifier_heads.logreg import LogisticRegressionClassifier
from ..classifier_heads.mlp_heads import MlpHead
from ..classifier_heads.models import LogRegConfig, MlpHeadConfig
from ..common.errors import ConfigError, NotFittedError, PipelineStageError, SingleClassError
from ..cpac_head.cpac import CpacModel
from ..cpac_head.models import CpacConfig, CpacTrainConfig
from ..cpac_head.trainer import train_standalone
from ..data_ingest.csv_parser import parse_csv
from ..data_ingest.models import LABEL_COLUMN
from ..data_ingest.normalizer import RobustNormalizer
from ..data_ingest.splitter import stratified_split
from ..data_ingest.synthetic import make_synthetic_transactions
from ..eval_metrics.metrics import evaluate, silhouette
from ..eval_metrics.models import MetricsReport, ThresholdFit
from ..eval_metrics.projection import pca_project
from ..eval_metrics.threshold_agent import ThresholdAgent
from ..neural_core.models import LossMode
from ..neural_core.heads import ClassificationHead
from ..smote_sampler.smote_service import SmoteSampler
from ..vaegan_core.models import GenerativeScope, VaeGanConfig
from ..vaegan_core.trainer import train_joint, train_minority_oversampler
from ..vaegan_core.vaegan_model import VaeGanModel
from .checkpoint_service import load_checkpoint, save_checkpoint
from .config_loader import dump_config
from .models import (
    CellResult,
    ClassifierKind,
    ExperimentConfig,
    OversampleMethod,
    PreparedData,
    PretrainMethod,
    RunReport,
    ThresholdMode,
)

logger = logging.getLogger(__name__)

OVERSAMPLER_DIR = "oversampler"
CLASSIFIER_DIR = "classifiers"
VAEGAN_FILE = "vaegan.json"
HEAD_FILE = "head.json"
SPLIT_FILE = "split.json"
NORMALIZER_FILE = "normalizer.json"
CONFIG_FILE = "config.yaml"
REPORT_JSON = "report.json"
REPORT_MD = "report.md"

Classifier = Union[LogisticRegressionClassifier, CpacModel, MlpHead]


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag any failure inside the block with the stage name"""
    logger.info("Stage %s", name)
    try:
        yield
    except PipelineStageError:
        raise
    except Exception as e:
        logger.error("Stage %s failed: %s: %s", name, type(e).__name__, e)
        raise PipelineStageError(name, e) from e


def sampling_seed(cfg: ExperimentConfig, count: int) -> int:
    """Seed for drawing `count` synthetic rows; counts share one oversampler"""
    return cfg.seed + count


# ---------------------------------------------------------------------- data


def load_dataset(cfg: ExperimentConfig):
    if cfg.data_path:
        return parse_csv(cfg.data_path, drop_time=cfg.drop_time)
    dataset = make_synthetic_transactions(
        n_rows=cfg.synthetic_rows,
        n_features=cfg.synthetic_features,
        minority_fraction=cfg.synthetic_minority_fraction,
        separation=cfg.synthetic_separation,
        n_shifted=cfg.synthetic_shifted,
        seed=cfg.seed,
    )
    if cfg.drop_time and "Time" in dataset.column_names:
        dataset = dataset.drop_columns(["Time"])
    return dataset


def prepare_data(cfg: ExperimentConfig) -> PreparedData:
    """
    Ingest, split and normalize

    The normalizer is fitted on training rows only; validation rows are
    transformed with the training statistics.
    """
    with stage("ingest"):
        dataset = load_dataset(cfg)
    with stage("split"):
        split = stratified_split(dataset, cfg.train_ratio, cfg.seed)
        train_labels = dataset.labels[split.train_idx]
        for c, name in ((0, "normal"), (1, "fraud")):
            if not np.any(train_labels == c):
                raise SingleClassError(
                    f"training split holds no {name} rows ({int(np.sum(dataset.labels == c))} in the data, "
                    f"train_ratio {cfg.train_ratio})"
                )
    with stage("normalize"):
        train_raw = dataset.features[split.train_idx]
        normalizer = RobustNormalizer().fit(train_raw, dataset.column_names)
        data = PreparedData(
            dataset=dataset,
            split=split,
            normalizer=normalizer,
            train_x=normalizer.transform(train_raw),
            train_y=dataset.labels[split.train_idx],
            val_x=normalizer.transform(dataset.features[split.val_idx]),
            val_y=dataset.labels[split.val_idx],
        )
    logger.info(
        "Prepared %d train rows (%d fraud) and %d validation rows (%d fraud)",
        data.train_y.size, int(data.train_y.sum()), data.val_y.size, int(data.val_y.sum()),
    )
    return data


def save_prepared(cfg: ExperimentConfig, data: PreparedData, directory: Optional[Path] = None) -> Dict[str, str]:
    """Write split, normalizer and config into the output directory"""
    directory = Path(directory or cfg.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    data.split.save(directory / SPLIT_FILE)
    data.normalizer.save(directory / NORMALIZER_FILE)
    dump_config(cfg, directory / CONFIG_FILE)
    return {"split": SPLIT_FILE, "normalizer": NORMALIZER_FILE, "config": CONFIG_FILE}


# --------------------------------------------------------------- oversampler


class Oversampler:
    """
    Trained source of synthetic fraud rows in normalized feature space

    Wraps SMOTE, a minority-only VAE-GAN, or a VAE-GAN trained jointly with a
    latent head. Method "none" can only produce zero rows.
    """

    def __init__(
        self,
        method: OversampleMethod,
        n_features: int,
        smote: Optional[SmoteSampler] = None,
        vaegan: Optional[VaeGanModel] = None,
        head: Optional[ClassificationHead] = None,
    ):
        self.method = method
        self.n_features = n_features
        self.smote = smote
        self.vaegan = vaegan
        self.head = head

    @property
    def has_encoder(self) -> bool:
        return self.vaegan is not None

    def sample(self, n: int, seed: int) -> np.ndarray:
        if n == 0:
            return np.zeros((0, self.n_features))
        if self.smote is not None:
            return self.smote.sample(n, seed=seed)
        if self.vaegan is not None:
            return self.vaegan.sample_frauds(n, seed=seed)
        raise NotFittedError(f"method {self.method.value!r} has no oversampler")

    def encode(self, x: np.ndarray) -> np.ndarray:
        if self.vaegan is None:
            raise ConfigError(f"method {self.method.value!r} has no encoder")
        return self.vaegan.encode_mean(x)

    def save(self, directory: Path) -> Dict[str, str]:
        """Checkpoint trained networks; returns paths relative to directory"""
        written: Dict[str, str] = {}
        if self.vaegan is not None:
            rel = f"{OVERSAMPLER_DIR}/{VAEGAN_FILE}"
            save_checkpoint(self.vaegan, Path(directory) / rel, metadata={"method": self.method.value})
            written["vaegan"] = rel
        if self.head is not None:
            rel = f"{OVERSAMPLER_DIR}/{HEAD_FILE}"
            save_checkpoint(self.head, Path(directory) / rel)  # type: ignore[arg-type]
            written["head"] = rel
        return written


def _smote_sampler(cfg: ExperimentConfig, frauds: np.ndarray) -> SmoteSampler:
    k = min(cfg.smote_k, frauds.shape[0] - 1)
    if k < cfg.smote_k:
        logger.warning("Only %d fraud rows; SMOTE uses k=%d instead of %d", frauds.shape[0], k, cfg.smote_k)
    return SmoteSampler(k).fit(frauds)


def _vaegan_config(cfg: ExperimentConfig, input_dim: int, scope: Optional[GenerativeScope] = None) -> VaeGanConfig:
    return VaeGanConfig(
        input_dim=input_dim,
        latent_dim=cfg.latent_dim,
        epochs=cfg.vaegan_epochs,
        batch_size=cfg.vaegan_batch_size,
        learning_rate=cfg.vaegan_learning_rate,
        patience=cfg.vaegan_patience,
        generative_scope=scope or cfg.generative_scope,
        seed=cfg.seed,
    )


def _cpac_config(cfg: ExperimentConfig, input_dim: int, loss_mode: LossMode) -> CpacConfig:
    return CpacConfig(
        input_dim=input_dim,
        use_attention=not cfg.no_attention,
        use_prototypes=not cfg.no_prototypes,
        use_penalties=not cfg.no_penalties,
        loss_mode=loss_mode,
        focal=cfg.focal,
        seed=cfg.seed,
    )


def build_latent_head(cfg: ExperimentConfig) -> Optional[ClassificationHead]:
    """
    Head trained jointly with the VAE-GAN, or None

    Latent heads use head_loss_mode (BCE by default); loss_mode applies to
    the downstream classifiers.
    """
    kind = cfg.method.head_kind
    if kind is None or cfg.no_head:
        return None
    if kind == "cpac":
        return CpacModel(_cpac_config(cfg, cfg.latent_dim, cfg.head_loss_mode))
    variant = int(kind[-1])
    return MlpHead(
        MlpHeadConfig(
            variant=variant, input_dim=cfg.latent_dim, loss_mode=cfg.head_loss_mode, focal=cfg.focal, seed=cfg.seed
        )
    )


def pretrain_rows(cfg: ExperimentConfig, data: PreparedData) -> np.ndarray:
    """
    Extra fraud rows added to the VAE-GAN's training input

    SMOTE interpolates the training frauds; the VAE-GAN variant samples a
    headless minority-only VAE-GAN. Zero rows when pretrain_smote is 0 or the
    method does not train a VAE-GAN.
    """
    frauds = data.train_frauds
    if cfg.pretrain_smote == 0 or not cfg.method.uses_vaegan:
        if cfg.pretrain_smote:
            logger.warning("pretrain_smote=%d ignored for method %s", cfg.pretrain_smote, cfg.method.value)
        return np.zeros((0, data.n_features))
    if cfg.pretrain_method == PretrainMethod.SMOTE:
        rows = _smote_sampler(cfg, frauds).sample(cfg.pretrain_smote, seed=cfg.seed)
    else:
        model = VaeGanModel(_vaegan_config(cfg, data.n_features, GenerativeScope.MINORITY))
        train_minority_oversampler(model, frauds, data.val_frauds)
        rows = model.sample_frauds(cfg.pretrain_smote, seed=cfg.seed)
    logger.info("Pre-training augmentation: %d %s rows", rows.shape[0], cfg.pretrain_method.value)
    return rows


def train_oversampler(cfg: ExperimentConfig, data: PreparedData) -> Oversampler:
    """
    Train the configured oversampler on training rows only

    Validation rows are read for early stopping and never enter a training batch.
    """
    d = data.n_features
    if cfg.method == OversampleMethod.NONE:
        return Oversampler(cfg.method, d)
    if cfg.method == OversampleMethod.SMOTE:
        with stage("oversampler"):
            return Oversampler(cfg.method, d, smote=_smote_sampler(cfg, data.train_frauds))

    with stage("pretrain"):
        extra = pretrain_rows(cfg, data)
    with stage("oversampler"):
        model = VaeGanModel(_vaegan_config(cfg, d))
        if cfg.method == OversampleMethod.VAEGAN:
            train_minority_oversampler(model, np.vstack([data.train_frauds, extra]), data.val_frauds)
            return Oversampler(cfg.method, d, vaegan=model)
        head = build_latent_head(cfg)
        train_x = np.vstack([data.train_x, extra])
        train_y = np.concatenate([data.train_y, np.ones(extra.shape[0], dtype=np.int64)])
        train_joint(model, head, train_x, train_y, data.val_x, data.val_y)
        return Oversampler(cfg.method, d, vaegan=model, head=head)


def load_oversampler(cfg: ExperimentConfig, data: PreparedData, directory: Optional[Path] = None) -> Oversampler:
    """
    Rebuild the oversampler of a previous train-oversampler run

    SMOTE is refitted on the training frauds, which is deterministic.

    Raises:
        NotFittedError: no VAE-GAN checkpoint in the output directory
    """
    directory = Path(directory or cfg.output_dir)
    d = data.n_features
    if cfg.method == OversampleMethod.NONE:
        return Oversampler(cfg.method, d)
    if cfg.method == OversampleMethod.SMOTE:
        return Oversampler(cfg.method, d, smote=_smote_sampler(cfg, data.train_frauds))
    vaegan_path = directory / OVERSAMPLER_DIR / VAEGAN_FILE
    if not vaegan_path.exists():
        raise NotFittedError(f"no trained oversampler at {vaegan_path}; run train-oversampler first")
    head_path = directory / OVERSAMPLER_DIR / HEAD_FILE
    head = load_checkpoint(head_path) if head_path.exists() else None
    return Oversampler(cfg.method, d, vaegan=VaeGanModel.load(vaegan_path), head=head)  # type: ignore[arg-type]


def augment(data: PreparedData, synthetic: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Training rows plus synthetic frauds (validation rows are never augmented)"""
    x = np.vstack([data.train_x, synthetic])
    y = np.concatenate([data.train_y, np.ones(synthetic.shape[0], dtype=np.int64)])
    return x, y


# --------------------------------------------------------------- classifiers


def train_classifier(
    cfg: ExperimentConfig,
    kind: ClassifierKind,
    train_x: np.ndarray,
    train_y: np.ndarray,
    val_x: np.ndarray,
    val_y: np.ndarray,
) -> Classifier:
    kind = ClassifierKind(kind)
    d = train_x.shape[1]
    if kind == ClassifierKind.LOGREG:
        lr_cfg = LogRegConfig(
            epochs=cfg.logreg_epochs, learning_rate=cfg.logreg_learning_rate, l2=cfg.logreg_l2, seed=cfg.seed
        )
        return LogisticRegressionClassifier(lr_cfg).fit(train_x, train_y)

    head: Union[CpacModel, MlpHead]
    if kind == ClassifierKind.CPAC:
        head = CpacModel(_cpac_config(cfg, d, cfg.loss_mode))
    else:
        head = MlpHead(MlpHeadConfig(variant=int(kind.value[-1]), input_dim=d, seed=cfg.seed))
    train_cfg = CpacTrainConfig(
        loss_mode=cfg.loss_mode,
        focal=cfg.focal,
        epochs=cfg.clf_epochs,
        batch_size=cfg.clf_batch_size,
        learning_rate=cfg.clf_learning_rate,
        patience=cfg.clf_patience,
        threshold=cfg.threshold,
        seed=cfg.seed,
    )
    train_standalone(head, train_x, train_y, val_x, val_y, train_cfg)
    return head


def evaluate_classifier(
    cfg: ExperimentConfig, clf: Classifier, val_x: np.ndarray, val_y: np.ndarray
) -> Tuple[MetricsReport, Optional[ThresholdFit]]:
    """Metrics on validation rows at the fixed or agent-learned threshold"""
    probs = clf.predict_proba(val_x)
    fit = None
    threshold = cfg.threshold
    if cfg.threshold_mode == ThresholdMode.AGENT:
        fit = ThresholdAgent().fit(probs, val_y)
        threshold = fit.threshold
    return evaluate(val_y, probs, threshold), fit


def classifier_path(kind: ClassifierKind, count: int) -> str:
    return f"{CLASSIFIER_DIR}/{ClassifierKind(kind).value}_{count}.json"


def run_cell(
    cfg: ExperimentConfig,
    data: PreparedData,
    synthetic: np.ndarray,
    count: int,
    kind: ClassifierKind,
    directory: Optional[Path] = None,
) -> CellResult:
    """Train and evaluate one classifier on training rows plus `count` synthetic frauds"""
    x, y = augment(data, synthetic)
    clf = train_classifier(cfg, kind, x, y, data.val_x, data.val_y)
    metrics, fit = evaluate_classifier(cfg, clf, data.val_x, data.val_y)
    rel = None
    if directory is not None:
        rel = classifier_path(kind, count)
        save_checkpoint(clf, Path(directory) / rel, metadata={"count": count})
    logger.info(
        "Cell count=%d classifier=%s: P %.4f R %.4f F1 %.4f", count, kind.value,
        metrics.precision, metrics.recall, metrics.f1,
    )
    return CellResult(
        count=count,
        classifier=kind,
        metrics=metrics,
        threshold_best_f1=None if fit is None else fit.best_f1,
        checkpoint=rel,
    )


def latent_silhouette(cfg: ExperimentConfig, oversampler: Oversampler, data: PreparedData) -> Optional[float]:
    """Silhouette of validation latent means, subsampled to the VAE-GAN's silhouette_max_rows"""
    if not oversampler.has_encoder or np.unique(data.val_y).size < 2:
        return None
    mu, y = oversampler.encode(data.val_x), data.val_y
    limit = oversampler.vaegan.config.silhouette_max_rows  # type: ignore[union-attr]
    if limit and y.size > limit:
        idx = np.sort(np.random.default_rng(cfg.seed).choice(y.size, limit, replace=False))
        mu, y = mu[idx], y[idx]
        if np.unique(y).size < 2:
            return None
    return silhouette(mu, y)


# ------------------------------------------------------------------- runs


def _write_report(report: RunReport, directory: Path) -> None:
    doc = report.to_document()
    (directory / REPORT_JSON).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (directory / REPORT_MD).write_text(report.to_markdown(), encoding="utf-8")


def _run(cfg: ExperimentConfig, directory: Path) -> RunReport:
    data = prepare_data(cfg)
    with stage("checkpoint"):
        checkpoints = save_prepared(cfg, data, directory)

    oversampler = train_oversampler(cfg, data)
    with stage("checkpoint"):
        checkpoints.update(oversampler.save(directory))

    with stage("generate"):
        synthetic = {c: oversampler.sample(c, sampling_seed(cfg, c)) for c in cfg.grid_counts}

    with stage("classify"):
        grid = [(c, k) for c in cfg.grid_counts for k in cfg.classifiers]
        cells: List[CellResult] = Parallel(n_jobs=cfg.n_jobs)(
            delayed(run_cell)(cfg, data, synthetic[c], c, k, directory) for c, k in grid
        )

    report = RunReport(config=cfg.echo(), seed=cfg.seed, cells=cells, checkpoints=checkpoints)
    with stage("latent"):
        score = latent_silhouette(cfg, oversampler, data)
        if score is not None:
            report.silhouette["validation_latent"] = score
    if oversampler.vaegan is not None:
        report.oversampler_epochs = oversampler.vaegan.training_log.epochs_run
    return report


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """
    Run the full grid (counts x classifiers) and write report.json / report.md

    Outputs are built in a staging directory next to cfg.output_dir and
    moved into place only when every stage succeeded; a failed run leaves
    no partial output behind.

    Raises:
        PipelineStageError: a stage failed; carries the stage name and the cause
    """
    start = time.perf_counter()
    out = Path(cfg.output_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{out.name}-", dir=out.parent))
    logger.info(
        "Running %s with classifiers %s, counts %s, seed %d",
        cfg.method.value, [k.value for k in cfg.classifiers], cfg.grid_counts, cfg.seed,
    )
    try:
        report = _run(cfg, staging)
        report.wall_clock_seconds = time.perf_counter() - start
        with stage("report"):
            _write_report(report, staging)
            if out.exists():
                shutil.rmtree(out)
            os.replace(staging, out)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    logger.info("Run finished in %.1fs; report in %s", report.wall_clock_seconds, out / REPORT_JSON)
    return report


# ----------------------------------------------------------------- exports


def _frame(features: np.ndarray, columns: List[str], labels: np.ndarray, synthetic: np.ndarray) -> pd.DataFrame:
    frame = pd.DataFrame(features, columns=columns)
    frame[LABEL_COLUMN] = labels.astype(np.int64)
    frame["is_synthetic"] = synthetic.astype(np.int64)
    return frame


def export_augmented_csv(
    cfg: ExperimentConfig,
    count: int,
    path: Optional[Union[str, Path]] = None,
    data: Optional[PreparedData] = None,
    oversampler: Optional[Oversampler] = None,
) -> Path:
    """
    Training rows plus `count` synthetic frauds in raw units with an is_synthetic column

    Raises:
        NotFittedError: the oversampler has not been trained
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    data = data or prepare_data(cfg)
    oversampler = oversampler or load_oversampler(cfg, data)
    synthetic = data.normalizer.invert(oversampler.sample(count, sampling_seed(cfg, count)))

    train_raw = data.dataset.features[data.split.train_idx]
    features = np.vstack([train_raw, synthetic])
    labels = np.concatenate([data.train_y, np.ones(count, dtype=np.int64)])
    flags = np.concatenate([np.zeros(train_raw.shape[0]), np.ones(count)])

    path = Path(path or Path(cfg.output_dir) / f"augmented_{count}.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    _frame(features, data.dataset.column_names, labels, flags).to_csv(path, index=False, float_format="%.17g")
    logger.info("Wrote %d rows (%d synthetic) to %s", labels.size, count, path)
    return path


def _projection_frame(coords: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame(coords, columns=[f"pc{i + 1}" for i in range(coords.shape[1])])


def export_latent(
    cfg: ExperimentConfig,
    dims: int = 2,
    path: Optional[Union[str, Path]] = None,
    data: Optional[PreparedData] = None,
    oversampler: Optional[Oversampler] = None,
) -> Path:
    """
    PCA projection of validation latent means with labels

    Raises:
        ConfigError: the method has no encoder
    """
    if cfg.method.head_kind is None and cfg.method != OversampleMethod.VAEGAN:
        raise ConfigError(f"method {cfg.method.value!r} has no encoder")
    data = data or prepare_data(cfg)
    oversampler = oversampler or load_oversampler(cfg, data)
    projection = pca_project(oversampler.encode(data.val_x), dims)

    frame = _projection_frame(projection.coords)
    frame["label"] = data.val_y.astype(np.int64)
    path = Path(path or Path(cfg.output_dir) / f"latent_{dims}d.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info(
        "Wrote %d latent rows to %s (explained ratios %s)",
        len(frame), path, np.round(projection.explained_ratio, 4).tolist(),
    )
    return path


def export_oversample_projection(
    cfg: ExperimentConfig,
    count: int,
    dims: int = 2,
    path: Optional[Union[str, Path]] = None,
    data: Optional[PreparedData] = None,
    oversampler: Optional[Oversampler] = None,
) -> Path:
    """PCA projection of real training frauds next to `count` synthetic ones"""
    data = data or prepare_data(cfg)
    oversampler = oversampler or load_oversampler(cfg, data)
    real = data.train_frauds
    synthetic = oversampler.sample(count, sampling_seed(cfg, count))
    projection = pca_project(np.vstack([real, synthetic]), dims)

    frame = _projection_frame(projection.coords)
    frame["label"] = 1
    frame["is_synthetic"] = np.concatenate([np.zeros(real.shape[0]), np.ones(count)]).astype(np.int64)
    path = Path(path or Path(cfg.output_dir) / f"oversample_{count}_{dims}d.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
