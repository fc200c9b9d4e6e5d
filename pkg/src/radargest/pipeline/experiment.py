"""Training runs on a dataset, and the distance and scale sweeps built from them."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..cnn import checkpoint
from ..cnn.network import PROFILES, ModelState, predict
from ..cnn.optim import TrainConfig, train
from ..errors import ParameterError
from ..synth import GestureClass
from .dataset import Dataset, build_dataset
from .metrics import Metrics, confusion_csv, confusion_matrix

log = logging.getLogger(__name__)

THRESHOLD = 0.9
CLASS_NAMES = [g.name.lower() for g in GestureClass]


@dataclass
class ExperimentResult:
    metrics: Metrics
    state: ModelState
    profile: str


def network_for(dataset: Dataset, profile: str):
    if profile not in PROFILES:
        raise ParameterError(f"profile must be one of {sorted(PROFILES)}")
    return PROFILES[profile](input_shape=dataset.input_shape)


def run_experiment(
    dataset: Dataset,
    profile: str = "desk",
    config: TrainConfig | None = None,
    out_dir=None,
    plots: bool = True,
) -> ExperimentResult:
    """Train on the dataset's training split, validating on its test split.

    With ``out_dir`` set, writes metrics.csv, confusion.csv, checkpoint.gmc
    and (unless ``plots`` is false) learning_curves.png.
    """
    config = config or TrainConfig()
    if dataset.train_index is None:
        dataset.assign_split(dataset.config.train_fraction, dataset.config.seed)
    spec = network_for(dataset, profile)
    x_train, y_train = dataset.train_arrays()
    x_test, y_test = dataset.test_arrays()
    result = train(x_train, y_train, spec, config, x_test, y_test)
    pred, _ = predict(result.state, x_test)
    metrics = Metrics(
        history=result.history,
        confusion=confusion_matrix(y_test, pred, spec.n_classes),
        best_epoch=result.best_epoch,
        stop_reason=result.stop_reason,
        single_class_validation=result.single_class_validation,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.csv").write_text(metrics.to_csv())
        (out / "confusion.csv").write_text(confusion_csv(metrics.confusion, CLASS_NAMES))
        extra = {
            "profile": profile,
            "normalization": dataset.normalization,
            "train_config": config.to_dict(),
            "best_epoch": result.best_epoch,
            "stop_reason": result.stop_reason,
        }
        checkpoint.save(out / "checkpoint.gmc", result.state, extra)
        if plots:
            from .plots import learning_curves

            learning_curves(metrics.history, out / "learning_curves.png", f"{profile} profile")
    return ExperimentResult(metrics, result.state, profile)


def censored_epochs(metrics: Metrics, config: TrainConfig, theta: float = THRESHOLD) -> int:
    """epochs_to_threshold, counting a run that never gets there as max_epochs + 1."""
    e = metrics.epochs_to_threshold(theta)
    return config.max_epochs + 1 if e is None else e


SWEEP_COLUMNS = ("value", "epochs_mean", "epochs_std", "accuracy_mean", "accuracy_std", "n_seeds")


def sweep(
    axis: str,
    values,
    fixed: float = 0.2,
    seeds=(0, 1, 2, 3, 4),
    per_class: int = 50,
    snr_db: float = 30.0,
    tf_method: str = "stft",
    input_dims=(64, 64),
    profile: str = "desk",
    config: TrainConfig | None = None,
    classes=None,
) -> list[dict]:
    """One row per swept value: mean and std over seeds of epochs to 0.9 and final accuracy.

    Every seed builds its own dataset (same seed for data and training), so
    rows that repeat a value are independent replicates.
    """
    if axis not in ("distance", "scale"):
        raise ParameterError("axis must be 'distance' or 'scale'")
    values = [float(v) for v in values]
    seeds = [int(s) for s in seeds]
    if not values or not seeds:
        raise ParameterError("a sweep needs at least one value and one seed")
    base = config or TrainConfig()
    rows = []
    for v in values:
        epochs, accs = [], []
        for s in seeds:
            d, r = (v, fixed) if axis == "distance" else (fixed, v)
            ds = build_dataset(per_class, [d], [r], snr_db, tf_method, input_dims, seed=s, classes=classes)
            cfg = replace(base, seed=s)
            res = run_experiment(ds, profile, cfg)
            epochs.append(censored_epochs(res.metrics, cfg))
            accs.append(res.metrics.final_accuracy)
            log.info("%s=%g seed=%d epochs=%d acc=%.3f", axis, v, s, epochs[-1], accs[-1])
        rows.append(
            {
                "value": v,
                "epochs_mean": float(np.mean(epochs)),
                "epochs_std": float(np.std(epochs)),
                "accuracy_mean": float(np.mean(accs)),
                "accuracy_std": float(np.std(accs)),
                "n_seeds": len(seeds),
                "epochs": epochs,
                "accuracies": accs,
            }
        )
    return rows


def sweep_distance(distances, scale: float = 0.2, seeds=(0, 1, 2, 3, 4), **kw) -> list[dict]:
    return sweep("distance", distances, scale, seeds, **kw)


def sweep_scale(scales, distance: float = 0.2, seeds=(0, 1, 2, 3, 4), **kw) -> list[dict]:
    return sweep("scale", scales, distance, seeds, **kw)


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r[c] for c in SWEEP_COLUMNS])
    return buf.getvalue()
