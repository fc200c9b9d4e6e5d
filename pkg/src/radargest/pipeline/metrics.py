"""Per-epoch learning curves, confusion matrices and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ..cnn.optim import EpochRecord

CSV_COLUMNS = ("epoch", "lr", "train_loss", "train_acc", "test_loss", "test_acc")


def confusion_matrix(y_true, y_pred, n_classes: int = 4) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    cm = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(cm, (np.asarray(y_true, int), np.asarray(y_pred, int)), 1)
    return cm


@dataclass
class Metrics:
    history: list  # EpochRecord per epoch run
    confusion: np.ndarray  # of the selected (best) state on the test split
    best_epoch: int
    stop_reason: str
    single_class_validation: bool = False

    @property
    def final_accuracy(self) -> float:
        """Test accuracy of the selected state."""
        total = self.confusion.sum()
        return float(np.trace(self.confusion) / total) if total else 0.0

    def epochs_to_threshold(self, theta: float = 0.9):
        """First epoch whose test accuracy reaches ``theta``, or None."""
        for rec in self.history:
            if rec.test_acc >= theta:
                return rec.epoch
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in self.history:
            w.writerow([rec.epoch] + [repr(float(getattr(rec, c))) for c in CSV_COLUMNS[1:]])
        return buf.getvalue()


def read_metrics_csv(text: str) -> list[EpochRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"unexpected metrics header {rows[0]}")
    return [EpochRecord(int(r[0]), *(float(v) for v in r[1:])) for r in rows[1:]]


def confusion_csv(cm: np.ndarray, names) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["true\\pred"] + list(names))
    for name, row in zip(names, cm):
        w.writerow([name] + [int(v) for v in row])
    return buf.getvalue()
