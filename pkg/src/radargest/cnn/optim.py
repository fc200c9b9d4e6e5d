"""Momentum SGD with coupled weight decay, plateau learning-rate drops, training loop."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import NonFiniteError, ParameterError
from .network import ModelState, NetworkSpec, backward, evaluate, init

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lr0: float = 0.01
    momentum: float = 0.9
    weight_decay: float = 0.0005  # multiplied by the learning rate in the update
    lr_drop_factor: float = 0.1
    lr_floor: float = 1e-5
    plateau_patience: int = 3
    min_improvement: float = 1e-4
    max_epochs: int = 50
    batch_size: int = 16
    seed: int = 0
    stop_at_zero_error: bool = True
    # the N(0, 0.005^2) scheme leaves the desk network at chance for 50
    # epochs, so training defaults to the U(-0.05, 0.05) alternative
    init_scheme: str = "uniform"

    def validate(self) -> None:
        if not self.lr0 > self.lr_floor > 0:
            raise ParameterError("need lr0 > lr_floor > 0")
        if not 0 <= self.momentum < 1:
            raise ParameterError("momentum must lie in [0, 1)")
        if not 0 < self.lr_drop_factor < 1:
            raise ParameterError("lr_drop_factor must lie in (0, 1)")
        if self.batch_size < 1 or self.max_epochs < 1 or self.plateau_patience < 0:
            raise ParameterError("batch_size and max_epochs must be >= 1, patience >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EpochRecord:
    epoch: int
    lr: float
    train_loss: float
    train_acc: float
    test_loss: float
    test_acc: float


@dataclass
class TrainResult:
    state: ModelState  # best by validation error
    history: list
    best_epoch: int
    stop_reason: str
    single_class_validation: bool

    @property
    def lr_trace(self) -> list:
        return [r.lr for r in self.history]


def sgd_step(state: ModelState, grads: dict, lr: float, momentum: float = 0.9, weight_decay: float = 0.0005) -> ModelState:
    """v <- momentum*v - weight_decay*lr*w - lr*g ; w <- w + v (biases included). In place."""
    for i, g in grads.items():
        for name in ("W", "b"):
            if not np.all(np.isfinite(g[name])):
                raise NonFiniteError(f"non-finite gradient for layer {i} {name}")
            if g[name].shape != state.params[i][name].shape:
                raise ParameterError(f"gradient shape mismatch at layer {i} {name}")
    for i, g in grads.items():
        for name in ("W", "b"):
            w = state.params[i][name]
            v = state.velocity[i][name]
            v *= momentum
            v -= weight_decay * lr * w
            v -= lr * g[name]
            w += v
    state.iteration += 1
    return state


class PlateauSchedule:
    """Drop the rate by ``factor`` after ``patience`` epochs without improvement.

    An epoch improves when the monitored loss beats the best so far by at
    least ``min_improvement``. Once a drop would take the rate below
    ``floor`` the schedule reports ``stop``.
    """

    def __init__(self, lr0, factor=0.1, floor=1e-5, patience=3, min_improvement=1e-4):
        self.lr0 = lr0
        self.factor = factor
        self.floor = floor
        self.patience = patience
        self.min_improvement = min_improvement
        self.drops = 0
        self.best = np.inf
        self.wait = 0
        self.stop = False

    @property
    def lr(self) -> float:
        # recomputed from lr0 so repeated drops don't accumulate rounding
        return float(np.round(self.lr0 * self.factor**self.drops, 15))

    def update(self, loss: float) -> float:
        if self.best - loss >= self.min_improvement:
            self.best = loss
            self.wait = 0
        else:
            self.wait += 1
        if self.wait >= self.patience:
            self.wait = 0
            nxt = self.lr0 * self.factor ** (self.drops + 1)
            if nxt < self.floor * (1 - 1e-9):
                self.stop = True
            else:
                self.drops += 1
        return self.lr


def train(
    x_train: np.ndarray,
    y_train: np.ndarray,
    spec: NetworkSpec,
    config: TrainConfig | None = None,
    x_val: np.ndarray | None = None,
    y_val: np.ndarray | None = None,
    state: ModelState | None = None,
    on_epoch=None,
) -> TrainResult:
    """Mini-batch SGD with seeded per-epoch shuffling.

    Stops when validation error reaches zero, when the schedule runs below
    its floor, or after ``max_epochs``. The returned state is the one with
    the lowest validation error seen (earliest on ties).
    """
    config = config or TrainConfig()
    config.validate()
    x_train = np.asarray(x_train, float)
    y_train = np.asarray(y_train, dtype=int)
    if len(x_train) == 0:
        raise ParameterError("empty training set")
    if len(x_train) != len(y_train):
        raise ParameterError("inputs and labels differ in length")
    if np.any(y_train < 0) or np.any(y_train >= spec.n_classes):
        raise ParameterError("label out of range")
    if x_val is None:
        x_val, y_val = x_train, y_train
    y_val = np.asarray(y_val, dtype=int)
    single_class = len(np.unique(y_val)) == 1

    rng = np.random.default_rng(config.seed)
    if state is None:
        state = init(spec, seed=config.seed, scheme=config.init_scheme)
    schedule = PlateauSchedule(
        config.lr0, config.lr_drop_factor, config.lr_floor, config.plateau_patience, config.min_improvement
    )
    history = []
    best_err = np.inf
    best_state = state.copy()
    best_epoch = 0
    reason = "max_epochs"
    n = len(x_train)
    for epoch in range(1, config.max_epochs + 1):
        lr = schedule.lr
        order = rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            loss, grads, _, logits = backward(state, x_train[idx], y_train[idx], input_grad=False, return_logits=True)
            sgd_step(state, grads, lr, config.momentum, config.weight_decay)
            loss_sum += loss * len(idx)
            correct += int(np.sum(logits.argmax(axis=1) == y_train[idx]))
        # running averages over the epoch's mini-batches
        train_loss = loss_sum / n
        train_acc = correct / n
        val_loss, val_acc = evaluate(state, x_val, y_val)
        rec = EpochRecord(epoch, lr, train_loss, train_acc, val_loss, val_acc)
        history.append(rec)
        log.info("epoch %d lr %.0e loss %.4f acc %.3f val_loss %.4f val_acc %.3f", epoch, lr, train_loss, train_acc, val_loss, val_acc)
        if on_epoch is not None:
            on_epoch(rec)
        err = 1.0 - val_acc
        if err < best_err:
            best_err = err
            best_state = state.copy()
            best_epoch = epoch
        if config.stop_at_zero_error and err == 0.0:
            reason = "zero_validation_error"
            break
        schedule.update(val_loss)
        if schedule.stop:
            reason = "lr_floor"
            break
    return TrainResult(best_state, history, best_epoch, reason, single_class)
