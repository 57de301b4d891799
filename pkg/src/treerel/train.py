"""Mini-batch training with validation-based model selection.

Gradients are averaged over each batch and applied with an Adam-style step
by default (plain SGD is available).  After every epoch the validation
macro-F1 is computed in eval mode; the checkpoint with the best validation
score is kept (ties favor the earlier epoch) and training stops once
`patience` epochs pass without improvement.  Single-threaded and fully
deterministic given (data, config, seed).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import LABELS
from .features import FeatureConfig
from .metrics import score
from .model import (
    ParamGrads,
    TreeLstmParams,
    init_params,
    loss_and_backward,
    predict,
    tree_forward,
)
from .pipeline import EncodedInstance


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 16
    dropout: float = 0.2
    hidden_size: int = 200
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_epochs: int = 50
    patience: int = 8
    seed: int = 0
    features: FeatureConfig = field(default_factory=FeatureConfig)
    class_weights: bool = False

    def validate(self):
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class EpochEntry:
    epoch: int
    train_loss: float
    val_macro_f1: float
    selected: bool = False

    def to_dict(self):
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "val_macro_f1": self.val_macro_f1,
            "selected": self.selected,
        }


@dataclass
class TrainLog:
    entries: list[EpochEntry] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in self.entries)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())


class Optimizer:
    def step(self, params: TreeLstmParams, grads: ParamGrads):
        raise NotImplementedError


class Sgd(Optimizer):
    def __init__(self, learning_rate: float):
        self.lr = learning_rate

    def step(self, params, grads):
        for name, g in grads.tensors():
            getattr(params, name)[...] -= self.lr * g


class Adam(Optimizer):
    def __init__(self, params, learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {name: np.zeros_like(arr) for name, arr in params.tensors()}
        self.v = {name: np.zeros_like(arr) for name, arr in params.tensors()}

    def step(self, params, grads):
        self.t += 1
        for name, g in grads.tensors():
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1 ** self.t)
            v_hat = v / (1.0 - self.beta2 ** self.t)
            getattr(params, name)[...] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(config: TrainConfig, params: TreeLstmParams) -> Optimizer:
    if config.optimizer == "sgd":
        return Sgd(config.learning_rate)
    return Adam(params, config.learning_rate, config.beta1, config.beta2, config.eps)


def make_batches(instances, batch_size: int, seed: int, epoch: int):
    """Epoch-dependent deterministic shuffle, then fixed-size chunks."""
    if not instances:
        raise ValueError("no instances to batch")
    rng = np.random.default_rng([seed, epoch])
    order = rng.permutation(len(instances))
    shuffled = [instances[int(i)] for i in order]
    return [shuffled[i:i + batch_size] for i in range(0, len(shuffled), batch_size)]


def compute_class_weights(instances) -> np.ndarray:
    """Inverse-frequency weights: N / (6 * count); absent labels weigh 1."""
    counts = Counter(inst.label for inst in instances)
    total = len(instances)
    weights = np.ones(len(LABELS))
    for idx, lab in enumerate(LABELS):
        if counts.get(lab, 0) > 0:
            weights[idx] = total / (len(LABELS) * counts[lab])
    return weights


def train_epoch(
    params: TreeLstmParams,
    batches,
    config: TrainConfig,
    optimizer: Optimizer | None = None,
    rng: np.random.Generator | None = None,
    weights: np.ndarray | None = None,
) -> float:
    """Run one pass over the batches in place; returns the mean instance loss."""
    if optimizer is None:
        optimizer = make_optimizer(config, params)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    grads = ParamGrads.zeros_like(params)
    total_loss = 0.0
    count = 0
    for b_idx, batch in enumerate(batches):
        grads.reset()
        for inst in batch:
            w = 1.0 if weights is None else float(weights[inst.label_index])
            try:
                _, tape = tree_forward(
                    params, inst.sub, inst.inputs,
                    dropout=config.dropout, train=True, rng=rng,
                )
                loss, _ = loss_and_backward(
                    params, tape, inst.label_index, weight=w, grads=grads
                )
            except ArithmeticError as err:
                raise ArithmeticError(
                    f"batch {b_idx}, instance {inst.doc_id}:{inst.arg1},{inst.arg2}: {err}"
                ) from err
            total_loss += loss
            count += 1
        grads.scale(1.0 / len(batch))
        optimizer.step(params, grads)
    return total_loss / count


def predict_labels(params: TreeLstmParams, instances) -> list[str]:
    out = []
    for inst in instances:
        root_state, _ = tree_forward(params, inst.sub, inst.inputs, train=False)
        probs = predict(params, root_state.h)
        out.append(LABELS[int(np.argmax(probs))])
    return out


def _macro_f1(params, instances) -> float:
    gold = [inst.label for inst in instances]
    return score(gold, predict_labels(params, instances)).macro_f1


def fit(
    train_set: list[EncodedInstance],
    validation_set: list[EncodedInstance],
    config: TrainConfig,
) -> tuple[TreeLstmParams, TrainLog]:
    """Train with early stopping; returns the best-epoch parameters and log."""
    config.validate()
    if not train_set or not validation_set:
        raise ValueError("training and validation sets must both be nonempty")
    input_size = next(iter(train_set[0].inputs.values())).shape[0]
    params = init_params(input_size, config.hidden_size, config.seed)
    optimizer = make_optimizer(config, params)
    dropout_rng = np.random.default_rng([config.seed, 0x5EED])
    weights = compute_class_weights(train_set) if config.class_weights else None

    log = TrainLog()
    best_params = params.copy()
    best_f1 = -1.0
    best_epoch = -1
    stale = 0
    for epoch in range(1, config.max_epochs + 1):
        batches = make_batches(train_set, config.batch_size, config.seed, epoch)
        mean_loss = train_epoch(params, batches, config, optimizer, dropout_rng, weights)
        val_f1 = _macro_f1(params, validation_set)
        log.entries.append(EpochEntry(epoch=epoch, train_loss=mean_loss, val_macro_f1=val_f1))
        if val_f1 > best_f1:
            best_f1 = val_f1
            best_epoch = epoch
            best_params = params.copy()
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    for entry in log.entries:
        entry.selected = entry.epoch == best_epoch
    return best_params, log
