"""Classifier training loops and the epoch-metrics log.

Every training routine records one epoch-0 row per split (the untrained
model, inference mode) and per-epoch train/test rows after that, so loss
trajectories always start from the pre-training baseline.
"""

import numpy as np

from ..engine import Tensor, categorical_crossentropy, nll_loss
from ..errors import NumericError
from .data import batch_indices
from .labels import one_hot_batch

METRICS_HEADER = "epoch,split,loss_total,loss_cls,loss_dec,accuracy"


class MetricsLog:
    """Accumulates epoch rows; serializes to the fixed-header CSV."""

    def __init__(self):
        self.rows = []

    @staticmethod
    def _fmt(v):
        return "" if v is None else f"{v:.6f}"

    def add(self, epoch, split, loss_total, loss_cls=None, loss_dec=None,
            accuracy=None) -> None:
        self.rows.append((epoch, split, loss_total, loss_cls, loss_dec, accuracy))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(METRICS_HEADER + "\n")
            for epoch, split, *vals in self.rows:
                fh.write(f"{epoch},{split}," + ",".join(self._fmt(v) for v in vals) + "\n")

    def last(self, split: str, field: str):
        i = {"loss_total": 0, "loss_cls": 1, "loss_dec": 2, "accuracy": 3}[field]
        for row in reversed(self.rows):
            if row[1] == split:
                return row[2 + i]
        return None


def _loss_fn(graph):
    """CCE for probability outputs, NLL for log-probability outputs."""
    return nll_loss if graph.layers[-1].activation == "log_softmax" else categorical_crossentropy


def _check_finite(loss, context: str) -> float:
    v = float(loss.data)
    if not np.isfinite(v):
        raise NumericError(f"non-finite loss ({v}) at {context}")
    return v


def eval_batched(graph, features: np.ndarray, labels: np.ndarray,
                 batch_size: int = 128):
    """Inference-mode loss and accuracy over a fixed-size dataset."""
    loss_fn = _loss_fn(graph)
    n_out = graph.output_shape[-1]
    total = 0.0
    preds = np.empty(labels.size, dtype=np.int64)
    for start in range(0, labels.size, batch_size):
        idx = np.arange(start, min(start + batch_size, labels.size))
        out = graph.forward(Tensor(features[idx]), mode="infer")
        loss = loss_fn(out, one_hot_batch(labels[idx], n_out))
        total += float(loss.data) * idx.size
        preds[idx] = out.data.argmax(axis=1)
    n = labels.size
    return total / n, float((preds == labels).mean()), preds


def eval_sequences(graph, features: list, labels: np.ndarray):
    """Per-utterance inference for variable-length inputs."""
    loss_fn = _loss_fn(graph)
    n_out = graph.output_shape[-1]
    total = 0.0
    preds = np.empty(labels.size, dtype=np.int64)
    for j, feat in enumerate(features):
        out = graph.forward(Tensor(feat[None]), mode="infer")
        total += float(loss_fn(out, one_hot_batch(labels[j:j + 1], n_out)).data)
        preds[j] = out.data.argmax(axis=1)[0]
    n = labels.size
    return total / n, float((preds == labels).mean()), preds


def train_batched(graph, optimizer, train, test, *, epochs: int,
                  batch_size: int, rng: np.random.Generator,
                  log: MetricsLog = None, early_stop_acc: float = None):
    """Mini-batch training on fixed-size features (train/test datasets)."""
    log = log if log is not None else MetricsLog()
    loss_fn = _loss_fn(graph)
    n_out = graph.output_shape[-1]
    splits = [("train", train)] + ([("test", test)] if test is not None else [])
    for split, ds in splits:
        loss, acc, _ = eval_batched(graph, ds.features, ds.labels, batch_size)
        log.add(0, split, loss, loss_cls=loss, accuracy=acc)
    for epoch in range(1, epochs + 1):
        running = 0.0
        hits = 0
        for idx in batch_indices(len(train), batch_size, rng):
            x = Tensor(train.features[idx])
            targets = one_hot_batch(train.labels[idx], n_out)
            graph.zero_grad()
            out = graph.forward(x, mode="train", rng=rng)
            loss = loss_fn(out, targets)
            v = _check_finite(loss, f"epoch {epoch}, utts {list(train.utt_ids[i] for i in idx[:3])}")
            loss.backward()
            optimizer.step()
            running += v * idx.size
            hits += int((out.data.argmax(axis=1) == train.labels[idx]).sum())
        n = len(train)
        log.add(epoch, "train", running / n, loss_cls=running / n, accuracy=hits / n)
        stop_acc = hits / n
        if test is not None:
            test_loss, test_acc, _ = eval_batched(graph, test.features, test.labels, batch_size)
            log.add(epoch, "test", test_loss, loss_cls=test_loss, accuracy=test_acc)
            stop_acc = test_acc
        if early_stop_acc is not None and stop_acc >= early_stop_acc:
            break
    return log


def train_sequences(graph, optimizer, train, test, *, epochs: int,
                    batch_size: int, rng: np.random.Generator,
                    log: MetricsLog = None, early_stop_acc: float = None):
    """Gradient-accumulation training for variable-length sequence inputs.

    Each mini-batch runs batch_size single-utterance passes, averages the
    accumulated gradients, and takes one optimizer step.
    """
    log = log if log is not None else MetricsLog()
    loss_fn = _loss_fn(graph)
    n_out = graph.output_shape[-1]
    splits = [("train", train)] + ([("test", test)] if test is not None else [])
    for split, ds in splits:
        loss, acc, _ = eval_sequences(graph, ds.features, ds.labels)
        log.add(0, split, loss, loss_cls=loss, accuracy=acc)
    for epoch in range(1, epochs + 1):
        running = 0.0
        hits = 0
        for idx in batch_indices(len(train), batch_size, rng):
            graph.zero_grad()
            for j in idx:
                out = graph.forward(Tensor(train.features[j][None]), mode="train", rng=rng)
                loss = loss_fn(out, one_hot_batch(train.labels[j:j + 1], n_out))
                running += _check_finite(loss, f"epoch {epoch}, utt {train.utt_ids[j]}")
                loss.backward()
                hits += int(out.data.argmax(axis=1)[0] == train.labels[j])
            inv = 1.0 / idx.size
            for p in graph.parameters():
                if p.trainable:
                    p.grad *= inv
            optimizer.step()
        n = len(train)
        log.add(epoch, "train", running / n, loss_cls=running / n, accuracy=hits / n)
        stop_acc = hits / n
        if test is not None:
            test_loss, test_acc, _ = eval_sequences(graph, test.features, test.labels)
            log.add(epoch, "test", test_loss, loss_cls=test_loss, accuracy=test_acc)
            stop_acc = test_acc
        if early_stop_acc is not None and stop_acc >= early_stop_acc:
            break
    return log
