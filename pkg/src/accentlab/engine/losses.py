"""Loss functions as fused autograd ops.

All losses clamp predictions to [1e-7, 1 - 1e-7] before taking logs; the
clamp zeroes the gradient outside that band.
"""

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor

CLAMP = 1e-7


def _check_shapes(pred: Tensor, target: np.ndarray, name: str) -> np.ndarray:
    target = np.asarray(target, dtype=pred.data.dtype)
    if target.shape != pred.data.shape:
        raise ShapeError(f"{name}: target shape {target.shape} != pred shape {pred.data.shape}")
    return target


def categorical_crossentropy(pred: Tensor, target) -> Tensor:
    """Batch mean of -sum(target * log(pred)); pred rows are probabilities."""
    t = _check_shapes(pred, target, "categorical_crossentropy")
    p = np.clip(pred.data, CLAMP, 1.0 - CLAMP)
    batch = pred.data.shape[0] if pred.data.ndim > 1 else 1
    data = np.asarray(-(t * np.log(p)).sum() / batch, dtype=pred.data.dtype)

    def backward(g):
        mask = (pred.data > CLAMP) & (pred.data < 1.0 - CLAMP)
        pred.accumulate(-(t / p) * mask * (g / batch))
    return Tensor.from_op(data, (pred,), backward)


def nll_loss(log_pred: Tensor, target) -> Tensor:
    """Batch mean of -sum(target * log_pred); log_pred rows are log-probabilities."""
    t = _check_shapes(log_pred, target, "nll_loss")
    batch = log_pred.data.shape[0] if log_pred.data.ndim > 1 else 1
    data = np.asarray(-(t * log_pred.data).sum() / batch, dtype=log_pred.data.dtype)

    def backward(g):
        log_pred.accumulate(-t * (g / batch))
    return Tensor.from_op(data, (log_pred,), backward)


def binary_crossentropy(pred: Tensor, target) -> Tensor:
    """Elementwise mean of -[t log p + (1-t) log(1-p)]."""
    t = _check_shapes(pred, target, "binary_crossentropy")
    p = np.clip(pred.data, CLAMP, 1.0 - CLAMP)
    n = pred.data.size
    data = np.asarray(-(t * np.log(p) + (1.0 - t) * np.log1p(-p)).sum() / n,
                      dtype=pred.data.dtype)

    def backward(g):
        mask = (pred.data > CLAMP) & (pred.data < 1.0 - CLAMP)
        pred.accumulate((-(t / p) + (1.0 - t) / (1.0 - p)) * mask * (g / n))
    return Tensor.from_op(data, (pred,), backward)
