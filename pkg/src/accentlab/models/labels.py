"""Accent labels and the uniform converter target."""

from dataclasses import dataclass

import numpy as np

from ..corpus import CLASS_NAMES
from ..errors import LabelError

N_CLASSES = len(CLASS_NAMES)


@dataclass(frozen=True)
class AccentLabel:
    class_id: int

    def __post_init__(self):
        if not 0 <= self.class_id < N_CLASSES:
            raise LabelError(f"class_id {self.class_id} outside [0, {N_CLASSES})")

    @property
    def name(self) -> str:
        return CLASS_NAMES[self.class_id]

    @property
    def one_hot(self) -> np.ndarray:
        v = np.zeros(N_CLASSES, dtype=np.float32)
        v[self.class_id] = 1.0
        return v

    @classmethod
    def from_name(cls, name: str) -> "AccentLabel":
        if name not in CLASS_NAMES:
            raise LabelError(
                f"unknown accent {name!r}; valid: {', '.join(CLASS_NAMES)}")
        return cls(CLASS_NAMES.index(name))


def one_hot_batch(class_ids, n_classes: int = N_CLASSES) -> np.ndarray:
    ids = np.asarray(class_ids, dtype=np.int64)
    if ids.min() < 0 or ids.max() >= n_classes:
        raise LabelError(f"class ids outside [0, {n_classes})")
    out = np.zeros((ids.size, n_classes), dtype=np.float32)
    out[np.arange(ids.size), ids] = 1.0
    return out


def uniform_target(batch: int = 1, n_classes: int = N_CLASSES) -> np.ndarray:
    """The converter's classifier-branch ground truth: (1/N, ..., 1/N)."""
    return np.full((batch, n_classes), 1.0 / n_classes, dtype=np.float32)
