"""Log-standardize feature transform, its exact inverse, and length unification.

The forward transform maps a linear-magnitude spectrogram into [0, 1]
in three invertible steps: log(x + eps), per-frequency standardization
with statistics fitted on the training set, then a global min-max
rescale (the decoder's binary cross-entropy needs [0, 1] targets).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import StateError

LOG_EPSILON = 1e-10
TARGET_FRAMES = 256


@dataclass
class TransformState:
    """Fitted statistics for the log-standardize transform."""

    epsilon: float = LOG_EPSILON
    mean: np.ndarray | None = None   # (n_bins,)
    std: np.ndarray | None = None    # (n_bins,)
    min_val: float = 0.0
    max_val: float = 1.0

    @property
    def fitted(self) -> bool:
        return self.mean is not None

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump({
                "epsilon": self.epsilon,
                "mean": list(map(float, self.mean)),
                "std": list(map(float, self.std)),
                "min_val": self.min_val,
                "max_val": self.max_val,
            }, f)

    @classmethod
    def load(cls, path) -> "TransformState":
        with open(path, "r", encoding="utf-8") as f:
            d = json.load(f)
        return cls(epsilon=d["epsilon"],
                   mean=np.asarray(d["mean"], dtype=np.float64),
                   std=np.asarray(d["std"], dtype=np.float64),
                   min_val=d["min_val"], max_val=d["max_val"])


def fit_transform_state(specs, epsilon: float = LOG_EPSILON) -> TransformState:
    """Fit per-bin mean/std and global min/max over a list of (T, D) spectrograms."""
    logs = np.concatenate([np.log(np.asarray(s, dtype=np.float64) + epsilon) for s in specs])
    mean = logs.mean(axis=0)
    std = logs.std(axis=0)
    std = np.maximum(std, 1e-12)  # guard constant bins
    z = (logs - mean) / std
    lo, hi = float(z.min()), float(z.max())
    if hi <= lo:
        hi = lo + 1.0
    return TransformState(epsilon=epsilon, mean=mean, std=std, min_val=lo, max_val=hi)


def log_standardize(spec: np.ndarray, state: TransformState) -> np.ndarray:
    """Forward transform: log -> standardize -> min-max scale to [0, 1]."""
    if not state.fitted:
        raise StateError("transform state not fitted; call fit_transform_state first")
    z = (np.log(np.asarray(spec, dtype=np.float64) + state.epsilon) - state.mean) / state.std
    return (z - state.min_val) / (state.max_val - state.min_val)


def destandardize_exp(features: np.ndarray, state: TransformState) -> np.ndarray:
    """Exact inverse of log_standardize; output clamped at >= 0."""
    if not state.fitted:
        raise StateError("transform state not fitted; call fit_transform_state first")
    z = np.asarray(features, dtype=np.float64) * (state.max_val - state.min_val) + state.min_val
    x = np.exp(z * state.std + state.mean) - state.epsilon
    return np.maximum(x, 0.0)


def trim_or_pad(features: np.ndarray, target_t: int = TARGET_FRAMES,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Unify the time dimension to target_t rows.

    Longer inputs are cropped at a uniformly random start (rng required);
    shorter ones get zero rows appended at the end.
    """
    if target_t < 1:
        raise ValueError("target_t must be >= 1")
    features = np.asarray(features)
    t = features.shape[0]
    if t == target_t:
        return features.copy()
    if t > target_t:
        if rng is None:
            raise ValueError("rng required to crop a long feature matrix")
        start = int(rng.integers(0, t - target_t + 1))
        return features[start:start + target_t].copy()
    out = np.zeros((target_t,) + features.shape[1:], dtype=features.dtype)
    out[:t] = features
    return out
