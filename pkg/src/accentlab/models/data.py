"""Dataset assembly: manifests to model-ready feature tensors."""

from dataclasses import dataclass

import numpy as np

from ..corpus import Manifest, class_id
from ..dsp import (TARGET_FRAMES, TransformState, fit_transform_state,
                   log_standardize, mfcc, read_wav, stft_magnitude,
                   trim_or_pad)
from ..errors import DataError


@dataclass
class ArrayDataset:
    """Fixed-size features (n, ...) with integer labels."""
    features: np.ndarray
    labels: np.ndarray
    utt_ids: tuple

    def __len__(self):
        return self.labels.size


@dataclass
class MfccDataset:
    """Variable-length MFCC features: a list of (F, 30) float32 arrays."""
    features: list
    labels: np.ndarray
    speakers: tuple
    utt_ids: tuple

    def __len__(self):
        return self.labels.size


def _records(manifest: Manifest, split):
    recs = manifest.subset(split=split).records if split else manifest.records
    if not recs:
        raise DataError(f"manifest has no records for split {split!r}")
    return recs


def raw_spectrograms(manifest: Manifest, split=None) -> list:
    return [stft_magnitude(read_wav(manifest.resolve(r)))
            for r in _records(manifest, split)]


def fit_state(manifest: Manifest) -> TransformState:
    """Fit the log-standardize state on the train split only."""
    return fit_transform_state(raw_spectrograms(manifest, "train"))


def build_spectro_dataset(manifest: Manifest, split: str,
                          state: TransformState, rng=None) -> ArrayDataset:
    """Standardized, trimmed/padded (n, 256, 129) float32 features.

    rng drives the random crop for utterances longer than 256 frames and
    is required if the manifest contains any such utterance.
    """
    recs = _records(manifest, split)
    feats = np.empty((len(recs), TARGET_FRAMES, 129), dtype=np.float32)
    labels = np.empty(len(recs), dtype=np.int64)
    for i, rec in enumerate(recs):
        spec = stft_magnitude(read_wav(manifest.resolve(rec)))
        feats[i] = trim_or_pad(log_standardize(spec, state), TARGET_FRAMES,
                               rng=rng).astype(np.float32)
        labels[i] = class_id(rec.accent_class)
    return ArrayDataset(feats, labels, tuple(r.utt_id for r in recs))


def build_mfcc_dataset(manifest: Manifest, split: str) -> MfccDataset:
    """Per-utterance cepstral-mean-normalized MFCCs for the TDNN."""
    recs = _records(manifest, split)
    feats = []
    labels = np.empty(len(recs), dtype=np.int64)
    for i, rec in enumerate(recs):
        m = mfcc(read_wav(manifest.resolve(rec)))
        m = m - m.mean(axis=0, keepdims=True)
        feats.append(m.astype(np.float32))
        labels[i] = class_id(rec.accent_class)
    return MfccDataset(feats, labels,
                       tuple(r.speaker for r in recs),
                       tuple(r.utt_id for r in recs))


def batch_indices(n: int, batch_size: int, rng: np.random.Generator):
    """Yield shuffled index batches covering all n samples once."""
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]
