"""Audio I/O, feature extraction, feature transforms and reconstruction."""

from .featfile import read_features, write_features
from .spectral import (HOP, MFCC_FRAME, N_MFCC, STFT_BINS, STFT_FRAME,
                       griffin_lim, istft, mfcc, spectral_error,
                       stft_complex, stft_magnitude)
from .transform import (LOG_EPSILON, TARGET_FRAMES, TransformState,
                        destandardize_exp, fit_transform_state,
                        log_standardize, trim_or_pad)
from .wavio import SAMPLE_RATE, Signal, read_wav, write_wav

__all__ = [
    "HOP", "MFCC_FRAME", "N_MFCC", "STFT_BINS", "STFT_FRAME", "SAMPLE_RATE",
    "LOG_EPSILON", "TARGET_FRAMES", "Signal", "TransformState",
    "destandardize_exp", "fit_transform_state", "griffin_lim", "istft",
    "log_standardize", "mfcc", "read_features", "read_wav", "spectral_error",
    "stft_complex", "stft_magnitude", "trim_or_pad", "write_features",
    "write_wav",
]
