"""Additive-noise augmentation."""

import warnings

import numpy as np

from ..dsp import Signal
from ..errors import DataError


class SilentInputWarning(UserWarning):
    """Raised when augmenting an all-zero signal: output is pure noise."""


def augment_additive_noise(signal: Signal, snr_db: float,
                           rng: np.random.Generator) -> Signal:
    """Add white noise at exactly the requested signal-to-noise ratio.

    The noise is scaled against its realized (not expected) power, so the
    pre-clip power ratio matches snr_db identically. An all-zero input has
    no power to reference; it comes back as pure noise scaled against a
    unit reference power, with a SilentInputWarning.
    """
    if not 0.0 <= snr_db <= 40.0:
        raise DataError(f"snr_db {snr_db} outside [0, 40]")
    x = signal.samples
    noise = rng.standard_normal(len(x))
    p_noise = float(np.mean(noise * noise))
    p_signal = float(np.mean(x * x))
    if p_signal == 0.0:
        warnings.warn("augmenting an all-zero signal: returning pure noise",
                      SilentInputWarning)
        p_signal = 1.0
        x = np.zeros_like(noise)
    scale = np.sqrt(p_signal / (10.0 ** (snr_db / 10.0) * p_noise))
    return Signal(np.clip(x + scale * noise, -1.0, 1.0), signal.sample_rate)


def expand_threefold(signal: Signal, rng: np.random.Generator,
                     snrs=(15.0, 25.0)) -> list:
    """Return [original, noisy copy @ snrs[0], noisy copy @ snrs[1]]."""
    return [signal] + [augment_additive_noise(signal, snr, rng) for snr in snrs]
