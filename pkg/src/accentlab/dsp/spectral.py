"""STFT magnitude, MFCC extraction and Griffin-Lim reconstruction.

Framing convention shared by both feature types: a signal of N samples
yields T = (N - frame) // hop + 1 frames, hop fixed at 160 samples (10 ms
at 16 kHz). Spectrograms use 256-sample frames (FFT size 256, 129 bins);
MFCCs use 400-sample frames (25 ms) zero-padded to a 512-point FFT, a
30-filter mel bank between 20 Hz and 8 kHz, and an orthonormal DCT-II
keeping all 30 coefficients.
"""

import numpy as np

from ..errors import TooShortError
from .wavio import SAMPLE_RATE, Signal

HOP = 160
STFT_FRAME = 256
STFT_BINS = STFT_FRAME // 2 + 1  # 129
MFCC_FRAME = 400
MFCC_NFFT = 512
N_MELS = 30
N_MFCC = 30
MEL_FMIN = 20.0
MEL_FMAX = 8000.0
LOG_FLOOR = 1e-10


def hann(length: int) -> np.ndarray:
    """Periodic Hann window."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)


def num_frames(n_samples: int, frame: int, hop: int = HOP) -> int:
    if n_samples < frame:
        raise TooShortError(f"need at least {frame} samples, got {n_samples}")
    return (n_samples - frame) // hop + 1


def frame_signal(x: np.ndarray, frame: int, hop: int = HOP) -> np.ndarray:
    """Slice x into (T, frame) rows; trailing remainder samples are dropped."""
    t = num_frames(len(x), frame, hop)
    idx = np.arange(frame)[None, :] + hop * np.arange(t)[:, None]
    return x[idx]


def stft_complex(x: np.ndarray) -> np.ndarray:
    """Complex STFT, (T, 129), Hann window."""
    frames = frame_signal(np.asarray(x, dtype=np.float64), STFT_FRAME)
    return np.fft.rfft(frames * hann(STFT_FRAME), n=STFT_FRAME, axis=1)


def stft_magnitude(signal: Signal) -> np.ndarray:
    """Linear magnitude spectrogram of shape (T, 129)."""
    return np.abs(stft_complex(signal.samples))


def _overlap_add(spec: np.ndarray) -> np.ndarray:
    """Weighted overlap-add inverse of stft_complex, no amplitude clipping."""
    spec = np.asarray(spec)
    t = spec.shape[0]
    win = hann(STFT_FRAME)
    frames = np.fft.irfft(spec, n=STFT_FRAME, axis=1) * win
    n = (t - 1) * HOP + STFT_FRAME
    x = np.zeros(n)
    wsum = np.zeros(n)
    for i in range(t):
        s = i * HOP
        x[s:s + STFT_FRAME] += frames[i]
        wsum[s:s + STFT_FRAME] += win * win
    x /= np.maximum(wsum, 1e-12)
    return x


def istft(spec: np.ndarray) -> Signal:
    """Least-squares inverse of stft_complex, clipped into Signal range."""
    return Signal(np.clip(_overlap_add(spec), -1.0, 1.0), SAMPLE_RATE)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int = N_MELS, nfft: int = MFCC_NFFT,
                   fmin: float = MEL_FMIN, fmax: float = MEL_FMAX) -> np.ndarray:
    """Triangular mel filter matrix of shape (n_mels, nfft//2 + 1), peak 1."""
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    bin_freqs = np.arange(nfft // 2 + 1) * SAMPLE_RATE / nfft
    bank = np.zeros((n_mels, nfft // 2 + 1))
    for m in range(n_mels):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        rising = (bin_freqs - lo) / (mid - lo)
        falling = (hi - bin_freqs) / (hi - mid)
        bank[m] = np.clip(np.minimum(rising, falling), 0.0, 1.0)
    return bank


def dct_ii_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix; row k dotted with x gives coefficient k."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    mat = np.cos(np.pi * k * (2 * j + 1) / (2 * n)) * np.sqrt(2.0 / n)
    mat[0] /= np.sqrt(2.0)
    return mat


_MEL_BANK = mel_filterbank()
_DCT = dct_ii_matrix(N_MELS)[:N_MFCC]


def mfcc(signal: Signal) -> np.ndarray:
    """MFCC matrix of shape (F, 30): power spectrum -> mel bank -> log -> DCT-II."""
    frames = frame_signal(np.asarray(signal.samples, dtype=np.float64), MFCC_FRAME)
    spectra = np.abs(np.fft.rfft(frames * hann(MFCC_FRAME), n=MFCC_NFFT, axis=1)) ** 2
    energies = spectra @ _MEL_BANK.T
    return np.log(np.maximum(energies, LOG_FLOOR)) @ _DCT.T


def spectral_error(magnitude: np.ndarray, target: np.ndarray) -> float:
    """Relative Frobenius distance between two magnitude spectrograms."""
    denom = np.linalg.norm(target)
    return float(np.linalg.norm(magnitude - target) / max(denom, 1e-12))


def griffin_lim(spec: np.ndarray, iterations: int, return_errors: bool = False):
    """Reconstruct a waveform from a magnitude spectrogram.

    Starts from zero phase, then alternates inverse STFT and magnitude
    replacement. The consistency error |.|stft(x)| - spec| is non-increasing
    across iterations; pass return_errors=True to get the logged sequence.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    spec = np.asarray(spec, dtype=np.float64)
    x = _overlap_add(spec.astype(np.complex128))  # zero-phase start
    errors = []
    for _ in range(iterations):
        c = stft_complex(x)
        mag = np.abs(c)
        errors.append(spectral_error(mag, spec))
        phase = c / np.maximum(mag, 1e-12)
        x = _overlap_add(spec * phase)
    signal = Signal(np.clip(x, -1.0, 1.0), SAMPLE_RATE)
    if return_errors:
        return signal, errors
    return signal
