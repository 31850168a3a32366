"""Mono 16 kHz PCM16 WAV reading and writing.

Hand-rolled RIFF parsing so that malformed headers and unsupported
encodings raise distinct errors instead of whatever the stdlib throws.
No resampling, no channel mixing: anything that is not PCM16/mono/16k
is rejected.
"""

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import FormatError, UnsupportedFormatError

SAMPLE_RATE = 16000
_PCM_SCALE = 32768.0


@dataclass
class Signal:
    """Mono audio: float samples in [-1, 1] at a fixed 16 kHz rate."""

    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise FormatError(f"signal must be 1-D, got shape {self.samples.shape}")
        if self.sample_rate != SAMPLE_RATE:
            raise UnsupportedFormatError(
                f"sample rate must be {SAMPLE_RATE} Hz, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise FormatError("signal contains non-finite samples")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(path) -> Signal:
    """Read a RIFF/WAVE file holding mono 16-bit PCM at 16 kHz."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < 12:
        raise FormatError(f"{path}: file too small to be a WAV container")
    magic, _size, wave_id = struct.unpack_from("<4sI4s", raw, 0)
    if magic != b"RIFF":
        raise FormatError(f"{path}: bad container magic {magic!r}, expected b'RIFF'")
    if wave_id != b"WAVE":
        raise FormatError(f"{path}: bad form type {wave_id!r}, expected b'WAVE'")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id, chunk_size = struct.unpack_from("<4sI", raw, pos)
        body = raw[pos + 8:pos + 8 + chunk_size]
        if len(body) < chunk_size:
            raise FormatError(f"{path}: truncated chunk {chunk_id!r}")
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            data = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None or len(fmt) < 16:
        raise FormatError(f"{path}: missing or short fmt chunk")
    if data is None:
        raise FormatError(f"{path}: missing data chunk")

    audio_format, channels, rate, _brate, _balign, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if audio_format != 1:
        raise UnsupportedFormatError(f"{path}: only PCM supported, got format tag {audio_format}")
    if bits != 16:
        raise UnsupportedFormatError(f"{path}: only 16-bit samples supported, got {bits}")
    if channels != 1:
        raise UnsupportedFormatError(f"{path}: only mono supported, got {channels} channels")
    if rate != SAMPLE_RATE:
        raise UnsupportedFormatError(f"{path}: only {SAMPLE_RATE} Hz supported, got {rate}")

    pcm = np.frombuffer(data[:len(data) // 2 * 2], dtype="<i2")
    return Signal(pcm.astype(np.float64) / _PCM_SCALE, SAMPLE_RATE)


def write_wav(path, signal: Signal) -> None:
    """Write a Signal as canonical 44-byte-header PCM16 mono WAV."""
    x = np.clip(signal.samples, -1.0, 1.0)
    pcm = np.clip(np.rint(x * _PCM_SCALE), -32768, 32767).astype("<i2")
    data = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(data), b"WAVE",
        b"fmt ", 16, 1, 1, SAMPLE_RATE, SAMPLE_RATE * 2, 2, 16,
        b"data", len(data),
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(data)
