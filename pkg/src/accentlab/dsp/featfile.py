"""Binary feature matrix file: b"ACFT" magic, u32 T, u32 D, float32 LE row-major."""

import struct

import numpy as np

from ..errors import FormatError

MAGIC = b"ACFT"


def write_features(path, features: np.ndarray) -> None:
    features = np.asarray(features)
    if features.ndim != 2:
        raise FormatError(f"feature matrix must be 2-D, got shape {features.shape}")
    t, d = features.shape
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", t, d))
        f.write(np.ascontiguousarray(features, dtype="<f4").tobytes())


def read_features(path) -> np.ndarray:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    if len(raw) < 12:
        raise FormatError(f"{path}: truncated header")
    t, d = struct.unpack_from("<II", raw, 4)
    expected = 12 + 4 * t * d
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {t}x{d}, got {len(raw)}")
    return np.frombuffer(raw, dtype="<f4", offset=12).reshape(t, d).copy()
