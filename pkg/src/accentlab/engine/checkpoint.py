"""Checkpoint I/O.

A checkpoint is two files: `<base>.idx`, a UTF-8 text index with one line
per parameter (name TAB dtype TAB comma-separated shape TAB byte offset),
and `<base>.bin`, the concatenated float32 little-endian tensor data.
"""

import numpy as np

from ..errors import CheckpointError

INDEX_SUFFIX = ".idx"
BLOB_SUFFIX = ".bin"


def save(graph, base_path: str) -> None:
    base = str(base_path)
    lines = []
    chunks = []
    offset = 0
    for p in graph.parameters():
        raw = np.ascontiguousarray(p.data, dtype="<f4")
        shape = ",".join(str(d) for d in raw.shape)
        lines.append(f"{p.name}\tfloat32\t{shape}\t{offset}")
        chunks.append(raw.tobytes())
        offset += raw.nbytes
    with open(base + INDEX_SUFFIX, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(base + BLOB_SUFFIX, "wb") as fh:
        fh.write(b"".join(chunks))


def _parse_index(path: str) -> dict:
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise CheckpointError(f"{path}:{lineno}: malformed index line")
            name, dtype, shape_s, offset_s = parts
            if dtype != "float32":
                raise CheckpointError(f"{path}:{lineno}: unsupported dtype {dtype!r}")
            if name in entries:
                raise CheckpointError(f"{path}:{lineno}: duplicate parameter {name!r}")
            try:
                shape = tuple(int(d) for d in shape_s.split(","))
                offset = int(offset_s)
            except ValueError as exc:
                raise CheckpointError(f"{path}:{lineno}: bad shape or offset") from exc
            entries[name] = (shape, offset)
    return entries


def load(graph, base_path: str) -> None:
    """Load parameters into graph, bit-exactly. Any mismatch raises CheckpointError."""
    base = str(base_path)
    try:
        entries = _parse_index(base + INDEX_SUFFIX)
        with open(base + BLOB_SUFFIX, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {base!r}: {exc}") from exc

    params = {p.name: p for p in graph.parameters()}
    missing = sorted(set(params) - set(entries))
    extra = sorted(set(entries) - set(params))
    if missing or extra:
        raise CheckpointError(
            f"checkpoint does not match architecture {graph.name!r}: "
            f"missing {missing or 'none'}, unexpected {extra or 'none'}")
    for name, (shape, offset) in entries.items():
        p = params[name]
        if shape != p.data.shape:
            raise CheckpointError(
                f"shape mismatch for {name}: checkpoint {shape}, graph {p.data.shape}")
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        end = offset + 4 * count
        if offset < 0 or end > len(blob):
            raise CheckpointError(f"blob truncated: {name} needs bytes [{offset}, {end})")
        arr = np.frombuffer(blob, dtype="<f4", count=count, offset=offset).reshape(shape)
        p.data = arr.astype(p.data.dtype)
        p.grad = np.zeros_like(p.data)
