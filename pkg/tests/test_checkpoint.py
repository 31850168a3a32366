import numpy as np
import pytest

from accentlab.engine import (BatchNorm1D, Conv1D, Dense, GlobalAvgPool1D,
                              MaxPool1D, ModelGraph, checkpoint)
from accentlab.errors import CheckpointError


def small_graph(seed=0):
    r = np.random.default_rng(seed)
    return ModelGraph("small", [
        Conv1D("conv", 3, 4, 3, r, padding="same"),
        BatchNorm1D("bn", 4),
        MaxPool1D("pool", 2),
        GlobalAvgPool1D("gap"),
        Dense("fc", 4, 2, r, activation="softmax"),
    ], input_shape=(8, 3))


def test_round_trip_bit_exact(tmp_path):
    g = small_graph(1)
    # make the running stats non-trivial so they are part of the test
    g["bn"].running_mean.data += 0.5
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))

    g2 = small_graph(2)
    checkpoint.load(g2, str(base))
    for p, q in zip(g.parameters(), g2.parameters()):
        assert p.name == q.name
        assert p.data.tobytes() == q.data.tobytes(), p.name


def test_index_lists_every_param_once(tmp_path):
    g = small_graph()
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))
    lines = (base.with_suffix(".idx")).read_text().splitlines()
    names = [ln.split("\t")[0] for ln in lines]
    assert sorted(names) == sorted(p.name for p in g.parameters())
    assert len(names) == len(set(names))
    # index carries dtype, shape, offset for each entry
    for ln in lines:
        name, dtype, shape, offset = ln.split("\t")
        assert dtype == "float32"
        assert all(d.isdigit() for d in shape.split(","))
        assert offset.isdigit()


def test_offsets_are_contiguous(tmp_path):
    g = small_graph()
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))
    blob_size = (base.with_suffix(".bin")).stat().st_size
    total = sum(4 * p.data.size for p in g.parameters())
    assert blob_size == total


def test_truncated_blob_rejected(tmp_path):
    g = small_graph()
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))
    blob = base.with_suffix(".bin")
    blob.write_bytes(blob.read_bytes()[:-8])
    with pytest.raises(CheckpointError, match="truncated"):
        checkpoint.load(small_graph(), str(base))


def test_architecture_mismatch_rejected(tmp_path):
    g = small_graph()
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))

    r = np.random.default_rng(0)
    other = ModelGraph("other", [Dense("fc", 4, 2, r)], input_shape=(4,))
    with pytest.raises(CheckpointError, match="does not match"):
        checkpoint.load(other, str(base))


def test_shape_mismatch_rejected(tmp_path):
    r = np.random.default_rng(0)
    g = ModelGraph("m", [Dense("fc", 4, 2, r)], input_shape=(4,))
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))
    wider = ModelGraph("m", [Dense("fc", 4, 3, r)], input_shape=(4,))
    with pytest.raises(CheckpointError, match="shape mismatch"):
        checkpoint.load(wider, str(base))


def test_missing_files_rejected(tmp_path):
    with pytest.raises(CheckpointError, match="cannot read"):
        checkpoint.load(small_graph(), str(tmp_path / "nope"))


def test_malformed_index_line_rejected(tmp_path):
    g = small_graph()
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))
    idx = base.with_suffix(".idx")
    idx.write_text(idx.read_text().replace("\tfloat32", " float32", 1))
    with pytest.raises(CheckpointError, match="malformed"):
        checkpoint.load(small_graph(), str(base))


def test_duplicate_index_entry_rejected(tmp_path):
    g = small_graph()
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))
    idx = base.with_suffix(".idx")
    first = idx.read_text().splitlines()[0]
    idx.write_text(idx.read_text() + first + "\n")
    with pytest.raises(CheckpointError, match="duplicate"):
        checkpoint.load(small_graph(), str(base))


def test_load_resets_grads(tmp_path):
    g = small_graph()
    base = tmp_path / "ckpt"
    checkpoint.save(g, str(base))
    g2 = small_graph()
    for p in g2.parameters():
        p.grad = np.ones_like(p.data)
    checkpoint.load(g2, str(base))
    for p in g2.parameters():
        assert not p.grad.any()
