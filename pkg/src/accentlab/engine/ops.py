"""Structured network ops: conv, pooling, normalization, activations.

Convention: sequence tensors are (B, T, C) — batch, time, channels. Dense
tensors are (B, D). Every op returns a new Tensor wired into the autograd
graph via Tensor.from_op.
"""

import numpy as np

from ..errors import LabelError, ShapeError
from .tensor import Tensor

BN_EPS = 1e-5
STATS_EPS = 1e-9


def conv1d(x: Tensor, weight: Tensor, bias: Tensor, dilation: int = 1,
           padding: str = "valid") -> Tensor:
    """1-D convolution over time. weight is (k, C_in, C_out), bias (C_out,).

    `same` padding zero-pads to preserve T (left (ke-1)//2, remainder right,
    ke the dilated kernel extent); `valid` shrinks T by (k-1)*dilation.
    """
    if x.data.ndim != 3:
        raise ShapeError(f"conv1d expects (B, T, C) input, got {x.data.shape}")
    k, c_in, c_out = weight.data.shape
    if x.data.shape[2] != c_in:
        raise ShapeError(f"conv1d channel mismatch: input {x.data.shape[2]}, weight {c_in}")
    ke = (k - 1) * dilation + 1
    if padding == "same":
        pl = (ke - 1) // 2
        pr = ke - 1 - pl
        xp = np.pad(x.data, ((0, 0), (pl, pr), (0, 0)))
    elif padding == "valid":
        pl = pr = 0
        xp = x.data
    else:
        raise ValueError(f"unknown padding {padding!r}")
    t_out = xp.shape[1] - ke + 1
    if t_out < 1:
        raise ShapeError(
            f"conv1d input too short: T={x.data.shape[1]} < receptive field {ke} (valid padding)")

    w = weight.data
    out = np.zeros((x.data.shape[0], t_out, c_out), dtype=x.data.dtype)
    for i in range(k):
        out += xp[:, i * dilation:i * dilation + t_out, :] @ w[i]
    out += bias.data

    def backward(g):
        if bias.requires_grad:
            bias.accumulate(g.sum(axis=(0, 1)))
        if weight.requires_grad:
            gw = np.empty_like(w)
            for i in range(k):
                xs = xp[:, i * dilation:i * dilation + t_out, :]
                gw[i] = np.tensordot(xs, g, axes=([0, 1], [0, 1]))
            weight.accumulate(gw)
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for i in range(k):
                gxp[:, i * dilation:i * dilation + t_out, :] += g @ w[i].T
            gx = gxp[:, pl:pl + x.data.shape[1], :] if (pl or pr) else gxp
            x.accumulate(np.ascontiguousarray(gx))
    return Tensor.from_op(out, (x, weight, bias), backward)


def maxpool1d(x: Tensor, pool: int) -> Tensor:
    """Max over non-overlapping windows of `pool` frames; trailing remainder dropped."""
    b, t, c = x.data.shape
    n = t // pool
    if n < 1:
        raise ShapeError(f"maxpool1d: T={t} shorter than pool size {pool}")
    xt = x.data[:, :n * pool, :].reshape(b, n, pool, c)
    idx = xt.argmax(axis=2)
    out = np.take_along_axis(xt, idx[:, :, None, :], axis=2).reshape(b, n, c)

    def backward(g):
        gx = np.zeros((b, n, pool, c), dtype=g.dtype)
        np.put_along_axis(gx, idx[:, :, None, :], g[:, :, None, :], axis=2)
        full = np.zeros_like(x.data)
        full[:, :n * pool, :] = gx.reshape(b, n * pool, c)
        x.accumulate(full)
    return Tensor.from_op(out, (x,), backward)


def global_avg_pool(x: Tensor) -> Tensor:
    """(B, T, C) -> (B, C) mean over time."""
    b, t, c = x.data.shape
    out = x.data.mean(axis=1)

    def backward(g):
        x.accumulate(np.repeat((g / t)[:, None, :], t, axis=1))
    return Tensor.from_op(out, (x,), backward)


def upsample1d(x: Tensor, factor: int) -> Tensor:
    """Repeat each frame `factor` times: (B, T, C) -> (B, T*factor, C)."""
    b, t, c = x.data.shape
    out = np.repeat(x.data, factor, axis=1)

    def backward(g):
        x.accumulate(g.reshape(b, t, factor, c).sum(axis=2))
    return Tensor.from_op(out, (x,), backward)


def stats_pool(x: Tensor) -> Tensor:
    """Concatenate per-channel mean and std over time: (B, T, C) -> (B, 2C)."""
    b, t, c = x.data.shape
    mu = x.data.mean(axis=1)
    centered = x.data - mu[:, None, :]
    var = (centered * centered).mean(axis=1)
    sigma = np.sqrt(var + STATS_EPS)
    out = np.concatenate([mu, sigma], axis=1)

    def backward(g):
        gmu = g[:, :c]
        gsig = g[:, c:]
        gx = gmu[:, None, :] / t + gsig[:, None, :] * centered / (t * sigma[:, None, :])
        x.accumulate(gx)
    return Tensor.from_op(out, (x,), backward)


def batchnorm1d(x: Tensor, gamma: Tensor, beta: Tensor,
                running_mean: Tensor, running_var: Tensor,
                mode: str, momentum: float = 0.9) -> Tensor:
    """Per-channel batch normalization over batch x time.

    Train mode normalizes with batch statistics and updates the running
    stats in place (they are non-trainable Parameters); infer mode uses the
    stored running stats.
    """
    if x.data.ndim != 3:
        raise ShapeError(f"batchnorm1d expects (B, T, C), got {x.data.shape}")
    if mode == "train":
        b, t, _ = x.data.shape
        m = b * t
        if m < 2:
            raise ShapeError("batchnorm1d train mode needs at least 2 frames")
        mu = x.data.mean(axis=(0, 1))
        centered = x.data - mu
        var = (centered * centered).mean(axis=(0, 1))
        inv_std = 1.0 / np.sqrt(var + BN_EPS)
        xhat = centered * inv_std
        out = gamma.data * xhat + beta.data
        running_mean.data = momentum * running_mean.data + (1.0 - momentum) * mu
        running_var.data = momentum * running_var.data + (1.0 - momentum) * var

        def backward(g):
            if gamma.requires_grad:
                gamma.accumulate((g * xhat).sum(axis=(0, 1)))
            if beta.requires_grad:
                beta.accumulate(g.sum(axis=(0, 1)))
            if x.requires_grad:
                dxhat = g * gamma.data
                dsum = dxhat.sum(axis=(0, 1))
                dot = (dxhat * xhat).sum(axis=(0, 1))
                gx = inv_std * (dxhat - dsum / m - xhat * dot / m)
                x.accumulate(gx)
        return Tensor.from_op(out, (x, gamma, beta), backward)

    if mode != "infer":
        raise ValueError(f"unknown batchnorm mode {mode!r}")
    inv_std = 1.0 / np.sqrt(running_var.data + BN_EPS)
    out = gamma.data * (x.data - running_mean.data) * inv_std + beta.data

    def backward(g):
        if gamma.requires_grad:
            gamma.accumulate((g * (x.data - running_mean.data) * inv_std).sum(axis=(0, 1)))
        if beta.requires_grad:
            beta.accumulate(g.sum(axis=(0, 1)))
        if x.requires_grad:
            x.accumulate(g * (gamma.data * inv_std))
    return Tensor.from_op(out, (x, gamma, beta), backward)


def dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """(B, D_in) @ (D_in, D_out) + bias."""
    if x.data.ndim != 2:
        raise ShapeError(f"dense expects (B, D) input, got {x.data.shape}")
    return x @ weight + bias


def dropout(x: Tensor, rate: float, rng: np.random.Generator, mode: str) -> Tensor:
    """Inverted dropout; identity in infer mode or at rate 0."""
    if mode == "infer" or rate == 0.0:
        return x
    keep = (rng.random(x.data.shape) >= rate).astype(x.data.dtype)
    scale = 1.0 / (1.0 - rate)
    out = x.data * keep * scale

    def backward(g):
        x.accumulate(g * keep * scale)
    return Tensor.from_op(out, (x,), backward)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        dot = (g * s).sum(axis=axis, keepdims=True)
        x.accumulate(s * (g - dot))
    return Tensor.from_op(s, (x,), backward)


def log_softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    logp = shifted - lse

    def backward(g):
        p = np.exp(logp)
        x.accumulate(g - p * g.sum(axis=axis, keepdims=True))
    return Tensor.from_op(logp, (x,), backward)


def embedding_concat(features: Tensor, table: Tensor, label: np.ndarray) -> Tensor:
    """Append 5 label-selected embedding rows after the feature frames.

    Each of the 5 one-hot entries (0 or 1) picks row 0 or row 1 of the
    (2, C) table, giving 5 extra frames: (B, T, C) -> (B, T+5, C).
    """
    lab = np.asarray(label)
    if lab.ndim == 1:
        lab = lab[None, :]
    b, t, c = features.data.shape
    if lab.shape != (b, 5):
        raise ShapeError(f"label must be (B, 5), got {lab.shape}")
    if not (np.isin(lab, (0, 1)).all() and (lab.sum(axis=1) == 1).all()):
        raise LabelError("label must be one-hot: entries in {0,1} with exactly one 1")
    idx = lab.astype(np.intp)
    rows = table.data[idx]  # (B, 5, C)
    out = np.concatenate([features.data, rows], axis=1)

    def backward(g):
        if features.requires_grad:
            features.accumulate(np.ascontiguousarray(g[:, :t, :]))
        if table.requires_grad:
            grows = g[:, t:, :]
            gt = np.zeros_like(table.data)
            for r in (0, 1):
                sel = grows[idx == r]
                if sel.size:
                    gt[r] = sel.sum(axis=0)
            table.accumulate(gt)
    return Tensor.from_op(out, (features, table), backward)
