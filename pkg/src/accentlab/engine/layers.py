"""Layer objects: parameter containers that call into ops.

Each layer owns named Parameters, computes its static output shape (per
sample, batch dim dropped), and applies itself to a Tensor. Activations are
part of the weighted layers, mirroring how model summaries count them.
"""

import numpy as np

from ..errors import ShapeError
from . import ops
from .tensor import Parameter, Tensor


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int,
                   dtype=np.float32) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


_ACTIVATIONS = ("linear", "relu", "sigmoid", "softmax", "log_softmax")


def _activate(x: Tensor, activation: str) -> Tensor:
    if activation == "linear":
        return x
    if activation == "relu":
        return x.relu()
    if activation == "sigmoid":
        return x.sigmoid()
    if activation == "softmax":
        return ops.softmax(x)
    if activation == "log_softmax":
        return ops.log_softmax(x)
    raise ValueError(f"unknown activation {activation!r}")


class Layer:
    """Base class; subclasses fill in params and the forward rule."""

    def __init__(self, name: str):
        self.name = name
        self.params: list[Parameter] = []
        self.frozen = False

    @property
    def kind(self) -> str:
        return type(self).__name__

    def param_count(self) -> int:
        return sum(p.data.size for p in self.params)

    def out_shape(self, in_shape: tuple) -> tuple:
        return in_shape

    def forward(self, x: Tensor, mode: str = "train", rng=None, label=None) -> Tensor:
        raise NotImplementedError

    def set_trainable(self, flag: bool) -> None:
        self.frozen = not flag
        never = getattr(self, "_never_trainable", ())
        for p in self.params:
            p.set_trainable(flag and p.name not in never)

    def astype(self, dtype) -> None:
        for p in self.params:
            p.data = p.data.astype(dtype)
            p.grad = np.zeros_like(p.data)

    def __repr__(self):
        return f"{self.kind}({self.name})"


class Conv1D(Layer):
    def __init__(self, name: str, c_in: int, c_out: int, kernel_size: int,
                 rng: np.random.Generator, dilation: int = 1,
                 padding: str = "valid", activation: str = "relu"):
        super().__init__(name)
        assert activation in _ACTIVATIONS
        self.c_in, self.c_out = c_in, c_out
        self.kernel_size, self.dilation, self.padding = kernel_size, dilation, padding
        self.activation = activation
        w = glorot_uniform(rng, (kernel_size, c_in, c_out),
                           fan_in=kernel_size * c_in, fan_out=kernel_size * c_out)
        self.weight = Parameter(w, f"{name}.weight")
        self.bias = Parameter(np.zeros(c_out, dtype=np.float32), f"{name}.bias")
        self.params = [self.weight, self.bias]

    def out_shape(self, in_shape):
        t, c = in_shape
        if c != self.c_in:
            raise ShapeError(f"{self.name}: expected {self.c_in} channels, got {c}")
        if self.padding == "same" or t is None:
            return (t, self.c_out)
        return (t - (self.kernel_size - 1) * self.dilation, self.c_out)

    def forward(self, x, mode="train", rng=None, label=None):
        out = ops.conv1d(x, self.weight, self.bias, dilation=self.dilation,
                         padding=self.padding)
        return _activate(out, self.activation)


class Dense(Layer):
    def __init__(self, name: str, d_in: int, d_out: int, rng: np.random.Generator,
                 activation: str = "linear"):
        super().__init__(name)
        assert activation in _ACTIVATIONS
        self.d_in, self.d_out = d_in, d_out
        self.activation = activation
        w = glorot_uniform(rng, (d_in, d_out), fan_in=d_in, fan_out=d_out)
        self.weight = Parameter(w, f"{name}.weight")
        self.bias = Parameter(np.zeros(d_out, dtype=np.float32), f"{name}.bias")
        self.params = [self.weight, self.bias]

    def out_shape(self, in_shape):
        if len(in_shape) != 1 or in_shape[0] != self.d_in:
            raise ShapeError(f"{self.name}: expected ({self.d_in},) input, got {in_shape}")
        return (self.d_out,)

    def forward(self, x, mode="train", rng=None, label=None):
        return _activate(ops.dense(x, self.weight, self.bias), self.activation)


class BatchNorm1D(Layer):
    """Per-channel batch norm. Counts 4C params: gain, bias, running mean/var.

    A frozen BatchNorm1D always runs in inference mode so its running
    statistics stay bit-identical.
    """

    _never_trainable = ()

    def __init__(self, name: str, channels: int, momentum: float = 0.9):
        super().__init__(name)
        self.channels = channels
        self.momentum = momentum
        self.gamma = Parameter(np.ones(channels, dtype=np.float32), f"{name}.gamma")
        self.beta = Parameter(np.zeros(channels, dtype=np.float32), f"{name}.beta")
        self.running_mean = Parameter(np.zeros(channels, dtype=np.float32),
                                      f"{name}.running_mean", trainable=False)
        self.running_var = Parameter(np.ones(channels, dtype=np.float32),
                                     f"{name}.running_var", trainable=False)
        self._never_trainable = (self.running_mean.name, self.running_var.name)
        self.params = [self.gamma, self.beta, self.running_mean, self.running_var]

    def forward(self, x, mode="train", rng=None, label=None):
        if self.frozen:
            mode = "infer"
        return ops.batchnorm1d(x, self.gamma, self.beta,
                               self.running_mean, self.running_var,
                               mode=mode, momentum=self.momentum)


class MaxPool1D(Layer):
    def __init__(self, name: str, pool: int):
        super().__init__(name)
        self.pool = pool

    def out_shape(self, in_shape):
        t, c = in_shape
        return (None if t is None else t // self.pool, c)

    def forward(self, x, mode="train", rng=None, label=None):
        return ops.maxpool1d(x, self.pool)


class GlobalAvgPool1D(Layer):
    def out_shape(self, in_shape):
        return (in_shape[1],)

    def forward(self, x, mode="train", rng=None, label=None):
        return ops.global_avg_pool(x)


class Upsample1D(Layer):
    def __init__(self, name: str, factor: int):
        super().__init__(name)
        self.factor = factor

    def out_shape(self, in_shape):
        t, c = in_shape
        return (None if t is None else t * self.factor, c)

    def forward(self, x, mode="train", rng=None, label=None):
        return ops.upsample1d(x, self.factor)


class StatsPooling(Layer):
    def out_shape(self, in_shape):
        return (2 * in_shape[1],)

    def forward(self, x, mode="train", rng=None, label=None):
        return ops.stats_pool(x)


class Dropout(Layer):
    def __init__(self, name: str, rate: float = 0.3):
        super().__init__(name)
        self.rate = rate

    def forward(self, x, mode="train", rng=None, label=None):
        if mode == "train" and self.rate > 0.0 and rng is None:
            raise ValueError(f"{self.name}: train-mode dropout needs an rng")
        return ops.dropout(x, self.rate, rng, mode)


class EmbeddingConcat(Layer):
    """Label embedding appended after the feature frames (+5 time steps)."""

    def __init__(self, name: str, dim: int, rng: np.random.Generator, rows: int = 2):
        super().__init__(name)
        self.dim = dim
        table = rng.uniform(-0.05, 0.05, size=(rows, dim)).astype(np.float32)
        self.table = Parameter(table, f"{name}.table")
        self.params = [self.table]

    def out_shape(self, in_shape):
        t, c = in_shape
        if c != self.dim:
            raise ShapeError(f"{self.name}: expected {self.dim} channels, got {c}")
        return (None if t is None else t + 5, c)

    def forward(self, x, mode="train", rng=None, label=None):
        if label is None:
            raise ValueError(f"{self.name}: forward requires a label")
        return ops.embedding_concat(x, self.table, label)
