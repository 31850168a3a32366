"""Dense-tensor reverse-mode autodiff core.

A Tensor wraps one numpy array and remembers how it was produced; calling
backward() on a scalar loss walks the recorded graph in reverse topological
order. Only the generic math lives here; structured network ops (conv,
pooling, batch norm, ...) are in ops.py and attach their own closures via
from_op().
"""

import numpy as np

from ..errors import ShapeError


def unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum grad down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_backward", "_parents")

    def __init__(self, data, requires_grad: bool = False):
        self.data = data if isinstance(data, np.ndarray) else np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._backward = None
        self._parents = ()

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    def accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = g
        else:
            self.grad = self.grad + g

    def backward(self) -> None:
        if self.data.size != 1:
            raise ShapeError("backward() expects a scalar loss tensor")
        topo = []
        visited = set()
        stack = [(self, False)]
        while stack:  # iterative DFS, deep graphs would blow the recursion limit
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # ---- op construction -------------------------------------------------

    @staticmethod
    def from_op(data: np.ndarray, parents, backward) -> "Tensor":
        """Build a graph node; backward is attached only if a parent needs it."""
        out = Tensor(data)
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    # ---- arithmetic ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Tensor):
            other = Tensor(np.asarray(other, dtype=self.data.dtype))
        a, b = self, other
        data = a.data + b.data

        def backward(g):
            if a.requires_grad:
                a.accumulate(unbroadcast(g, a.data.shape))
            if b.requires_grad:
                b.accumulate(unbroadcast(g, b.data.shape))
        return Tensor.from_op(data, (a, b), backward)

    def __mul__(self, other):
        if not isinstance(other, Tensor):
            other = Tensor(np.asarray(other, dtype=self.data.dtype))
        a, b = self, other
        data = a.data * b.data

        def backward(g):
            if a.requires_grad:
                a.accumulate(unbroadcast(g * b.data, a.data.shape))
            if b.requires_grad:
                b.accumulate(unbroadcast(g * a.data, b.data.shape))
        return Tensor.from_op(data, (a, b), backward)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Tensor) else -np.asarray(other))

    def __matmul__(self, other):
        a, b = self, other
        if a.data.ndim != 2 or b.data.ndim != 2:
            raise ShapeError(f"matmul expects 2-D operands, got {a.data.shape} @ {b.data.shape}")
        if a.data.shape[1] != b.data.shape[0]:
            raise ShapeError(f"matmul inner dims differ: {a.data.shape} @ {b.data.shape}")
        data = a.data @ b.data

        def backward(g):
            if a.requires_grad:
                a.accumulate(g @ b.data.T)
            if b.requires_grad:
                b.accumulate(a.data.T @ g)
        return Tensor.from_op(data, (a, b), backward)

    # ---- shape ops ---------------------------------------------------------

    def reshape(self, *shape):
        a = self
        data = a.data.reshape(*shape)

        def backward(g):
            a.accumulate(g.reshape(a.data.shape))
        return Tensor.from_op(data, (a,), backward)

    # ---- activations -------------------------------------------------------

    def relu(self):
        a = self
        data = np.maximum(a.data, 0)

        def backward(g):
            a.accumulate(g * (a.data > 0))
        return Tensor.from_op(data, (a,), backward)

    def sigmoid(self):
        a = self
        data = 1.0 / (1.0 + np.exp(-a.data))

        def backward(g):
            a.accumulate(g * data * (1.0 - data))
        return Tensor.from_op(data, (a,), backward)

    def mean(self):
        a = self
        data = np.asarray(a.data.mean(), dtype=a.data.dtype)

        def backward(g):
            a.accumulate(np.full_like(a.data, g / a.data.size))
        return Tensor.from_op(data, (a,), backward)


class Parameter(Tensor):
    """Named, optionally trainable leaf tensor with persistent gradient storage."""

    __slots__ = ("name", "trainable")

    def __init__(self, value: np.ndarray, name: str, trainable: bool = True):
        super().__init__(np.asarray(value))
        self.name = name
        self.trainable = trainable
        self.requires_grad = trainable
        self.grad = np.zeros_like(self.data)

    def set_trainable(self, flag: bool) -> None:
        self.trainable = flag
        self.requires_grad = flag

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def __repr__(self):
        return f"Parameter({self.name}, shape={self.data.shape}, trainable={self.trainable})"


def concat(tensors, axis: int = 0) -> Tensor:
    """Concatenate tensors along an axis."""
    datas = [t.data for t in tensors]
    data = np.concatenate(datas, axis=axis)
    sizes = [d.shape[axis] for d in datas]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                t.accumulate(g[tuple(idx)].copy())
    return Tensor.from_op(data, tuple(tensors), backward)
