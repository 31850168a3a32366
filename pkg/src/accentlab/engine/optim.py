"""Optimizers. Both skip Parameters whose trainable flag is off."""

import numpy as np


class Optimizer:
    def __init__(self, params):
        self.params = list(params)
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("optimizer needs uniquely named parameters")

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        raise NotImplementedError


class SGDMomentum(Optimizer):
    """Heavy-ball SGD: v <- momentum*v + grad; p <- p - lr*v."""

    def __init__(self, params, lr: float, momentum: float = 0.5):
        super().__init__(params)
        self.lr = lr
        self.momentum = momentum
        self._velocity = {p.name: np.zeros_like(p.data) for p in self.params}

    def step(self) -> None:
        for p in self.params:
            if not p.trainable:
                continue
            v = self._velocity[p.name]
            v *= self.momentum
            v += p.grad
            p.data = p.data - self.lr * v


class Adam(Optimizer):
    def __init__(self, params, lr: float = 0.001, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        super().__init__(params)
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self._m = {p.name: np.zeros_like(p.data) for p in self.params}
        self._v = {p.name: np.zeros_like(p.data) for p in self.params}
        self._t = 0

    def step(self) -> None:
        self._t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1 ** self._t
        bias2 = 1.0 - b2 ** self._t
        for p in self.params:
            if not p.trainable:
                continue
            m = self._m[p.name]
            v = self._v[p.name]
            m *= b1
            m += (1.0 - b1) * p.grad
            v *= b2
            v += (1.0 - b2) * (p.grad * p.grad)
            p.data = p.data - self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)
