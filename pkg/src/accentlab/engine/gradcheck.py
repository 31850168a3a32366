"""Finite-difference gradient checking.

Converts the graph to float64 in place, compares reverse-mode gradients
against central differences (h = 1e-5) on a random sample of coordinates
per parameter, and reports the max relative error per layer. Dropout is
made repeatable by reseeding the forward rng identically for every
evaluation, so the finite-difference probes see the same masks.
"""

import numpy as np

from .tensor import Tensor


def _relative_error(analytic: float, numeric: float) -> float:
    denom = max(abs(analytic), abs(numeric))
    if denom < 1e-6:
        return abs(analytic - numeric)
    return abs(analytic - numeric) / denom


def grad_check(graph, loss_fn, x, target, *, label=None, mode: str = "train",
               h: float = 1e-5, n_samples: int = 6, seed: int = 0) -> dict:
    """Return {layer_name: max relative error} over sampled coordinates."""
    graph.astype(np.float64)
    x = np.asarray(x, dtype=np.float64)
    dropout_seed = seed + 7919

    def loss_value() -> float:
        rng = np.random.default_rng(dropout_seed)
        out = graph.forward(Tensor(x), mode=mode, rng=rng, label=label)
        return float(loss_fn(out, target).data)

    # analytic pass
    graph.zero_grad()
    rng = np.random.default_rng(dropout_seed)
    out = graph.forward(Tensor(x), mode=mode, rng=rng, label=label)
    loss = loss_fn(out, target)
    loss.backward()
    analytic = {p.name: p.grad.copy() for p in graph.parameters() if p.trainable}

    coords_rng = np.random.default_rng(seed)
    report = {}
    for layer in graph.layers:
        worst = None
        for p in layer.params:
            if not p.trainable:
                continue
            flat = p.data.reshape(-1)
            size = flat.size
            if size <= n_samples:
                picks = np.arange(size)
            else:
                picks = coords_rng.choice(size, size=n_samples, replace=False)
            for i in picks:
                orig = flat[i]
                flat[i] = orig + h
                up = loss_value()
                flat[i] = orig - h
                down = loss_value()
                flat[i] = orig
                numeric = (up - down) / (2.0 * h)
                err = _relative_error(analytic[p.name].reshape(-1)[i], numeric)
                if worst is None or err > worst:
                    worst = err
        if worst is not None:
            report[layer.name] = worst
    return report
