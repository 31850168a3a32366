"""ModelGraph: a named sequence of layers with freeze and summary support."""

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor


class ModelGraph:
    def __init__(self, name: str, layers: list, input_shape: tuple):
        self.name = name
        self.layers = list(layers)
        self.input_shape = tuple(input_shape)
        names = [l.name for l in self.layers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate layer names in graph {name!r}")
        self._by_name = {l.name: l for l in self.layers}
        # fail fast on inconsistent wiring
        self.output_shapes()

    def __getitem__(self, layer_name: str):
        return self._by_name[layer_name]

    def __contains__(self, layer_name: str) -> bool:
        return layer_name in self._by_name

    def parameters(self) -> list:
        return [p for layer in self.layers for p in layer.params]

    def trainable_parameters(self) -> list:
        return [p for p in self.parameters() if p.trainable]

    def count_params(self) -> dict:
        total = trainable = 0
        for p in self.parameters():
            total += p.data.size
            if p.trainable:
                trainable += p.data.size
        return {"total": total, "trainable": trainable,
                "non_trainable": total - trainable}

    def output_shapes(self) -> list:
        """Static per-sample shape after each layer, starting from input_shape."""
        shapes = []
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.out_shape(shape)
            shapes.append(shape)
        return shapes

    @property
    def output_shape(self) -> tuple:
        return self.output_shapes()[-1]

    def forward(self, x, mode: str = "train", rng=None, label=None) -> Tensor:
        if not isinstance(x, Tensor):
            x = Tensor(np.asarray(x))
        if x.data.ndim == len(self.input_shape):
            x = Tensor(x.data[None], requires_grad=x.requires_grad)
        got = x.data.shape[1:]
        ok = len(got) == len(self.input_shape) and all(
            e is None or e == g for e, g in zip(self.input_shape, got))
        if not ok:
            raise ShapeError(
                f"{self.name}: expected input {self.input_shape}, got {got}")
        out = x
        for layer in self.layers:
            out = layer.forward(out, mode=mode, rng=rng, label=label)
        return out

    def freeze(self, layer_names) -> None:
        for name in layer_names:
            self._by_name[name].set_trainable(False)

    def freeze_all(self) -> None:
        for layer in self.layers:
            layer.set_trainable(False)

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def astype(self, dtype) -> None:
        for layer in self.layers:
            layer.astype(dtype)

    def summary(self) -> str:
        rows = [("Layer", "Kind", "Output Shape", "Param #", "Trainable")]
        for layer, shape in zip(self.layers, self.output_shapes()):
            rows.append((layer.name, layer.kind, str(shape),
                         str(layer.param_count()), "no" if layer.frozen else "yes"))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                 for row in rows]
        counts = self.count_params()
        lines.append(f"Total params: {counts['total']} "
                     f"(trainable {counts['trainable']}, "
                     f"non-trainable {counts['non_trainable']})")
        return "\n".join(lines)

    def __repr__(self):
        return f"ModelGraph({self.name}, {len(self.layers)} layers)"
