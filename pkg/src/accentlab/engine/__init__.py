"""Minimal dense-tensor autodiff engine and layer set."""

from . import checkpoint, ops
from .gradcheck import grad_check
from .graph import ModelGraph
from .layers import (BatchNorm1D, Conv1D, Dense, Dropout, EmbeddingConcat,
                     GlobalAvgPool1D, Layer, MaxPool1D, StatsPooling,
                     Upsample1D, glorot_uniform)
from .losses import binary_crossentropy, categorical_crossentropy, nll_loss
from .optim import Adam, Optimizer, SGDMomentum
from .tensor import Parameter, Tensor, concat

__all__ = [
    "Adam", "BatchNorm1D", "Conv1D", "Dense", "Dropout", "EmbeddingConcat",
    "GlobalAvgPool1D", "Layer", "MaxPool1D", "ModelGraph", "Optimizer",
    "Parameter", "SGDMomentum", "StatsPooling", "Tensor", "Upsample1D",
    "binary_crossentropy", "categorical_crossentropy", "checkpoint", "concat",
    "glorot_uniform", "grad_check", "nll_loss", "ops",
]
