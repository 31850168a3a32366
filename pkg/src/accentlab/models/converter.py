"""Classifier-guided converter training and inference.

The trainer wires encoder output into both the frozen classifier and the
decoder (two inputs: spectrogram + accent label; two outputs: classifier
probabilities + reconstruction). The classifier branch is scored against a
uniform distribution (CCE), the decoder branch against the original input
features (BCE), and only encoder and decoder weights move.
"""

from dataclasses import dataclass, field

import numpy as np

from ..dsp import (TARGET_FRAMES, Signal, TransformState, destandardize_exp,
                   griffin_lim, log_standardize, stft_magnitude, trim_or_pad)
from ..engine import (Adam, ModelGraph, Tensor, binary_crossentropy,
                      categorical_crossentropy)
from ..errors import DataError, NumericError, WiringError
from .data import ArrayDataset, batch_indices
from .labels import AccentLabel, one_hot_batch, uniform_target
from .training import MetricsLog

FEATURE_SHAPE = (256, 129)


@dataclass
class ConverterTrainerGraph:
    """Joint training graph: encoder + decoder trainable, classifier frozen."""
    encoder: ModelGraph
    decoder: ModelGraph
    classifier: ModelGraph
    w_cls: float = 1.0
    w_dec: float = 1.0
    n_inputs: int = field(default=2, init=False)
    n_outputs: int = field(default=2, init=False)

    def __post_init__(self):
        for graph, which, shape in (
                (self.encoder, "encoder input", self.encoder.input_shape),
                (self.encoder, "encoder output", self.encoder.output_shape),
                (self.decoder, "decoder output", self.decoder.output_shape)):
            if tuple(shape) != FEATURE_SHAPE:
                raise WiringError(f"{which} must be {FEATURE_SHAPE}, got {tuple(shape)}")
        if tuple(self.classifier.input_shape) != tuple(self.encoder.output_shape):
            raise WiringError(
                f"classifier input {self.classifier.input_shape} does not accept "
                f"encoder output {self.encoder.output_shape}")
        if len(self.classifier.output_shape) != 1:
            raise WiringError("classifier must emit a probability vector")
        self.classifier.freeze_all()

    def trainable_parameters(self) -> list:
        return (self.encoder.trainable_parameters()
                + self.decoder.trainable_parameters())

    def forward(self, features: np.ndarray, labels_one_hot: np.ndarray,
                mode: str = "train", rng=None):
        """Returns (total, cls, dec) loss Tensors for one batch.

        The classifier always runs in inference mode: its weights and its
        batch-norm running statistics must stay bit-frozen.
        """
        x = Tensor(np.ascontiguousarray(features))
        enc_out = self.encoder.forward(x, mode=mode, rng=rng)
        probs = self.classifier.forward(enc_out, mode="infer")
        dec_out = self.decoder.forward(enc_out, mode=mode, rng=rng,
                                       label=labels_one_hot)
        loss_cls = categorical_crossentropy(probs, uniform_target(features.shape[0]))
        loss_dec = binary_crossentropy(dec_out, features)
        total = loss_cls * self.w_cls + loss_dec * self.w_dec
        return total, loss_cls, loss_dec


def assemble_converter_trainer(encoder: ModelGraph, decoder: ModelGraph,
                               classifier: ModelGraph, w_cls: float = 1.0,
                               w_dec: float = 1.0) -> ConverterTrainerGraph:
    return ConverterTrainerGraph(encoder, decoder, classifier, w_cls, w_dec)


def eval_converter(trainer: ConverterTrainerGraph, ds: ArrayDataset,
                   batch_size: int = 128):
    """Inference-mode (total, cls, dec) mean losses over a dataset."""
    labels = one_hot_batch(ds.labels)
    sums = np.zeros(3)
    for start in range(0, len(ds), batch_size):
        sl = slice(start, min(start + batch_size, len(ds)))
        losses = trainer.forward(ds.features[sl], labels[sl], mode="infer")
        n = sl.stop - sl.start
        sums += [float(l.data) * n for l in losses]
    return tuple(sums / len(ds))


def train_converter(trainer: ConverterTrainerGraph, train: ArrayDataset,
                    test: ArrayDataset, *, epochs: int, batch_size: int = 128,
                    lr: float = 1e-3, rng: np.random.Generator,
                    log: MetricsLog = None) -> MetricsLog:
    """Joint encoder+decoder training; classifier parameters never move."""
    if len(train) == 0:
        raise DataError("empty training manifest")
    log = log if log is not None else MetricsLog()
    optimizer = Adam(trainer.trainable_parameters(), lr=lr)
    labels = one_hot_batch(train.labels)

    splits = [("train", train)] + ([("test", test)] if test is not None else [])
    for split, ds in splits:
        total, cls, dec = eval_converter(trainer, ds, batch_size)
        log.add(0, split, total, loss_cls=cls, loss_dec=dec)
    for epoch in range(1, epochs + 1):
        sums = np.zeros(3)
        for idx in batch_indices(len(train), batch_size, rng):
            for graph in (trainer.encoder, trainer.decoder):
                graph.zero_grad()
            total, cls, dec = trainer.forward(train.features[idx], labels[idx],
                                              mode="train", rng=rng)
            v = float(total.data)
            if not np.isfinite(v):
                raise NumericError(
                    f"non-finite converter loss at epoch {epoch}, "
                    f"utts {list(train.utt_ids[i] for i in idx[:3])}")
            total.backward()
            optimizer.step()
            sums += [v * idx.size, float(cls.data) * idx.size, float(dec.data) * idx.size]
        t, c, d = sums / len(train)
        log.add(epoch, "train", t, loss_cls=c, loss_dec=d)
        if test is not None:
            t, c, d = eval_converter(trainer, test, batch_size)
            log.add(epoch, "test", t, loss_cls=c, loss_dec=d)
    return log


def reconstruction_mse(encoder: ModelGraph, decoder: ModelGraph,
                       ds: ArrayDataset, batch_size: int = 128) -> float:
    """Same-label reconstruction MSE in scaled feature space (infer mode)."""
    labels = one_hot_batch(ds.labels)
    err = 0.0
    for start in range(0, len(ds), batch_size):
        sl = slice(start, min(start + batch_size, len(ds)))
        enc_out = encoder.forward(Tensor(ds.features[sl]), mode="infer")
        dec_out = decoder.forward(enc_out, mode="infer", label=labels[sl])
        diff = dec_out.data - ds.features[sl]
        err += float((diff * diff).sum())
    return err / (len(ds) * ds.features.shape[1] * ds.features.shape[2])


def train_encoder_only(encoder: ModelGraph, classifier: ModelGraph,
                       train: ArrayDataset, *, epochs: int,
                       batch_size: int = 128, lr: float = 1e-3,
                       rng: np.random.Generator) -> MetricsLog:
    """The separate-training anti-pattern: encoder vs classifier loss alone.

    Nothing anchors the encoder output to the input features, so the
    encoder is free to discard them; reconstruction becomes impossible for
    any decoder trained afterwards.
    """
    classifier.freeze_all()
    log = MetricsLog()
    optimizer = Adam(encoder.trainable_parameters(), lr=lr)
    for epoch in range(1, epochs + 1):
        running = 0.0
        for idx in batch_indices(len(train), batch_size, rng):
            encoder.zero_grad()
            enc_out = encoder.forward(Tensor(train.features[idx]), mode="train", rng=rng)
            probs = classifier.forward(enc_out, mode="infer")
            loss = categorical_crossentropy(probs, uniform_target(idx.size))
            v = float(loss.data)
            if not np.isfinite(v):
                raise NumericError(f"non-finite encoder-only loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            running += v * idx.size
        log.add(epoch, "train", running / len(train), loss_cls=running / len(train))
    return log


def train_decoder_only(decoder: ModelGraph, encoder: ModelGraph,
                       train: ArrayDataset, *, epochs: int,
                       batch_size: int = 128, lr: float = 1e-3,
                       rng: np.random.Generator) -> MetricsLog:
    """Fit a decoder to a frozen encoder's outputs (anti-pattern, phase 2)."""
    encoder.freeze_all()
    log = MetricsLog()
    optimizer = Adam(decoder.trainable_parameters(), lr=lr)
    labels = one_hot_batch(train.labels)
    for epoch in range(1, epochs + 1):
        running = 0.0
        for idx in batch_indices(len(train), batch_size, rng):
            decoder.zero_grad()
            enc_out = encoder.forward(Tensor(train.features[idx]), mode="infer")
            dec_out = decoder.forward(enc_out, mode="train", rng=rng, label=labels[idx])
            loss = binary_crossentropy(dec_out, train.features[idx])
            v = float(loss.data)
            if not np.isfinite(v):
                raise NumericError(f"non-finite decoder-only loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            running += v * idx.size
        log.add(epoch, "train", running / len(train), loss_dec=running / len(train))
    return log


@dataclass(frozen=True)
class ConversionResult:
    signal: Signal
    input_features: np.ndarray   # (256, 129) scaled input to the encoder
    output_features: np.ndarray  # (256, 129) decoder output


def convert(audio: Signal, label: AccentLabel, encoder: ModelGraph,
            decoder: ModelGraph, state: TransformState, *,
            gl_iterations: int = 32, crop_rng=None) -> ConversionResult:
    """Full inference pipeline: audio -> features -> encoder -> decoder -> audio."""
    spec = stft_magnitude(audio)
    feat = trim_or_pad(log_standardize(spec, state), TARGET_FRAMES,
                       rng=crop_rng).astype(np.float32)
    enc_out = encoder.forward(Tensor(feat[None]), mode="infer")
    dec_out = decoder.forward(enc_out, mode="infer", label=label.one_hot[None])
    out_feat = dec_out.data[0]
    magnitude = destandardize_exp(out_feat.astype(np.float64), state)
    signal = griffin_lim(magnitude, iterations=gl_iterations)
    return ConversionResult(signal, feat, out_feat)
