"""The four model architectures, built layer-for-layer from their summaries.

All Conv1D layers use kernel size 10 except the TDNN's context layers,
whose kernel/dilation pairs realize the published temporal contexts:
[t-2, t+2] -> k5 d1, {t-2, t, t+2} -> k3 d2, {t-3, t, t+3} -> k3 d3,
{t} -> k1. Classifier convs are valid-padded (time shrinks); encoder and
decoder convs are same-padded (time preserved).
"""

import numpy as np

from ..engine import (BatchNorm1D, Conv1D, Dense, Dropout, EmbeddingConcat,
                      GlobalAvgPool1D, MaxPool1D, ModelGraph, StatsPooling,
                      Upsample1D)

N_CLASSES = 5
N_FREQ = 129
N_FRAMES = 256
N_MFCC = 30
DROPOUT_RATE = 0.3
CONV_KERNEL = 10


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def build_tdnn_trunk(rng: np.random.Generator) -> list:
    """Layers tdnn1..tdnn6 (with stats pooling): the x-vector embedding stack."""
    return [
        Conv1D("tdnn1", N_MFCC, 512, 5, rng, dilation=1, activation="relu"),
        Conv1D("tdnn2", 512, 512, 3, rng, dilation=2, activation="relu"),
        Conv1D("tdnn3", 512, 512, 3, rng, dilation=3, activation="relu"),
        Conv1D("tdnn4", 512, 512, 1, rng, activation="relu"),
        Conv1D("tdnn5", 512, 1500, 1, rng, activation="relu"),
        StatsPooling("stats_pooling"),
        Dense("tdnn6", 3000, 512, rng, activation="relu"),
    ]


def build_tdnn_head(rng: np.random.Generator, n_classes: int = N_CLASSES) -> list:
    """The appended classification head: fc1/fc2/fc3/output."""
    return [
        Dense("fc1", 512, 256, rng, activation="relu"),
        Dense("fc2", 256, 128, rng, activation="relu"),
        Dense("fc3", 128, 64, rng, activation="relu"),
        Dense("output", 64, n_classes, rng, activation="log_softmax"),
    ]


def build_tdnn_classifier(n_classes: int = N_CLASSES, seed=0) -> ModelGraph:
    """TDNN accent classifier on (F, 30) MFCC input, log-softmax output."""
    rng = _rng(seed)
    layers = build_tdnn_trunk(rng) + build_tdnn_head(rng, n_classes)
    return ModelGraph("tdnn", layers, input_shape=(None, N_MFCC))


def build_speaker_classifier(trunk: list, n_speakers: int,
                             rng: np.random.Generator) -> ModelGraph:
    """Phase-1 pretraining graph: shared trunk plus a temporary speaker head."""
    head = Dense("speaker_head", 512, n_speakers, rng, activation="log_softmax")
    return ModelGraph("tdnn_speaker", trunk + [head], input_shape=(None, N_MFCC))


def build_cnn_classifier(n_classes: int = N_CLASSES, seed=0) -> ModelGraph:
    """1D-CNN accent classifier on (256, 129) spectrogram input."""
    rng = _rng(seed)
    layers = [
        BatchNorm1D("bn1", N_FREQ),
        Conv1D("conv1", N_FREQ, 100, CONV_KERNEL, rng, activation="relu"),
        Conv1D("conv2", 100, 100, CONV_KERNEL, rng, activation="relu"),
        MaxPool1D("maxpool", 3),
        BatchNorm1D("bn2", 100),
        Conv1D("conv3", 100, 160, CONV_KERNEL, rng, activation="relu"),
        Conv1D("conv4", 160, 160, CONV_KERNEL, rng, activation="relu"),
        GlobalAvgPool1D("gap"),
        Dropout("dropout", DROPOUT_RATE),
        Dense("output", 160, n_classes, rng, activation="softmax"),
    ]
    return ModelGraph("cnn", layers, input_shape=(N_FRAMES, N_FREQ))


def build_encoder(seed=0) -> ModelGraph:
    """Encoder: (256, 129) -> (256, 129), all convs same-padded.

    The final conv is linear: the output is a feature-space representation,
    not a probability map.
    """
    rng = _rng(seed)
    layers = [
        BatchNorm1D("enc_bn1", N_FREQ),
        Conv1D("enc_conv1", N_FREQ, 160, CONV_KERNEL, rng, padding="same", activation="relu"),
        Conv1D("enc_conv2", 160, 160, CONV_KERNEL, rng, padding="same", activation="relu"),
        BatchNorm1D("enc_bn2", 160),
        Conv1D("enc_conv3", 160, 160, CONV_KERNEL, rng, padding="same", activation="relu"),
        Conv1D("enc_conv4", 160, 160, CONV_KERNEL, rng, padding="same", activation="relu"),
        MaxPool1D("enc_maxpool", 8),
        BatchNorm1D("enc_bn3", 160),
        Dropout("enc_dropout", DROPOUT_RATE),
        Conv1D("enc_conv5", 160, 100, CONV_KERNEL, rng, padding="same", activation="relu"),
        Conv1D("enc_conv6", 100, 100, CONV_KERNEL, rng, padding="same", activation="relu"),
        Upsample1D("enc_upsample", 8),
        BatchNorm1D("enc_bn4", 100),
        Conv1D("enc_out", 100, N_FREQ, CONV_KERNEL, rng, padding="same", activation="linear"),
    ]
    return ModelGraph("encoder", layers, input_shape=(N_FRAMES, N_FREQ))


def build_decoder(seed=0) -> ModelGraph:
    """Decoder: (256, 129) features + one-hot label -> (256, 129) in (0, 1).

    The label is embedded as 5 extra frames (261 total); max pooling by 8
    floor-truncates 261 to 32, and the upsample restores 256. The final
    conv carries a sigmoid so the output is a valid BCE prediction.
    """
    rng = _rng(seed)
    layers = [
        EmbeddingConcat("dec_embed", N_FREQ, rng),
        Conv1D("dec_conv1", N_FREQ, 160, CONV_KERNEL, rng, padding="same", activation="relu"),
        Conv1D("dec_conv2", 160, 160, CONV_KERNEL, rng, padding="same", activation="relu"),
        MaxPool1D("dec_maxpool", 8),
        BatchNorm1D("dec_bn1", 160),
        Conv1D("dec_conv3", 160, 100, CONV_KERNEL, rng, padding="same", activation="relu"),
        Conv1D("dec_conv4", 100, 100, CONV_KERNEL, rng, padding="same", activation="relu"),
        Dropout("dec_dropout", DROPOUT_RATE),
        Upsample1D("dec_upsample", 8),
        BatchNorm1D("dec_bn2", 100),
        Conv1D("dec_out", 100, N_FREQ, CONV_KERNEL, rng, padding="same", activation="sigmoid"),
    ]
    return ModelGraph("decoder", layers, input_shape=(N_FRAMES, N_FREQ))
