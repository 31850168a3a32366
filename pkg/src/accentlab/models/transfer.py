"""Two-phase TDNN transfer learning.

Phase 1 trains the embedding trunk (tdnn1..tdnn6 plus stats pooling) with a
temporary speaker-identification head. Phase 2 discards that head, freezes
the first 7 layers, and trains the appended fc1/fc2/fc3/output stack on
accent labels with SGD momentum (lr 0.05, momentum 0.5).

Because the frozen trunk contains no batch norm or dropout, its output for
a given utterance never changes during phase 2; the head is therefore
trained on precomputed trunk embeddings, which is exactly equivalent to
running the full graph with frozen layers, just much faster.
"""

import numpy as np

from ..corpus import CLASS_NAMES, Manifest
from ..engine import Adam, ModelGraph, SGDMomentum, Tensor
from ..errors import DataError
from .architectures import N_MFCC, build_speaker_classifier, build_tdnn_head, build_tdnn_trunk
from .data import ArrayDataset, MfccDataset, build_mfcc_dataset
from .training import MetricsLog, train_batched, train_sequences

FROZEN_LAYER_NAMES = ("tdnn1", "tdnn2", "tdnn3", "tdnn4", "tdnn5",
                      "stats_pooling", "tdnn6")


def trunk_embeddings(trunk_graph: ModelGraph, features: list) -> np.ndarray:
    """Run each utterance through the trunk; returns (n, 512) float32."""
    out = np.empty((len(features), 512), dtype=np.float32)
    for i, feat in enumerate(features):
        out[i] = trunk_graph.forward(Tensor(feat[None]), mode="infer").data[0]
    return out


def pretrain_and_transfer(manifest: Manifest, *, seed: int = 0,
                          phase1_epochs: int = 4, phase1_batch: int = 16,
                          phase1_lr: float = 1e-3,
                          phase2_epochs: int = 40, phase2_batch: int = 128,
                          phase2_lr: float = 0.05, phase2_momentum: float = 0.5,
                          early_stop_acc: float = None,
                          log: MetricsLog = None):
    """Run both phases; returns (accent ModelGraph, MetricsLog).

    The metrics log holds the phase-2 accent-task rows; phase 1 is a
    pretext task whose loss history is not part of the reported metrics.
    """
    train_ds = build_mfcc_dataset(manifest, "train")
    test_ds = build_mfcc_dataset(manifest, "test")

    speakers = sorted(set(train_ds.speakers))
    if len(speakers) < 2:
        raise DataError("speaker pretraining needs at least 2 training speakers")
    if set(train_ds.labels) != set(range(len(CLASS_NAMES))):
        raise DataError("accent task needs training data for all "
                        f"{len(CLASS_NAMES)} classes")

    rng = np.random.default_rng(seed)
    trunk = build_tdnn_trunk(rng)

    # phase 1: speaker-ID pretext task on the train split
    spk_index = {s: i for i, s in enumerate(speakers)}
    spk_labels = np.array([spk_index[s] for s in train_ds.speakers], dtype=np.int64)
    spk_train = MfccDataset(train_ds.features, spk_labels,
                            train_ds.speakers, train_ds.utt_ids)
    speaker_graph = build_speaker_classifier(trunk, len(speakers), rng)
    train_sequences(speaker_graph, Adam(speaker_graph.parameters(), lr=phase1_lr),
                    spk_train, None, epochs=phase1_epochs,
                    batch_size=phase1_batch, rng=rng, log=MetricsLog())

    # phase 2: freeze the 7 pretrained layers, train the appended head
    trunk_graph = ModelGraph("tdnn_trunk", trunk, input_shape=(None, N_MFCC))
    trunk_graph.freeze(FROZEN_LAYER_NAMES)
    emb_train = ArrayDataset(trunk_embeddings(trunk_graph, train_ds.features),
                             train_ds.labels, train_ds.utt_ids)
    emb_test = ArrayDataset(trunk_embeddings(trunk_graph, test_ds.features),
                            test_ds.labels, test_ds.utt_ids)
    head_layers = build_tdnn_head(rng, len(CLASS_NAMES))
    head_graph = ModelGraph("tdnn_head", head_layers, input_shape=(512,))
    log = train_batched(head_graph,
                        SGDMomentum(head_graph.parameters(), lr=phase2_lr,
                                    momentum=phase2_momentum),
                        emb_train, emb_test, epochs=phase2_epochs,
                        batch_size=phase2_batch, rng=rng, log=log,
                        early_stop_acc=early_stop_acc)

    accent_graph = ModelGraph("tdnn", trunk + head_layers, input_shape=(None, N_MFCC))
    return accent_graph, log
