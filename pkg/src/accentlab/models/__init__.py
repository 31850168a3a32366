"""Model architectures, training procedures, and converter pipeline."""

from .architectures import (N_CLASSES, build_cnn_classifier, build_decoder,
                            build_encoder, build_speaker_classifier,
                            build_tdnn_classifier, build_tdnn_head,
                            build_tdnn_trunk)
from .converter import (ConversionResult, ConverterTrainerGraph,
                        assemble_converter_trainer, convert, eval_converter,
                        reconstruction_mse, train_converter,
                        train_decoder_only, train_encoder_only)
from .data import (ArrayDataset, MfccDataset, batch_indices,
                   build_mfcc_dataset, build_spectro_dataset, fit_state,
                   raw_spectrograms)
from .labels import AccentLabel, one_hot_batch, uniform_target
from .training import (METRICS_HEADER, MetricsLog, eval_batched,
                       eval_sequences, train_batched, train_sequences)
from .transfer import (FROZEN_LAYER_NAMES, pretrain_and_transfer,
                       trunk_embeddings)

__all__ = [
    "AccentLabel", "ArrayDataset", "ConversionResult", "ConverterTrainerGraph",
    "FROZEN_LAYER_NAMES", "METRICS_HEADER", "MetricsLog", "MfccDataset",
    "N_CLASSES", "assemble_converter_trainer", "batch_indices",
    "build_cnn_classifier", "build_decoder", "build_encoder",
    "build_mfcc_dataset", "build_speaker_classifier", "build_spectro_dataset",
    "build_tdnn_classifier", "build_tdnn_head", "build_tdnn_trunk", "convert",
    "eval_batched", "eval_converter", "eval_sequences", "fit_state",
    "one_hot_batch", "pretrain_and_transfer", "raw_spectrograms",
    "reconstruction_mse", "train_batched", "train_converter",
    "train_decoder_only", "train_encoder_only", "train_sequences",
    "trunk_embeddings", "uniform_target",
]
