"""Command-line interface.

Subcommands: synth-data, featurize, train, convert, evaluate.  Every run
creates a fresh directory under --out named ``<command>-<timestamp>-seed<N>``
and writes all artifacts there, including a ``run_config.txt`` with the fully
resolved options.  Exit codes: 0 success, 2 usage, 3 I/O or data failure,
4 numeric failure (non-finite loss), 5 checkpoint/model mismatch.
"""

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import report
from .corpus import (CLASS_NAMES, SynthSpec, build_manifest, child_seed,
                     read_manifest)
from .dsp import (TransformState, log_standardize, mfcc, read_wav,
                  stft_magnitude, write_features, write_wav)
from .engine import Adam, Tensor, checkpoint
from .errors import (CheckpointError, DataError, FormatError, LabelError,
                     NumericError, ShapeError, StateError, TooShortError,
                     UnsupportedFormatError, WiringError)
from .metrics import classification_report, eer, min_dcf
from .models import (AccentLabel, MetricsLog, assemble_converter_trainer,
                     build_cnn_classifier, build_decoder, build_encoder,
                     build_mfcc_dataset, build_spectro_dataset,
                     build_tdnn_classifier, convert, eval_batched,
                     eval_sequences, fit_state, pretrain_and_transfer,
                     train_batched, train_converter)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_MODEL = 5


class UsageError(Exception):
    """Bad flag combination or value detected after argparse."""


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ACCENTLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"ACCENTLAB_SEED must be an integer, got {env!r}")
    return 0


def _make_run_dir(out, command: str, seed: int) -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    base = Path(out) / f"{command}-{stamp}-seed{seed}"
    run_dir, n = base, 1
    while run_dir.exists():
        n += 1
        run_dir = base.with_name(f"{base.name}-{n}")
    run_dir.mkdir(parents=True)
    return run_dir


def _write_config(run_dir: Path, command: str, options: dict) -> None:
    lines = [f"command={command}"]
    lines += [f"{k}={v}" for k, v in sorted(options.items())]
    (run_dir / "run_config.txt").write_text("\n".join(lines) + "\n",
                                            encoding="utf-8")


def _write_freeze_report(run_dir: Path, graph) -> None:
    lines = [f"{'layer':<16}{'kind':<16}{'params':>8}  state"]
    for layer in graph.layers:
        state = "frozen" if layer.frozen else "trainable"
        if layer.param_count() == 0:
            state = "-"
        lines.append(f"{layer.name:<16}{layer.kind:<16}{layer.param_count():>8}  {state}")
    counts = graph.count_params()
    lines.append(f"total={counts['total']} trainable={counts['trainable']} "
                 f"non_trainable={counts['non_trainable']}")
    text = "\n".join(lines)
    (run_dir / "freeze_report.txt").write_text(text + "\n", encoding="utf-8")
    print(text)


# ---------------------------------------------------------------- synth-data

def cmd_synth_data(args) -> int:
    seed = _resolve_seed(args)
    try:
        spec = SynthSpec(speakers_per_class=args.speakers_per_class,
                         utts_per_speaker=args.utts_per_speaker,
                         duration_range=(args.duration_min, args.duration_max),
                         seed=seed)
    except DataError as exc:
        raise UsageError(str(exc))
    run_dir = _make_run_dir(args.out, "synth-data", seed)
    _write_config(run_dir, "synth-data", {
        "speakers_per_class": spec.speakers_per_class,
        "utts_per_speaker": spec.utts_per_speaker,
        "duration_min": spec.duration_range[0],
        "duration_max": spec.duration_range[1],
        "seed": seed, "out": args.out,
    })
    manifest = build_manifest(spec, run_dir)
    counts = manifest.counts()
    for cls in CLASS_NAMES:
        n_train = counts.get((cls, "train"), 0)
        n_test = counts.get((cls, "test"), 0)
        print(f"{cls}: train={n_train} test={n_test}")
    print(f"{len(manifest)} utterances total")
    print(f"manifest: {run_dir / 'manifest.csv'}")
    print(f"run directory: {run_dir}")
    return EXIT_OK


# ----------------------------------------------------------------- featurize

def cmd_featurize(args) -> int:
    seed = _resolve_seed(args)
    manifest = read_manifest(args.manifest)
    run_dir = _make_run_dir(args.out, "featurize", seed)
    _write_config(run_dir, "featurize", {
        "manifest": args.manifest, "kind": args.kind,
        "seed": seed, "out": args.out,
    })
    feat_dir = run_dir / "features"
    feat_dir.mkdir()
    state = None
    if args.kind == "spectrogram":
        state = fit_state(manifest)
        state.save(run_dir / "state.json")

    index_rows = []
    for rec in manifest.records:
        signal = read_wav(manifest.resolve(rec))
        if args.kind == "spectrogram":
            feat = log_standardize(stft_magnitude(signal), state).astype(np.float32)
        else:
            m = mfcc(signal)
            feat = (m - m.mean(axis=0, keepdims=True)).astype(np.float32)
        path = feat_dir / f"{rec.utt_id}.acft"
        write_features(path, feat)
        index_rows.append((rec.utt_id, f"features/{rec.utt_id}.acft",
                           feat.shape[0], feat.shape[1], rec.split,
                           rec.accent_class))

    with open(run_dir / "features.csv", "w", encoding="utf-8") as fh:
        fh.write("utt_id,path,frames,dim,split,accent_class\n")
        for row in index_rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    print(f"wrote {len(index_rows)} {args.kind} feature files")
    print(f"run directory: {run_dir}")
    return EXIT_OK


# --------------------------------------------------------------------- train

def _train_cnn(args, manifest, run_dir, seed) -> None:
    state = fit_state(manifest)
    state.save(run_dir / "state.json")
    pad_rng = np.random.default_rng(child_seed(seed, "pad"))
    train_ds = build_spectro_dataset(manifest, "train", state, rng=pad_rng)
    test_ds = build_spectro_dataset(manifest, "test", state, rng=pad_rng)
    graph = build_cnn_classifier(seed=seed)
    opt = Adam(graph.parameters(), lr=args.lr)
    log = MetricsLog()
    train_batched(graph, opt, train_ds, test_ds, epochs=args.epochs,
                  batch_size=args.batch_size,
                  rng=np.random.default_rng(child_seed(seed, "train")),
                  log=log)
    checkpoint.save(graph, str(run_dir / "cnn"))
    log.save(run_dir / "metrics.csv")
    report.plot_metrics(run_dir / "metrics.png", log.rows, title="cnn training")
    if args.freeze_report:
        _write_freeze_report(run_dir, graph)
    print(f"final test accuracy: {log.last('test', 'accuracy'):.4f}")
    print(f"checkpoint: {run_dir / 'cnn'}.idx")


def _train_tdnn(args, manifest, run_dir, seed) -> None:
    log = MetricsLog()
    graph, _ = pretrain_and_transfer(
        manifest, seed=seed, phase1_epochs=args.phase1_epochs,
        phase2_epochs=args.epochs, phase2_batch=args.batch_size,
        phase2_lr=args.lr, phase2_momentum=args.momentum, log=log)
    checkpoint.save(graph, str(run_dir / "tdnn"))
    log.save(run_dir / "metrics.csv")
    report.plot_metrics(run_dir / "metrics.png", log.rows, title="tdnn transfer")
    if args.freeze_report:
        _write_freeze_report(run_dir, graph)
    print(f"final test accuracy: {log.last('test', 'accuracy'):.4f}")
    print(f"checkpoint: {run_dir / 'tdnn'}.idx")


def _train_converter(args, manifest, run_dir, seed) -> None:
    if not args.classifier:
        raise UsageError("--classifier is required when training the converter")
    classifier = build_cnn_classifier(seed=0)
    checkpoint.load(classifier, args.classifier)
    if args.state:
        state = TransformState.load(args.state)
    else:
        state = fit_state(manifest)
    state.save(run_dir / "state.json")

    pad_rng = np.random.default_rng(child_seed(seed, "pad"))
    train_ds = build_spectro_dataset(manifest, "train", state, rng=pad_rng)
    test_ds = build_spectro_dataset(manifest, "test", state, rng=pad_rng)
    encoder = build_encoder(seed=child_seed(seed, "encoder"))
    decoder = build_decoder(seed=child_seed(seed, "decoder"))
    trainer = assemble_converter_trainer(encoder, decoder, classifier,
                                         w_cls=args.w_cls, w_dec=args.w_dec)
    log = MetricsLog()
    train_converter(trainer, train_ds, test_ds, epochs=args.epochs,
                    batch_size=args.batch_size, lr=args.lr,
                    rng=np.random.default_rng(child_seed(seed, "train")),
                    log=log)
    checkpoint.save(encoder, str(run_dir / "encoder"))
    checkpoint.save(decoder, str(run_dir / "decoder"))
    log.save(run_dir / "metrics.csv")
    report.plot_metrics(run_dir / "metrics.png", log.rows,
                        title="converter training")
    if args.freeze_report:
        _write_freeze_report(run_dir, trainer.classifier)
    print(f"final test loss: {log.last('test', 'loss_total'):.4f} "
          f"(cls {log.last('test', 'loss_cls'):.4f}, "
          f"dec {log.last('test', 'loss_dec'):.4f})")
    print(f"checkpoints: {run_dir / 'encoder'}.idx, {run_dir / 'decoder'}.idx")


_TRAIN_DEFAULTS = {
    # model: (epochs, batch_size, lr)
    "cnn": (25, 128, 1e-3),
    "tdnn": (40, 128, 0.05),
    "converter": (25, 128, 1e-3),
}


def cmd_train(args) -> int:
    seed = _resolve_seed(args)
    d_epochs, d_batch, d_lr = _TRAIN_DEFAULTS[args.model]
    args.epochs = d_epochs if args.epochs is None else args.epochs
    args.batch_size = d_batch if args.batch_size is None else args.batch_size
    args.lr = d_lr if args.lr is None else args.lr
    if args.epochs < 1 or args.batch_size < 1 or args.lr <= 0:
        raise UsageError("--epochs/--batch-size must be >= 1 and --lr > 0")

    manifest = read_manifest(args.manifest)
    run_dir = _make_run_dir(args.out, "train", seed)
    _write_config(run_dir, "train", {
        "model": args.model, "manifest": args.manifest, "epochs": args.epochs,
        "batch_size": args.batch_size, "lr": args.lr, "seed": seed,
        "out": args.out, "momentum": args.momentum,
        "phase1_epochs": args.phase1_epochs, "classifier": args.classifier,
        "state": args.state, "w_cls": args.w_cls, "w_dec": args.w_dec,
        "freeze_report": args.freeze_report,
    })
    if args.model == "cnn":
        _train_cnn(args, manifest, run_dir, seed)
    elif args.model == "tdnn":
        _train_tdnn(args, manifest, run_dir, seed)
    else:
        _train_converter(args, manifest, run_dir, seed)
    print(f"run directory: {run_dir}")
    return EXIT_OK


# ------------------------------------------------------------------ evaluate

def _eval_probs(graph, features, batch_size: int = 128) -> np.ndarray:
    """Class probabilities for fixed-size features, batched for memory."""
    out = []
    for start in range(0, len(features), batch_size):
        chunk = features[start:start + batch_size]
        pred = graph.forward(Tensor(chunk), mode="infer").data
        out.append(pred)
    probs = np.concatenate(out, axis=0)
    if probs.max() <= 0.0:  # log-probabilities
        probs = np.exp(probs)
    return probs


def _eval_one(model: str, ckpt: str, manifest, split: str, state_path):
    """Returns (loss, cm, accuracy, macro_f1, probs, true_labels, n)."""
    if model == "cnn":
        graph = build_cnn_classifier(seed=0)
        checkpoint.load(graph, ckpt)
        if state_path:
            state = TransformState.load(state_path)
        else:
            sibling = Path(ckpt).parent / "state.json"
            state = (TransformState.load(sibling) if sibling.exists()
                     else fit_state(manifest))
        ds = build_spectro_dataset(manifest, split, state)
        loss, _, preds = eval_batched(graph, ds.features, ds.labels)
        probs = _eval_probs(graph, ds.features)
        true = ds.labels
    else:
        graph = build_tdnn_classifier(seed=0)
        checkpoint.load(graph, ckpt)
        ds = build_mfcc_dataset(manifest, split)
        loss, _, preds = eval_sequences(graph, ds.features, ds.labels)
        rows = [graph.forward(Tensor(f[None]), mode="infer").data[0]
                for f in ds.features]
        probs = np.exp(np.stack(rows))
        true = ds.labels
    cm, acc, macro_f1 = classification_report(true, preds, len(CLASS_NAMES),
                                              class_names=CLASS_NAMES)
    return loss, cm, acc, macro_f1, probs, true, len(ds.labels)


def cmd_evaluate(args) -> int:
    seed = _resolve_seed(args)
    if (args.checkpoint2 is None) != (args.model2 is None):
        raise UsageError("--checkpoint2 and --model2 must be given together")
    manifest = read_manifest(args.manifest)
    run_dir = _make_run_dir(args.out, "evaluate", seed)
    _write_config(run_dir, "evaluate", {
        "model": args.model, "checkpoint": args.checkpoint,
        "model2": args.model2, "checkpoint2": args.checkpoint2,
        "manifest": args.manifest, "split": args.split, "state": args.state,
        "seed": seed, "out": args.out,
    })

    candidates = [(args.model, args.checkpoint)]
    if args.checkpoint2 is not None:
        candidates.append((args.model2, args.checkpoint2))

    summary_rows = []
    ovr_rows = []
    accuracies = []
    recalls = []
    for i, (model, ckpt) in enumerate(candidates):
        tag = model if len(candidates) == 1 or args.model != args.model2 \
            else f"{model}{i + 1}"
        loss, cm, acc, macro_f1, probs, true, n = _eval_one(
            model, ckpt, manifest, args.split, args.state)
        recalls.append((tag, cm.normalized().diagonal()))
        cm.to_csv(run_dir / f"confusion_{tag}.csv")
        cm.to_csv(run_dir / f"confusion_{tag}_normalized.csv", normalized=True)
        report.plot_confusion(run_dir / f"confusion_{tag}.png", cm,
                              title=f"{tag} ({args.split})")
        summary_rows.append((tag, ckpt, args.split, n, loss, acc, macro_f1))
        accuracies.append(acc)
        for c, cls in enumerate(CLASS_NAMES):
            is_target = (true == c)
            if 0 < is_target.sum() < len(true):
                scores = probs[:, c]
                ovr_rows.append((tag, cls, eer(scores, is_target),
                                 min_dcf(scores, is_target, 0.01)))
        print(f"{tag}: split={args.split} n={n} loss={loss:.4f} "
              f"accuracy={acc:.4f} macro_f1={macro_f1:.4f}")

    with open(run_dir / "eval.csv", "w", encoding="utf-8") as fh:
        fh.write("model,checkpoint,split,n_utterances,loss,accuracy,macro_f1\n")
        for tag, ckpt, split, n, loss, acc, f1 in summary_rows:
            fh.write(f"{tag},{ckpt},{split},{n},{loss:.6f},{acc:.6f},{f1:.6f}\n")
    with open(run_dir / "ovr_metrics.csv", "w", encoding="utf-8") as fh:
        fh.write("model,accent_class,eer,min_dcf\n")
        for tag, cls, e, d in ovr_rows:
            fh.write(f"{tag},{cls},{e:.6f},{d:.6f}\n")
    if len(accuracies) == 2:
        for tag, diag in recalls:
            best = CLASS_NAMES[int(np.argmax(diag))]
            worst = CLASS_NAMES[int(np.argmin(diag))]
            print(f"{tag}: best classified {best}, worst classified {worst}")
        print(f"accuracy delta ({summary_rows[1][0]} - {summary_rows[0][0]}): "
              f"{accuracies[1] - accuracies[0]:+.4f}")
    print(f"run directory: {run_dir}")
    return EXIT_OK


# ------------------------------------------------------------------- convert

def cmd_convert(args) -> int:
    seed = _resolve_seed(args)
    label = AccentLabel.from_name(args.accent)  # LabelError lists valid names
    state = TransformState.load(args.state)
    encoder = build_encoder(seed=0)
    checkpoint.load(encoder, args.encoder)
    decoder = build_decoder(seed=0)
    checkpoint.load(decoder, args.decoder)
    signal = read_wav(args.input)

    run_dir = _make_run_dir(args.out, "convert", seed)
    _write_config(run_dir, "convert", {
        "input": args.input, "accent": args.accent, "encoder": args.encoder,
        "decoder": args.decoder, "state": args.state,
        "gl_iterations": args.gl_iterations, "seed": seed, "out": args.out,
    })
    result = convert(signal, label, encoder, decoder, state,
                     gl_iterations=args.gl_iterations,
                     crop_rng=np.random.default_rng(child_seed(seed, "crop")))

    write_wav(run_dir / "converted.wav", result.signal)
    write_features(run_dir / "input_features.acft", result.input_features)
    write_features(run_dir / "output_features.acft", result.output_features)
    report.write_ppm(run_dir / "input_spectrogram.ppm", result.input_features)
    report.write_ppm(run_dir / "output_spectrogram.ppm", result.output_features)
    report.plot_spectrogram_pair(run_dir / "spectrograms.png",
                                 result.input_features, result.output_features,
                                 titles=("input", f"output ({label.name})"))
    report.plot_waveform_pair(run_dir / "waveforms.png", signal, result.signal)
    report.write_waveform_csv(run_dir / "input_waveform.csv", signal)
    report.write_waveform_csv(run_dir / "output_waveform.csv", result.signal)
    print(f"converted {args.input} -> {label.name}")
    print(f"converted audio: {run_dir / 'converted.wav'}")
    print(f"run directory: {run_dir}")
    return EXIT_OK


# -------------------------------------------------------------------- parser

def _add_seed_out(p) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: $ACCENTLAB_SEED or 0)")
    p.add_argument("--out", default="runs",
                   help="directory that receives the run directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="accentlab",
        description="Desk-scale accent recognition and conversion lab.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="<command>")

    p = sub.add_parser("synth-data", help="synthesize a labelled tonal corpus")
    p.add_argument("--speakers-per-class", type=int, default=10)
    p.add_argument("--utts-per-speaker", type=int, default=10)
    p.add_argument("--duration-min", type=float, default=1.2)
    p.add_argument("--duration-max", type=float, default=2.2)
    _add_seed_out(p)
    p.set_defaults(func=cmd_synth_data)

    p = sub.add_parser("featurize", help="write feature files for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--kind", choices=("spectrogram", "mfcc"),
                   default="spectrogram")
    _add_seed_out(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train a classifier or the converter")
    p.add_argument("--model", choices=("cnn", "tdnn", "converter"),
                   required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--momentum", type=float, default=0.5,
                   help="tdnn phase-2 SGD momentum")
    p.add_argument("--phase1-epochs", type=int, default=4,
                   help="tdnn speaker-pretraining epochs")
    p.add_argument("--classifier", default=None,
                   help="checkpoint path prefix of the trained cnn "
                        "(converter only)")
    p.add_argument("--state", default=None,
                   help="transform state JSON to reuse (converter only)")
    p.add_argument("--w-cls", type=float, default=1.0)
    p.add_argument("--w-dec", type=float, default=1.0)
    p.add_argument("--freeze-report", action="store_true",
                   help="write and print a per-layer trainability table")
    _add_seed_out(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("convert", help="convert a WAV to a target accent")
    p.add_argument("--input", required=True)
    p.add_argument("--accent", required=True)
    p.add_argument("--encoder", required=True,
                   help="encoder checkpoint path prefix")
    p.add_argument("--decoder", required=True,
                   help="decoder checkpoint path prefix")
    p.add_argument("--state", required=True, help="transform state JSON")
    p.add_argument("--gl-iterations", type=int, default=32)
    _add_seed_out(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("evaluate", help="report metrics for checkpoints")
    p.add_argument("--model", choices=("cnn", "tdnn"), required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--model2", choices=("cnn", "tdnn"), default=None)
    p.add_argument("--checkpoint2", default=None,
                   help="second checkpoint for side-by-side comparison")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", choices=("train", "test"), default="test")
    p.add_argument("--state", default=None,
                   help="transform state JSON (cnn; default: sibling of "
                        "the checkpoint)")
    _add_seed_out(p)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, LabelError) as exc:
        print(f"accentlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CheckpointError, WiringError, ShapeError) as exc:
        print(f"accentlab: model mismatch: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NumericError as exc:
        print(f"accentlab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FormatError, UnsupportedFormatError, TooShortError, DataError,
            StateError, OSError) as exc:
        print(f"accentlab: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
