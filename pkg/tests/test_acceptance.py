"""Acceptance gate: one test per shipped criterion, one PASS/FAIL line each.

Run with `python3 -m pytest -v tests/test_acceptance.py` from the repo root.
Each test prints a single `[criterion N] PASS|FAIL — details` line straight
to the terminal (bypassing capture) and then asserts, so the gate's outcome
is readable even inside a long pytest run.  Training criteria execute real
optimization on one CPU; the whole module is marked slow.

Criterion summary and pinned tolerances:

1. architecture fidelity — exact per-layer parameter counts and shape
   traces for all four published models; zero tolerance; < 1 s.
2. gradient correctness — reverse-mode vs central finite differences for
   every layer kind and the categorical/binary/NLL losses, max relative
   error <= 1e-4 over 50 seeded trials; < 2 min.
3. recognition — CNN >= 90% and TDNN transfer >= 80% test accuracy on a
   1000-utterance speaker-disjoint synthetic corpus within 30 epochs;
   <= 45 min combined.
4. freeze invariance — frozen parameters bit-identical after converter
   training and after TDNN phase-2 training; zero tolerance.
5. converter behavior — (a) total trainer loss halves from the first
   training epoch, (b) classifier branch ends within 0.15 of ln 5,
   (c) held-out same-label reconstruction MSE <= 0.01; <= 30 min.
6. anti-pattern — encoder-only training fools the classifier (within 0.05
   of ln 5) while a subsequently trained decoder reconstructs >= 3x worse
   than joint training.  Measured faithfully; see the test docstring —
   the MSE-ratio clause does not reproduce at this scale.
7. dsp/codec — log-standardize round trip <= 1e-6 relative; Griffin-Lim
   error non-increasing and sine round trip <= 0.1; trim_or_pad boundary
   cases T in {1, 255, 256, 257, 1000}.
8. metrics — EER/minDCF exactly equal independent brute-force sweeps on
   100 random 50-point score sets; report matches hand-computed fixtures.
9. reproducibility — same-seed CLI runs emit bit-identical artifacts.
"""

import math
import sys
import time

import numpy as np
import pytest

from accentlab.cli import main
from accentlab.corpus import SynthSpec, build_manifest, child_seed
from accentlab.dsp import (destandardize_exp, fit_transform_state,
                           griffin_lim, log_standardize, stft_magnitude,
                           trim_or_pad)
from accentlab.engine import Adam, Tensor, grad_check
from accentlab.metrics import classification_report, eer, min_dcf
from accentlab.models import (FROZEN_LAYER_NAMES, MetricsLog,
                              assemble_converter_trainer, build_cnn_classifier,
                              build_decoder, build_encoder,
                              build_spectro_dataset, build_tdnn_classifier,
                              fit_state, pretrain_and_transfer,
                              reconstruction_mse, train_batched,
                              train_converter, train_decoder_only,
                              train_encoder_only)
from tests.conftest import make_sine
from tests.test_gradcheck import (autoencoder_like_graph, cnn_like_graph,
                                  tdnn_like_graph)
from tests.test_metrics import eer_oracle, min_dcf_oracle

pytestmark = pytest.mark.slow

LN5 = math.log(5.0)

_CAPSYS = None


@pytest.fixture(autouse=True)
def _route_reports(capsys):
    """Let report() write through pytest's capture so every criterion's
    PASS/FAIL line lands on the live terminal."""
    global _CAPSYS
    _CAPSYS = capsys
    yield
    _CAPSYS = None


def report(criterion: int, passed: bool, detail: str) -> None:
    line = f"[criterion {criterion}] {'PASS' if passed else 'FAIL'} — {detail}"
    if _CAPSYS is not None:
        with _CAPSYS.disabled():
            print("\n" + line, flush=True)
    else:
        print("\n" + line, file=sys.__stdout__, flush=True)
    assert passed, line


# --- criterion 1: architecture fidelity --------------------------------------

CNN_PARAMS = {
    "bn1": 516, "conv1": 129100, "conv2": 100100, "maxpool": 0, "bn2": 400,
    "conv3": 160160, "conv4": 256160, "gap": 0, "dropout": 0, "output": 805,
}
TDNN_PARAMS = {
    "tdnn1": 77312, "tdnn2": 786944, "tdnn3": 786944, "tdnn4": 262656,
    "tdnn5": 769500, "stats_pooling": 0, "tdnn6": 1536512, "fc1": 131328,
    "fc2": 32896, "fc3": 8256, "output": 325,
}
ENCODER_KEY_PARAMS = {"enc_conv1": 206560, "enc_out": 129129}
DECODER_KEY_PARAMS = {"dec_embed": 258, "dec_out": 129129}


def _trace(graph):
    shape, out = graph.input_shape, {}
    for layer in graph.layers:
        shape = layer.out_shape(shape)
        out[layer.name] = tuple(shape)
    return out


def test_criterion_1_architecture_fidelity():
    t0 = time.perf_counter()
    cnn, tdnn = build_cnn_classifier(), build_tdnn_classifier()
    enc, dec = build_encoder(), build_decoder()

    ok = {l.name: l.param_count() for l in cnn.layers} == CNN_PARAMS
    ok &= {l.name: l.param_count() for l in tdnn.layers} == TDNN_PARAMS
    ok &= all({l.name: l.param_count() for l in enc.layers}[k] == v
              for k, v in ENCODER_KEY_PARAMS.items())
    ok &= all({l.name: l.param_count() for l in dec.layers}[k] == v
              for k, v in DECODER_KEY_PARAMS.items())
    totals = (cnn.count_params()["total"], tdnn.count_params()["total"],
              enc.count_params()["total"], dec.count_params()["total"])
    ok &= totals == (647241, 4392673, 1366565, 853347)

    cnn_trace, enc_trace, dec_trace = _trace(cnn), _trace(enc), _trace(dec)
    ok &= cnn_trace["conv1"] == (247, 100)
    ok &= cnn_trace["maxpool"] == (79, 100)
    ok &= cnn_trace["conv4"] == (61, 160)
    ok &= enc_trace["enc_maxpool"] == (32, 160)
    ok &= enc_trace["enc_out"] == (256, 129)
    ok &= dec_trace["dec_embed"] == (261, 129)
    ok &= dec_trace["dec_out"] == (256, 129)

    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    report(1, bool(ok),
           f"totals {totals}, key shapes exact, built+checked in {elapsed:.2f}s")


# --- criterion 2: gradient correctness ----------------------------------------

def test_criterion_2_gradient_correctness():
    from accentlab.engine import (binary_crossentropy,
                                  categorical_crossentropy, nll_loss)
    t0 = time.perf_counter()
    worst, trials = 0.0, 0
    for seed in range(17):
        r = np.random.default_rng(1000 + seed)
        x = r.standard_normal((2, 16, 3))
        target = np.eye(4)[r.integers(0, 4, 2)]
        rep = grad_check(cnn_like_graph(seed), categorical_crossentropy, x,
                         target, seed=seed)
        worst, trials = max(worst, max(rep.values())), trials + 1
    for seed in range(17):
        r = np.random.default_rng(2000 + seed)
        x = r.standard_normal((2, 12, 4))
        target = np.eye(3)[r.integers(0, 3, 2)]
        rep = grad_check(tdnn_like_graph(seed), nll_loss, x, target, seed=seed)
        worst, trials = max(worst, max(rep.values())), trials + 1
    for seed in range(16):
        r = np.random.default_rng(3000 + seed)
        x = r.standard_normal((2, 6, 4))
        target = r.uniform(0.1, 0.9, (2, 11, 4))
        label = np.eye(5)[r.integers(0, 5, 2)]
        rep = grad_check(autoencoder_like_graph(seed), binary_crossentropy, x,
                         target, label=label, seed=seed)
        worst, trials = max(worst, max(rep.values())), trials + 1
    elapsed = time.perf_counter() - t0
    ok = trials == 50 and worst <= 1e-4 and elapsed < 120.0
    report(2, ok,
           f"{trials} trials, worst relative error {worst:.2e} (tol 1e-4), "
           f"{elapsed:.1f}s")


# --- criterion 3: synthetic recognition ---------------------------------------

def test_criterion_3_recognition(tmp_path_factory):
    t0 = time.perf_counter()
    manifest = build_manifest(SynthSpec(10, 20, seed=0),
                              tmp_path_factory.mktemp("c3corpus"))
    state = fit_state(manifest)
    train_ds = build_spectro_dataset(manifest, "train", state)
    test_ds = build_spectro_dataset(manifest, "test", state)

    cnn = build_cnn_classifier(seed=0)
    clog = MetricsLog()
    train_batched(cnn, Adam(cnn.parameters(), lr=1e-3), train_ds, test_ds,
                  epochs=30, batch_size=128,
                  rng=np.random.default_rng(child_seed(0, "train")),
                  log=clog, early_stop_acc=0.90)
    cnn_acc = clog.last("test", "accuracy")
    cnn_epochs = clog.rows[-1][0]

    tlog = MetricsLog()
    pretrain_and_transfer(manifest, seed=0, log=tlog, early_stop_acc=0.80)
    tdnn_acc = tlog.last("test", "accuracy")
    tdnn_epochs = tlog.rows[-1][0]

    elapsed = time.perf_counter() - t0
    ok = (cnn_acc >= 0.90 and cnn_epochs <= 30 and tdnn_acc >= 0.80
          and elapsed <= 45 * 60)
    report(3, ok,
           f"CNN {cnn_acc:.3f} @ epoch {cnn_epochs} (need >=0.90 within 30), "
           f"TDNN {tdnn_acc:.3f} @ phase-2 epoch {tdnn_epochs} (need >=0.80), "
           f"{elapsed:.0f}s of 2700s")


# --- criteria 4/5/6 shared pipeline -------------------------------------------

class ConverterStudy:
    """One 250-utterance corpus, one classifier, joint + anti-pattern runs."""

    def __init__(self, root):
        t0 = time.perf_counter()
        self.manifest = build_manifest(SynthSpec(5, 10, seed=0), root)
        state = fit_state(self.manifest)
        self.train_ds = build_spectro_dataset(self.manifest, "train", state)
        self.test_ds = build_spectro_dataset(self.manifest, "test", state)
        self.corpus_s = time.perf_counter() - t0

        t0 = time.perf_counter()
        self.classifier = build_cnn_classifier(seed=0)
        train_batched(self.classifier,
                      Adam(self.classifier.parameters(), lr=1e-3),
                      self.train_ds, self.test_ds, epochs=30, batch_size=32,
                      rng=np.random.default_rng(child_seed(0, "train")))
        self.classifier_s = time.perf_counter() - t0

        self.clf_before = {p.name: p.data.tobytes()
                           for p in self.classifier.parameters()}

        t0 = time.perf_counter()
        self.encoder = build_encoder(seed=child_seed(0, "encoder"))
        self.decoder = build_decoder(seed=child_seed(0, "decoder"))
        trainer = assemble_converter_trainer(self.encoder, self.decoder,
                                             self.classifier)
        self.jlog = MetricsLog()
        train_converter(trainer, self.train_ds, self.test_ds, epochs=40,
                        batch_size=128, lr=1e-3,
                        rng=np.random.default_rng(child_seed(0, "conv")),
                        log=self.jlog)
        self.joint_s = time.perf_counter() - t0
        self.mse_joint = reconstruction_mse(self.encoder, self.decoder,
                                            self.test_ds)
        self.clf_after_joint = {p.name: p.data.tobytes()
                                for p in self.classifier.parameters()}

        # anti-pattern: identical hyperparameters, encoder alone first
        enc2 = build_encoder(seed=child_seed(1, "encoder"))
        elog = train_encoder_only(enc2, self.classifier, self.train_ds,
                                  epochs=40, batch_size=128, lr=1e-3,
                                  rng=np.random.default_rng(child_seed(1, "enc")))
        self.anti_cls_final = elog.rows[-1][3]
        dec2 = build_decoder(seed=child_seed(1, "decoder"))
        train_decoder_only(dec2, enc2, self.train_ds, epochs=40,
                           batch_size=128, lr=1e-3,
                           rng=np.random.default_rng(child_seed(1, "dec")))
        self.mse_anti = reconstruction_mse(enc2, dec2, self.test_ds)
        self.clf_after_anti = {p.name: p.data.tobytes()
                               for p in self.classifier.parameters()}


@pytest.fixture(scope="module")
def study(tmp_path_factory):
    return ConverterStudy(tmp_path_factory.mktemp("c56corpus"))


def test_criterion_4_freeze_invariance(study):
    frozen_conv = [n for n in study.clf_before
                   if study.clf_after_joint[n] == study.clf_before[n]
                   and study.clf_after_anti[n] == study.clf_before[n]]
    conv_ok = len(frozen_conv) == len(study.clf_before)

    # TDNN phase 2: same phase 1, different phase-2 length; the frozen trunk
    # must come out bit-identical, the trained head must not.
    short, _ = pretrain_and_transfer(study.manifest, seed=0, phase2_epochs=0)
    long, _ = pretrain_and_transfer(study.manifest, seed=0, phase2_epochs=6)
    trunk_ok = all(
        p.data.tobytes() == q.data.tobytes()
        for name in FROZEN_LAYER_NAMES
        for p, q in zip(short[name].params, long[name].params))
    head_moved = any(
        p.data.tobytes() != q.data.tobytes()
        for p, q in zip(short["output"].params, long["output"].params))

    ok = conv_ok and trunk_ok and head_moved
    report(4, ok,
           f"classifier {len(frozen_conv)}/{len(study.clf_before)} params "
           f"bit-identical through converter+anti-pattern training; TDNN "
           f"trunk ({len(FROZEN_LAYER_NAMES)} frozen layers) bit-identical "
           f"across phase-2 lengths 0 and 6; head moved: {head_moved}")


def test_criterion_5_converter_behavior(study):
    """Loss drop is measured from the first training epoch (the 0th entry of
    the training history, as a Keras-style trainer logs it).  The CSV's
    pre-training evaluation row is reported alongside for reference; it
    starts near the analytic floor because the untrained encoder emits a
    nearly input-independent pattern, which makes a drop measured from it a
    property of the classifier's behavior off-manifold, not of training."""
    tr1 = next(r[2] for r in study.jlog.rows if r[0] == 1 and r[1] == "train")
    tr_fin = study.jlog.last("train", "loss_total")
    drop = 1.0 - tr_fin / tr1
    te0 = next(r[2] for r in study.jlog.rows if r[0] == 0 and r[1] == "test")
    te_fin = study.jlog.last("test", "loss_total")
    pre_drop = 1.0 - te_fin / te0
    gap = abs(study.jlog.last("test", "loss_cls") - LN5)
    budget_s = study.corpus_s + study.classifier_s + study.joint_s

    ok = (drop >= 0.50 and gap <= 0.15 and study.mse_joint <= 0.01
          and budget_s <= 30 * 60)
    report(5, ok,
           f"(a) loss drop {drop:.1%} from first training epoch "
           f"({tr1:.3f}->{tr_fin:.3f}; pre-training eval reading: "
           f"{pre_drop:.1%}), (b) classifier branch within {gap:.4f} of ln5 "
           f"(tol 0.15), (c) held-out recon MSE {study.mse_joint:.6f} "
           f"(tol 0.01), pipeline {budget_s:.0f}s of 1800s")


def test_criterion_6_anti_pattern(study):
    """Faithful reproduction of the separate-training failure mode, shipped
    red on the MSE-ratio clause.

    The anti-pattern trainer (encoder alone against the frozen classifier,
    hyperparameters identical to the joint run) does reach the uniform
    optimum: starting at loss 7.85 it climbs through a confident-wrong
    phase (8.24) and ends within 0.018 of ln 5 — the first clause holds.
    But a decoder trained afterwards reconstructs essentially as well as
    the jointly trained one: MSE 0.00494 vs 0.00532, ratio 0.93 where the
    criterion demands >= 3.  Probed regimes on this corpus: 50 large-batch
    steps -> a small nearly-invertible fooling perturbation (ratio 0.87);
    650 small-batch steps -> divergence into a pinned confident-wrong
    state (loss ~12.9, first clause fails) whose output is still fully
    reconstructible (ratio 1.04); 80 large-batch steps (this recipe) ->
    clean convergence to the optimum, ratio 0.93.  An unbottlenecked
    same-feature-space encoder at this scale fools the classifier without
    discarding content, so the >= 3x separation never materializes under
    honest training; this test reports the measured values rather than a
    rigged decoder."""
    gap = abs(study.anti_cls_final - LN5)
    ratio = study.mse_anti / max(study.mse_joint, 1e-12)
    ok = gap <= 0.05 and ratio >= 3.0
    report(6, ok,
           f"encoder-only classifier loss within {gap:.4f} of ln5 (tol "
           f"0.05); decoder-after MSE {study.mse_anti:.6f} vs joint "
           f"{study.mse_joint:.6f}, ratio {ratio:.2f} (need >=3)")


# --- criterion 7: dsp/codec ----------------------------------------------------

def test_criterion_7_dsp_codec():
    rng = np.random.default_rng(7)
    worst_rt = 0.0
    for _ in range(50):
        mats = [np.abs(rng.standard_normal((rng.integers(20, 80), 129)))
                + 1e-4 for _ in range(4)]
        state = fit_transform_state(mats)
        for m in mats:
            back = destandardize_exp(log_standardize(m, state), state)
            worst_rt = max(worst_rt, float(np.abs(back - m).max()
                                           / np.abs(m).max()))
    rt_ok = worst_rt <= 1e-6

    spec = stft_magnitude(make_sine(1000.0, duration=1.0))
    _, errors = griffin_lim(spec, iterations=60, return_errors=True)
    gl_ok = (np.diff(errors) <= 1e-12).all() and errors[-1] <= 0.1

    pad_ok = True
    for t in (1, 255, 256, 257, 1000):
        m = rng.standard_normal((t, 129)).astype(np.float32)
        out = trim_or_pad(m, rng=np.random.default_rng(0))
        pad_ok &= out.shape == (256, 129)
        if t <= 256:
            pad_ok &= bool((out[:t] == m).all() and (out[t:] == 0).all())
        else:
            pad_ok &= any((out == m[s:s + 256]).all()
                          for s in range(t - 256 + 1))

    ok = rt_ok and gl_ok and pad_ok
    report(7, ok,
           f"log-standardize round trip {worst_rt:.2e} (tol 1e-6); "
           f"Griffin-Lim non-increasing, final sine error {errors[-1]:.4f} "
           f"(tol 0.1); trim_or_pad exact for T in (1,255,256,257,1000)")


# --- criterion 8: metrics oracle equivalence ------------------------------------

def test_criterion_8_metrics_oracles():
    rng = np.random.default_rng(8)
    exact = 0
    for _ in range(100):
        labels = np.r_[np.ones(25, dtype=int), np.zeros(25, dtype=int)]
        scores = np.round(rng.normal(labels * rng.uniform(0.5, 2.0), 1.0), 6)
        s, l = scores.tolist(), labels.tolist()
        match = eer(scores, labels) == eer_oracle(s, l)
        for p in (0.01, 0.5):
            match &= min_dcf(scores, labels, p_target=p) == min_dcf_oracle(s, l, p)
        exact += bool(match)

    cm, acc, macro = classification_report([0, 0, 1, 1], [0, 1, 1, 1], 2)
    hand_ok = (acc == 0.75 and macro == pytest.approx((2 / 3 + 0.8) / 2)
               and cm.counts.tolist() == [[1, 1], [0, 2]])

    ok = exact == 100 and hand_ok
    report(8, ok,
           f"EER and minDCF(p=0.01, 0.5) exactly equal brute-force sweeps on "
           f"{exact}/100 random 50-point sets; hand fixture P/R/F1 exact")


# --- criterion 9: reproducibility ----------------------------------------------

def _snapshot(run_dir):
    return {str(f.relative_to(run_dir)): f.read_bytes()
            for f in sorted(run_dir.rglob("*")) if f.is_file()}


def _twice(argv, tmp_path_factory, command):
    # The exact same command line twice into one root: the run-dir name
    # counter keeps the runs apart, and every byte that lands inside the
    # run directories (run_config.txt included) must match.
    out = tmp_path_factory.mktemp(f"c9-{command}")
    for _ in range(2):
        assert main(argv + ["--out", str(out)]) == 0
    first, second = sorted(p for p in out.iterdir()
                           if p.name.startswith(command + "-"))
    a, b = _snapshot(first), _snapshot(second)
    same_names = a.keys() == b.keys()
    diff = [n for n in a if a[n] != b.get(n)]
    return len(a), same_names and not diff, diff


def test_criterion_9_reproducibility(tmp_path_factory):
    corpus_out = tmp_path_factory.mktemp("c9corpus")
    assert main(["synth-data", "--speakers-per-class", "2",
                 "--utts-per-speaker", "2", "--duration-min", "0.8",
                 "--duration-max", "1.0", "--seed", "11",
                 "--out", str(corpus_out)]) == 0
    (corpus_dir,) = sorted(corpus_out.iterdir())
    manifest = str(corpus_dir / "manifest.csv")

    n_synth, synth_ok, sd = _twice(
        ["synth-data", "--speakers-per-class", "2", "--utts-per-speaker", "2",
         "--duration-min", "0.8", "--duration-max", "1.0", "--seed", "11"],
        tmp_path_factory, "synth-data")
    n_feat, feat_ok, fd = _twice(
        ["featurize", "--manifest", manifest, "--kind", "spectrogram",
         "--seed", "11"], tmp_path_factory, "featurize")
    n_train, train_ok, td = _twice(
        ["train", "--model", "cnn", "--manifest", manifest, "--epochs", "2",
         "--batch-size", "8", "--seed", "3", "--freeze-report"],
        tmp_path_factory, "train")

    ok = synth_ok and feat_ok and train_ok
    report(9, ok,
           f"double runs bit-identical: synth-data {n_synth} files, "
           f"featurize {n_feat} files, train {n_train} files "
           f"(checkpoints, CSVs, PNG figures, WAVs, ACFT) "
           + (f"; diffs {sd + fd + td}" if not ok else ""))
