"""Synthetic corpus: mapping, synthesis, manifests, splits, augmentation."""

import numpy as np
import pytest

from accentlab.corpus import (CLASS_NAMES, CLASS_PROVINCES, SilentInputWarning,
                              SynthSpec, UtteranceRecord, augment_additive_noise,
                              build_manifest, child_seed, class_id,
                              expand_threefold, province_to_class, read_manifest,
                              synth_utterance, write_manifest)
from accentlab.dsp import SAMPLE_RATE, Signal, read_wav
from accentlab.errors import DataError, FormatError, UnknownProvinceError

HOP = 160


# --- province mapping -------------------------------------------------------

def test_published_grouping_examples():
    assert province_to_class("chong qing") == "chuan"
    assert province_to_class("guang xi") == "yue"
    assert province_to_class("bei jing") == "guan"
    assert province_to_class("shang hai") == "wu"
    assert province_to_class("hei long jiang") == "dongbei"


def test_thirteen_provinces_total():
    provinces = [p for provs in CLASS_PROVINCES.values() for p in provs]
    assert len(provinces) == 13
    assert len(set(provinces)) == 13
    for p in provinces:
        assert province_to_class(p) in CLASS_NAMES


def test_unlisted_province_rejected():
    for name in ("hu nan", "xin jiang", "Beijing", ""):
        with pytest.raises(UnknownProvinceError):
            province_to_class(name)


def test_class_id_order():
    assert [class_id(c) for c in CLASS_NAMES] == [0, 1, 2, 3, 4]
    with pytest.raises(UnknownProvinceError):
        class_id("mandarin")


# --- synthesis --------------------------------------------------------------

def test_synth_deterministic():
    a = synth_utterance("wu", "spk1", 1.0, np.random.default_rng(5))
    b = synth_utterance("wu", "spk1", 1.0, np.random.default_rng(5))
    np.testing.assert_array_equal(a.samples, b.samples)


def test_synth_amplitude_and_length():
    for cls in CLASS_NAMES:
        sig = synth_utterance(cls, "s", 0.7, np.random.default_rng(1))
        assert len(sig.samples) == int(round(0.7 * SAMPLE_RATE))
        assert np.abs(sig.samples).max() <= 1.0


def test_synth_rejects_bad_args():
    rng = np.random.default_rng(0)
    with pytest.raises(DataError):
        synth_utterance("wu", "s", 0.1, rng)
    with pytest.raises(DataError):
        synth_utterance("wu", "s", 11.0, rng)
    with pytest.raises(DataError):
        synth_utterance("hunanese", "s", 1.0, rng)


def autocorrelation_f0(samples: np.ndarray) -> float:
    """Pitch oracle: median framewise autocorrelation peak in 60-400 Hz.

    Frames below median energy (syllable troughs) are skipped, and a peak
    whose half/third/quarter lag is nearly as strong is snapped up an
    octave — the textbook guard against subharmonic errors.
    """
    frame, hop = 480, 160
    lo, hi = SAMPLE_RATE // 400, SAMPLE_RATE // 60
    x = samples - samples.mean()
    windows = [x[s:s + frame] for s in range(0, len(x) - frame, hop)]
    energies = [float(np.sqrt(np.mean(w * w))) for w in windows]
    cut = np.median(energies)
    estimates = []
    for w, e in zip(windows, energies):
        if e < cut:
            continue
        ac = np.correlate(w, w, mode="full")[frame - 1:]
        if ac[0] <= 0:
            continue
        ac = ac / ac[0]
        best = lo + int(np.argmax(ac[lo:hi]))
        for k in (4, 3, 2):
            cand = int(round(best / k))
            if cand >= lo and ac[cand] >= 0.9 * ac[best]:
                best = cand
                break
        estimates.append(SAMPLE_RATE / best)
    return float(np.median(estimates))


def test_class_mean_f0_separation():
    # 100 samples per class; class means must sit >= 20 Hz apart
    rng = np.random.default_rng(123)
    means = {}
    for cls in CLASS_NAMES:
        estimates = []
        for i in range(100):
            sig = synth_utterance(cls, f"spk{i % 7}", 0.5,
                                  np.random.default_rng(rng.integers(1 << 32)))
            estimates.append(autocorrelation_f0(sig.samples))
        means[cls] = float(np.mean(estimates))
    ordered = sorted(means.values())
    gaps = np.diff(ordered)
    assert (gaps >= 20.0).all(), means


# --- manifests and splits ---------------------------------------------------

@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    spec = SynthSpec(speakers_per_class=5, utts_per_speaker=4,
                     duration_range=(0.6, 0.9), seed=7)
    root = tmp_path_factory.mktemp("corpus")
    return build_manifest(spec, root), root


def test_split_counts(corpus):
    manifest, _ = corpus
    assert len(manifest) == 100
    assert len(manifest.subset(split="train")) == 80
    assert len(manifest.subset(split="test")) == 20
    for cls in CLASS_NAMES:
        assert len(manifest.subset(accent_class=cls)) == 20


def test_split_speaker_disjoint(corpus):
    manifest, _ = corpus
    train = manifest.subset(split="train").speakers()
    test = manifest.subset(split="test").speakers()
    assert train and test
    assert not train & test


def test_records_consistent(corpus):
    manifest, _ = corpus
    ids = [r.utt_id for r in manifest.records]
    assert len(set(ids)) == len(ids)
    for r in manifest.records:
        assert province_to_class(r.province) == r.accent_class


def test_wavs_load_with_declared_duration(corpus):
    manifest, _ = corpus
    for r in manifest.records[::11]:
        sig = read_wav(manifest.resolve(r))
        dur = len(sig.samples) / SAMPLE_RATE
        assert 0.6 - HOP / SAMPLE_RATE <= dur <= 0.9 + HOP / SAMPLE_RATE


def test_manifest_round_trip(corpus, tmp_path):
    manifest, root = corpus
    p = tmp_path / "m.csv"
    write_manifest(manifest, p)
    back = read_manifest(p)
    assert back.records == manifest.records


def test_reproducible_from_spec(tmp_path):
    spec = SynthSpec(speakers_per_class=2, utts_per_speaker=2,
                     duration_range=(0.6, 0.7), seed=3)
    m1 = build_manifest(spec, tmp_path / "a")
    m2 = build_manifest(spec, tmp_path / "b")
    assert m1.records == m2.records
    for r1, r2 in zip(m1.records, m2.records):
        s1 = read_wav(m1.resolve(r1))
        s2 = read_wav(m2.resolve(r2))
        np.testing.assert_array_equal(s1.samples, s2.samples)


def test_manifest_read_rejects_bad_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(FormatError, match="empty"):
        read_manifest(empty)

    bad_header = tmp_path / "hdr.csv"
    bad_header.write_text("utt,who\n")
    with pytest.raises(FormatError, match="header"):
        read_manifest(bad_header)

    dup = tmp_path / "dup.csv"
    dup.write_text("utt_id,path,speaker,province,accent_class,split\n"
                   "u1,a.wav,s,bei jing,guan,train\n"
                   "u1,b.wav,s,bei jing,guan,train\n")
    with pytest.raises(DataError, match="duplicate"):
        read_manifest(dup)

    wrong_cls = tmp_path / "cls.csv"
    wrong_cls.write_text("utt_id,path,speaker,province,accent_class,split\n"
                         "u1,a.wav,s,bei jing,wu,train\n")
    with pytest.raises(DataError, match="inconsistent"):
        read_manifest(wrong_cls)


def test_spec_validation():
    with pytest.raises(DataError):
        SynthSpec(speakers_per_class=1, utts_per_speaker=5)
    with pytest.raises(DataError):
        SynthSpec(speakers_per_class=3, utts_per_speaker=0)
    with pytest.raises(DataError):
        SynthSpec(speakers_per_class=3, utts_per_speaker=1,
                  duration_range=(0.1, 0.2))


def test_child_seed_stable_and_distinct():
    assert child_seed(0, "a") == child_seed(0, "a")
    assert child_seed(0, "a") != child_seed(0, "b")
    assert child_seed(0, "a") != child_seed(1, "a")


# --- augmentation -----------------------------------------------------------

def measured_snr_db(clean: np.ndarray, noisy: np.ndarray) -> float:
    noise = noisy - clean
    return 10.0 * np.log10(np.mean(clean ** 2) / np.mean(noise ** 2))


def test_snr_exact_within_tenth_db():
    t = np.arange(16000) / SAMPLE_RATE
    sig = Signal(0.4 * np.sin(2 * np.pi * 300 * t), SAMPLE_RATE)
    for snr in (0.0, 15.0, 25.0, 40.0):
        out = augment_additive_noise(sig, snr, np.random.default_rng(9))
        assert abs(measured_snr_db(sig.samples, out.samples) - snr) <= 0.1


def test_high_snr_preserves_signal():
    t = np.arange(16000) / SAMPLE_RATE
    sig = Signal(0.4 * np.sin(2 * np.pi * 300 * t), SAMPLE_RATE)
    out = augment_additive_noise(sig, 40.0, np.random.default_rng(2))
    corr = np.corrcoef(sig.samples, out.samples)[0, 1]
    assert corr >= 0.99


def test_snr_out_of_range_rejected():
    sig = Signal(np.ones(100) * 0.1, SAMPLE_RATE)
    for snr in (-1.0, 40.1):
        with pytest.raises(DataError):
            augment_additive_noise(sig, snr, np.random.default_rng(0))


def test_all_zero_input_warns_and_returns_noise():
    sig = Signal(np.zeros(8000), SAMPLE_RATE)
    with pytest.warns(SilentInputWarning):
        out = augment_additive_noise(sig, 20.0, np.random.default_rng(4))
    assert out.samples.any()


def test_threefold_expansion():
    t = np.arange(8000) / SAMPLE_RATE
    sig = Signal(0.3 * np.sin(2 * np.pi * 250 * t), SAMPLE_RATE)
    out = expand_threefold(sig, np.random.default_rng(0))
    assert len(out) == 3
    assert out[0] is sig
    assert not np.array_equal(out[1].samples, out[2].samples)
