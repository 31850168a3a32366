"""Corpus manifests: generation, CSV serialization, and splits.

Every utterance derives its own child seed from (master seed, utt_id), so
utterances can be generated in any order — or in parallel — and the corpus
comes out identical.
"""

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dsp import write_wav
from ..errors import DataError, FormatError
from .mapping import CLASS_NAMES, CLASS_PROVINCES, province_to_class
from .synth import MIN_DURATION, CLASS_PROFILES, synth_utterance

MANIFEST_HEADER = ("utt_id", "path", "speaker", "province", "accent_class", "split")
SPLITS = ("train", "test")
TEST_FRACTION = 0.2


@dataclass(frozen=True)
class UtteranceRecord:
    utt_id: str
    path: str  # relative to the manifest's directory
    speaker: str
    province: str
    accent_class: str
    split: str


@dataclass(frozen=True)
class Manifest:
    records: tuple
    root: Path = field(default=Path("."), compare=False)

    def __len__(self):
        return len(self.records)

    def subset(self, split: str = None, accent_class: str = None) -> "Manifest":
        recs = self.records
        if split is not None:
            recs = tuple(r for r in recs if r.split == split)
        if accent_class is not None:
            recs = tuple(r for r in recs if r.accent_class == accent_class)
        return Manifest(recs, self.root)

    def resolve(self, record: UtteranceRecord) -> Path:
        return self.root / record.path

    def speakers(self) -> set:
        return {r.speaker for r in self.records}

    def counts(self) -> dict:
        out = {}
        for r in self.records:
            key = (r.accent_class, r.split)
            out[key] = out.get(key, 0) + 1
        return out


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic corpus."""
    speakers_per_class: int
    utts_per_speaker: int
    duration_range: tuple = (1.2, 2.2)
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.duration_range
        if lo < MIN_DURATION or hi < lo:
            raise DataError(f"bad duration range {self.duration_range}")
        if self.speakers_per_class < 2:
            raise DataError("need at least 2 speakers per class for a speaker-disjoint split")
        if self.utts_per_speaker < 1:
            raise DataError("need at least 1 utterance per speaker")
        bases = [p.base_f0 for p in CLASS_PROFILES.values()]
        contours = [p.contour for p in CLASS_PROFILES.values()]
        if len(set(bases)) != len(bases) or len(set(contours)) != len(contours):
            raise DataError("class profiles must be pairwise distinct")

    @property
    def total_utterances(self) -> int:
        return len(CLASS_NAMES) * self.speakers_per_class * self.utts_per_speaker


def child_seed(master_seed: int, key: str) -> int:
    """Stable per-key seed: first 8 bytes of SHA-256(f'{seed}:{key}')."""
    digest = hashlib.sha256(f"{master_seed}:{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def build_manifest(spec: SynthSpec, out_dir) -> Manifest:
    """Generate WAVs plus manifest.csv under out_dir; returns the manifest.

    The split is speaker-disjoint and stratified: per class, 20% of the
    speakers (at least one) go entirely to the test split.
    """
    out = Path(out_dir)
    (out / "wav").mkdir(parents=True, exist_ok=True)
    split_rng = np.random.default_rng(child_seed(spec.seed, "split"))

    records = []
    for cls in CLASS_NAMES:
        n_spk = spec.speakers_per_class
        n_test = max(1, round(TEST_FRACTION * n_spk))
        test_idx = set(split_rng.choice(n_spk, size=n_test, replace=False).tolist())
        provinces = CLASS_PROVINCES[cls]
        for i in range(n_spk):
            speaker = f"{cls}-spk{i:02d}"
            split = "test" if i in test_idx else "train"
            for j in range(spec.utts_per_speaker):
                utt_id = f"{speaker}-u{j:03d}"
                rng = np.random.default_rng(child_seed(spec.seed, utt_id))
                lo, hi = spec.duration_range
                duration = lo + (hi - lo) * rng.random()
                province = provinces[rng.integers(len(provinces))]
                signal = synth_utterance(cls, speaker, duration, rng)
                rel = f"wav/{utt_id}.wav"
                write_wav(out / rel, signal)
                records.append(UtteranceRecord(utt_id, rel, speaker, province, cls, split))

    manifest = Manifest(tuple(records), root=out)
    write_manifest(manifest, out / "manifest.csv")
    return manifest


def write_manifest(manifest: Manifest, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for r in manifest.records:
            writer.writerow([r.utt_id, r.path, r.speaker, r.province,
                             r.accent_class, r.split])


def read_manifest(path) -> Manifest:
    """Parse a manifest CSV, validating header, uniqueness, and consistency."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise FormatError(f"{path}: empty manifest") from None
        if header != MANIFEST_HEADER:
            raise FormatError(f"{path}: bad header {header!r}")
        records = []
        seen = set()
        for row in reader:
            if len(row) != len(MANIFEST_HEADER):
                raise FormatError(f"{path}: row with {len(row)} fields: {row!r}")
            rec = UtteranceRecord(*row)
            if rec.utt_id in seen:
                raise DataError(f"{path}: duplicate utt_id {rec.utt_id!r}")
            seen.add(rec.utt_id)
            if rec.split not in SPLITS:
                raise DataError(f"{path}: bad split {rec.split!r} for {rec.utt_id}")
            if province_to_class(rec.province) != rec.accent_class:
                raise DataError(
                    f"{path}: {rec.utt_id}: class {rec.accent_class!r} inconsistent "
                    f"with province {rec.province!r}")
            records.append(rec)
    return Manifest(tuple(records), root=path.parent)
