"""Synthetic tonal-accent corpus: generation, manifests, augmentation."""

from .augment import SilentInputWarning, augment_additive_noise, expand_threefold
from .manifest import (MANIFEST_HEADER, Manifest, SynthSpec, UtteranceRecord,
                       build_manifest, child_seed, read_manifest, write_manifest)
from .mapping import (CLASS_NAMES, CLASS_PROVINCES, PROVINCE_TO_CLASS,
                      class_id, province_to_class)
from .synth import (CLASS_PROFILES, ClassProfile, Voice, contour_shape,
                    speaker_voice, synth_utterance)

__all__ = [
    "CLASS_NAMES", "CLASS_PROFILES", "CLASS_PROVINCES", "ClassProfile",
    "MANIFEST_HEADER", "Manifest", "PROVINCE_TO_CLASS", "SilentInputWarning",
    "SynthSpec", "UtteranceRecord", "Voice", "augment_additive_noise",
    "build_manifest", "child_seed", "class_id", "contour_shape",
    "expand_threefold", "province_to_class", "read_manifest", "speaker_voice",
    "synth_utterance", "write_manifest",
]
