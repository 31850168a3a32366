import numpy as np
import pytest

from accentlab.corpus import SynthSpec, build_manifest
from accentlab.dsp import SAMPLE_RATE, Signal


@pytest.fixture(scope="session")
def tiny_manifest(tmp_path_factory):
    """Smallest legal corpus: 2 speakers/class x 2 utterances, short clips."""
    spec = SynthSpec(speakers_per_class=2, utts_per_speaker=2,
                     duration_range=(1.2, 1.5), seed=11)
    return build_manifest(spec, tmp_path_factory.mktemp("tinycorpus"))


def make_sine(freq: float, duration: float = 1.0, amp: float = 0.5) -> Signal:
    t = np.arange(int(duration * SAMPLE_RATE)) / SAMPLE_RATE
    return Signal(amp * np.sin(2.0 * np.pi * freq * t))
