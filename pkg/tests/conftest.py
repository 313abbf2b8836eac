import numpy as np
import pytest

from morphmix.audio_io import Waveform


def make_wave(samples, sr=48000):
    return Waveform(np.asarray(samples, dtype=np.float32), sr)


def random_wave(rng, n, sr=48000, amp=0.3, channels=1):
    data = rng.uniform(-amp, amp, size=(channels, n)).astype(np.float32)
    return Waveform(data, sr)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
