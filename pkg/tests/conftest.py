import contextlib
import os

import numpy as np
import pytest

from vocalscreen.audio_io import AudioClip


@contextlib.contextmanager
def chdir(path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


def tone(freq_hz: float, seconds: float = 1.0, amplitude: float = 0.5,
         sample_rate: int = 16000) -> AudioClip:
    t = np.arange(round(seconds * sample_rate)) / sample_rate
    return AudioClip(samples=amplitude * np.sin(2 * np.pi * freq_hz * t),
                     sample_rate=sample_rate)


@pytest.fixture(scope="session")
def small_cohort(tmp_path_factory):
    """Tiny synthetic cohort shared by CLI-level tests: 3+3 speakers, 30 s."""
    from vocalscreen.cli import main

    root = tmp_path_factory.mktemp("small_cohort")
    with chdir(root):
        assert main(["synth", "--out", "cohort", "--seed", "7",
                     "--speakers-per-class", "3", "--seconds-per-speaker", "30"]) == 0
        assert main(["extract", "--manifest", "cohort/cohort.csv", "--out", "work"]) == 0
        assert main(["split", "--manifest", "work/segments.csv", "--out", "work",
                     "--seed", "7"]) == 0
    return root
