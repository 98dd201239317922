import numpy as np
import pytest

from vcwarp.audio_io import Waveform


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sine(freq, fs=16000, seconds=1.0, amp=0.5):
    t = np.arange(int(round(fs * seconds))) / fs
    return Waveform(amp * np.sin(2 * np.pi * freq * t), fs)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
