"""Pytest configuration: project root on sys.path plus shared signal and corpus fixtures."""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

# Add project root to Python path so that `import farfield` works regardless of
# where pytest is invoked from.
ROOT_DIR = Path(__file__).resolve().parent.parent
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from farfield.app.audio_io import write_wav  # noqa: E402
from farfield.simulation.rir import Rir  # noqa: E402


def exponential_rir(t60: float, fs: int = 16000, seconds: float | None = None, delay: int = 0) -> Rir:
    """Noise-free decay reaching -60 dB after exactly ``t60`` seconds."""
    n = int(round((seconds if seconds is not None else 2.0 * t60) * fs))
    k = np.arange(n)
    samples = np.concatenate([np.zeros(delay), 10.0 ** (-3.0 * k / (t60 * fs))])
    return Rir(samples, fs, delay)


@pytest.fixture
def make_exp_rir() -> Callable[..., Rir]:
    return exponential_rir


def speech_like(seconds: float, fs: int, seed: int = 0) -> np.ndarray:
    """Amplitude-modulated noise, loud enough to pass the silence check everywhere."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(round(seconds * fs))) / fs
    envelope = 0.6 + 0.4 * np.sin(2 * np.pi * 3.0 * t)
    return 0.1 * envelope * rng.standard_normal(t.size)


@pytest.fixture
def make_speech() -> Callable[..., np.ndarray]:
    return speech_like


@pytest.fixture
def corpus(tmp_path: Path) -> dict[str, list[Path]]:
    """Two speech and two noise WAV files at 16 kHz."""
    fs = 16000
    speech = [write_wav(tmp_path / "speech" / f"s{i}.wav", speech_like(3.0, fs, seed=i), fs) for i in range(2)]
    rng = np.random.default_rng(99)
    noise = [
        write_wav(tmp_path / "noise" / "long.wav", 0.05 * rng.standard_normal(3 * fs), fs),
        write_wav(tmp_path / "noise" / "short.wav", 0.05 * rng.standard_normal(fs // 2), fs),
    ]
    return {"speech": speech, "noise": noise}


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: dataset runs at full acceptance scale")
