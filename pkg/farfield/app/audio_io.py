"""audio_io.py

Mono WAV I/O. Reading goes through soundfile (PCM16 and float WAV); writing
uses scipy's WAV writer, whose float32 output carries no timestamped chunks,
so identical samples always produce identical files.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import soundfile as sf
from scipy.io import wavfile

from farfield.exceptions import AudioIOError, ConfigError

SUPPORTED_SAMPLE_RATES = (16000, 48000)

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    samples: np.ndarray  # (channels, n_samples)
    sample_rate: int

    def __post_init__(self) -> None:
        if self.samples.ndim != 2:
            raise ConfigError(f"audio buffer must be (channels, samples), got shape {self.samples.shape}")
        if self.sample_rate not in SUPPORTED_SAMPLE_RATES:
            raise ConfigError(
                f"unsupported sample rate {self.sample_rate} Hz; expected one of {SUPPORTED_SAMPLE_RATES}"
            )

    @property
    def channels(self) -> int:
        return int(self.samples.shape[0])

    def mono(self) -> np.ndarray:
        if self.channels != 1:
            raise ConfigError(f"expected mono audio, got {self.channels} channels")
        return self.samples[0]


def read_audio(path: PathLike) -> AudioBuffer:
    try:
        data, sample_rate = sf.read(str(path), dtype="float64", always_2d=True)
    except (RuntimeError, OSError) as exc:
        raise AudioIOError(f"cannot read audio file {path}: {exc}") from exc
    if data.shape[0] == 0:
        raise AudioIOError(f"audio file {path} contains no samples")
    return AudioBuffer(np.ascontiguousarray(data.T), int(sample_rate))


def read_mono(path: PathLike, expected_rate: int | None = None) -> tuple[np.ndarray, int]:
    buffer = read_audio(path)
    if expected_rate is not None and buffer.sample_rate != expected_rate:
        raise ConfigError(f"{path} is sampled at {buffer.sample_rate} Hz, expected {expected_rate} Hz")
    return buffer.mono(), buffer.sample_rate


def write_wav(path: PathLike, samples: np.ndarray, sample_rate: int) -> Path:
    """Write mono 32-bit float WAV."""
    target = Path(path)
    data = np.asarray(samples, dtype=np.float32)
    if data.ndim != 1:
        raise ConfigError(f"only mono output is supported, got shape {data.shape}")
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        wavfile.write(target, int(sample_rate), data)
    except OSError as exc:
        raise AudioIOError(f"cannot write {target}: {exc}") from exc
    return target
