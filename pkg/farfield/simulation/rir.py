"""rir.py

Sampled room impulse response container and direct-path detection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from farfield.exceptions import AnalysisError, SimulationError

DIRECT_THRESHOLD_DB = 20.0


@dataclass(frozen=True, eq=False)
class Rir:
    """Impulse response samples with sample rate and direct-path index (N1)."""

    samples: np.ndarray
    sample_rate: int
    direct_index: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise SimulationError("RIR samples must be a non-empty 1-D sequence")
        if self.sample_rate <= 0:
            raise SimulationError(f"sample_rate must be positive, got {self.sample_rate}")
        if not (0 <= self.direct_index < samples.size):
            raise SimulationError(f"direct_index {self.direct_index} outside [0, {samples.size})")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "direct_index", int(self.direct_index))

    @classmethod
    def from_samples(cls, samples: np.ndarray, sample_rate: int, method: str = "peak") -> "Rir":
        """Wrap a measured or loaded RIR, locating N1 with :func:`find_direct_index`."""
        samples = np.asarray(samples, dtype=float)
        return cls(samples, sample_rate, find_direct_index(samples, method))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate

    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples))

    def with_samples(self, samples: np.ndarray) -> "Rir":
        return Rir(samples, self.sample_rate, self.direct_index)


def find_direct_index(samples: np.ndarray, method: str = "peak") -> int:
    """Index of the direct sound.

    ``peak`` takes the maximum absolute amplitude; ``threshold`` the first sample
    within 20 dB of that peak.
    """
    magnitude = np.abs(np.asarray(samples, dtype=float))
    if magnitude.size == 0 or not np.any(magnitude > 0):
        raise AnalysisError("cannot locate the direct path of an all-zero RIR")
    peak = int(np.argmax(magnitude))
    if method == "peak":
        return peak
    if method == "threshold":
        limit = magnitude[peak] * 10.0 ** (-DIRECT_THRESHOLD_DB / 20.0)
        return int(np.flatnonzero(magnitude >= limit)[0])
    raise AnalysisError(f"unknown direct-path method {method!r}")
