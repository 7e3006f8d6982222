"""signal_metrics.py

Model-free objective metrics: SI-SDR and component SNR for mixtures.
SNR uses full-signal power, not voice-activity-weighted levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from farfield.exceptions import SignalError


@dataclass(frozen=True)
class MetricResult:
    value_db: float
    valid: bool = True

    def format(self, precision: int = 2) -> str:
        if math.isinf(self.value_db):
            return "+inf" if self.value_db > 0 else "-inf"
        return f"{self.value_db:.{precision}f}"


def _as_signal(x: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise SignalError(f"{name} must be a mono 1-D signal, got shape {arr.shape}")
    return arr


def si_sdr(estimate: np.ndarray, reference: np.ndarray) -> MetricResult:
    """Scale-invariant signal-to-distortion ratio in dB."""
    est = _as_signal(estimate, "estimate")
    ref = _as_signal(reference, "reference")
    if est.shape != ref.shape:
        raise SignalError(f"estimate and reference lengths differ: {est.size} vs {ref.size}")
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise SignalError("reference has zero energy")
    if not np.any(est):
        return MetricResult(-math.inf, valid=False)

    alpha = float(np.dot(est, ref)) / ref_energy
    target = alpha * ref
    residual = est - target
    residual_energy = float(np.dot(residual, residual))
    if residual_energy == 0.0:
        return MetricResult(math.inf)
    target_energy = float(np.dot(target, target))
    if target_energy == 0.0:
        return MetricResult(-math.inf)
    return MetricResult(10.0 * math.log10(target_energy / residual_energy))


def measured_snr(speech_component: np.ndarray, noise_component: np.ndarray) -> float:
    speech = _as_signal(speech_component, "speech")
    noise = _as_signal(noise_component, "noise")
    speech_energy = float(np.dot(speech, speech))
    noise_energy = float(np.dot(noise, noise))
    if speech_energy == 0.0 or noise_energy == 0.0:
        raise SignalError("SNR needs non-zero speech and noise energy")
    return 10.0 * math.log10(speech_energy / noise_energy)


def noise_gain_for_snr(speech_component: np.ndarray, noise_component: np.ndarray, snr_db: float) -> float:
    """Amplitude gain g such that measured_snr(speech, g * noise) == snr_db."""
    speech = _as_signal(speech_component, "speech")
    noise = _as_signal(noise_component, "noise")
    speech_energy = float(np.dot(speech, speech))
    noise_energy = float(np.dot(noise, noise))
    if speech_energy == 0.0 or noise_energy == 0.0:
        raise SignalError("SNR scaling needs non-zero speech and noise energy")
    return math.sqrt(speech_energy / (noise_energy * 10.0 ** (snr_db / 10.0)))
