"""mixing.py

Builds one (noisy-reverberant input, shaped target) pair from a scenario
instance, a clean speech signal and a noise signal.

Both outputs are convolutions sharing the RIR's time origin and are cut to the
segment length, so they are aligned sample for sample. The noise is scaled so
the reverberant-speech-to-noise energy ratio equals the drawn SNR, then input
and target are peak-normalised with one common factor.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.signal import fftconvolve

from farfield.analytics.rir_analysis import analyze_rir, estimate_t60
from farfield.analytics.signal_metrics import measured_snr, noise_gain_for_snr
from farfield.app.error_handling import CROP_RETRY_CONFIG, RetryConfig, retry_on
from farfield.app.schemas import (
    ManifestRecord,
    RirStatsSchema,
    ScenarioInstanceSchema,
    ShapingSchema,
)
from farfield.exceptions import AnalysisError, ConfigError, GenerationError, SignalError
from farfield.pipeline.scenarios import TRAIN_SNR_RANGE_DB, ScenarioInstance
from farfield.shaping.windows import DEFAULT_SHAPING, ShapingSpec, apply_shaping
from farfield.simulation.ism import plan_for_t60, simulate
from farfield.simulation.rir import Rir

logger = logging.getLogger(__name__)

SPEECH_SKIP_SECONDS = 0.5
CROSSFADE_MS = 10.0
SILENCE_THRESHOLD_DB = -60.0  # mean power, dB re full scale
DEFAULT_PEAK_LEVEL = 0.9

# spawn keys of the per-example random streams
_MIX_STREAM = 1


@dataclass(frozen=True)
class MixSpec:
    snr_range_db: tuple[float, float] = TRAIN_SNR_RANGE_DB
    segment_seconds: float = 10.0
    shaping: ShapingSpec = DEFAULT_SHAPING
    sample_rate: int = 48000
    reverberate_noise: bool = False
    add_noise: bool = True
    peak_level: float = DEFAULT_PEAK_LEVEL
    calibrate_absorption: bool = True

    def __post_init__(self) -> None:
        lo, hi = self.snr_range_db
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ConfigError(f"snr_range_db must be finite with lo <= hi, got {self.snr_range_db}")
        if not self.segment_seconds > 0:
            raise ConfigError(f"segment_seconds must be positive, got {self.segment_seconds}")
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if not (0 < self.peak_level <= 1.0):
            raise ConfigError(f"peak_level must be in (0, 1], got {self.peak_level}")

    @property
    def segment_samples(self) -> int:
        return int(round(self.segment_seconds * self.sample_rate))


class MixResult(NamedTuple):
    input: np.ndarray
    target: np.ndarray
    record: ManifestRecord


@dataclass(frozen=True, eq=False)
class RenderedExample:
    """Everything produced for one example; components are already peak-scaled."""

    input: np.ndarray
    target: np.ndarray
    reverberant_speech: np.ndarray
    noise: np.ndarray
    rir: Rir
    target_rir: Rir
    record: ManifestRecord


def mean_power_db(x: np.ndarray) -> float:
    power = float(np.mean(np.square(x))) if x.size else 0.0
    return 10.0 * math.log10(power) if power > 0 else -math.inf


def loop_tile(noise: np.ndarray, length: int, crossfade: int) -> np.ndarray:
    """Repeat ``noise`` until it holds ``length`` samples, crossfading the joins."""
    noise = np.asarray(noise, dtype=float)
    if noise.size == 0:
        raise SignalError("cannot tile an empty noise signal")
    if noise.size >= length:
        return noise
    if crossfade <= 0 or noise.size <= 2 * crossfade:
        return np.resize(noise, length)
    fade_in = np.linspace(0.0, 1.0, crossfade, endpoint=False)
    fade_out = 1.0 - fade_in
    pieces = [noise[:-crossfade]]
    total = noise.size - crossfade
    tail = noise[-crossfade:]
    while total < length:
        pieces.append(tail * fade_out + noise[:crossfade] * fade_in)
        pieces.append(noise[crossfade:-crossfade])
        total += noise.size - crossfade
        tail = noise[-crossfade:]
    pieces.append(tail)
    return np.concatenate(pieces)


def crop_speech(
    speech: np.ndarray,
    segment: int,
    sample_rate: int,
    rng: np.random.Generator,
    retry: RetryConfig = CROP_RETRY_CONFIG,
) -> tuple[int, np.ndarray]:
    """Random crop of ``segment`` samples that is not silent.

    The leading half second is skipped when the file is long enough to allow it.
    """
    if speech.size < segment:
        raise SignalError(
            f"speech has {speech.size} samples, shorter than the {segment}-sample segment"
        )
    skip = int(round(SPEECH_SKIP_SECONDS * sample_rate))
    if speech.size - skip < segment:
        skip = 0

    def attempt(_: int) -> tuple[int, np.ndarray]:
        start = int(rng.integers(skip, speech.size - segment + 1))
        window = speech[start:start + segment]
        if mean_power_db(window) < SILENCE_THRESHOLD_DB:
            raise SignalError(f"speech crop at sample {start} is silent")
        return start, window

    try:
        return retry_on(attempt, retry, (SignalError,))
    except SignalError as exc:
        raise GenerationError(f"no active speech window after {retry.max_attempts} crops: {exc}") from exc


def crop_noise(noise: np.ndarray, segment: int, crossfade: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    tiled = loop_tile(noise, segment, crossfade)
    start = int(rng.integers(0, tiled.size - segment + 1))
    return start, tiled[start:start + segment]


def _measured_or_target_t60(rir: Rir, fallback: float) -> float:
    try:
        return estimate_t60(rir).t60_s
    except AnalysisError as exc:
        logger.debug("using target T60 for adaptive shaping: %s", exc)
        return fallback


def render_example(
    instance: ScenarioInstance,
    speech: np.ndarray,
    noise: Optional[np.ndarray],
    mix: MixSpec,
    example_index: int = 0,
) -> RenderedExample:
    fs = mix.sample_rate
    segment = mix.segment_samples
    rng = np.random.default_rng(np.random.SeedSequence(instance.seed, spawn_key=(_MIX_STREAM,)))

    speech_offset, clean = crop_speech(np.asarray(speech, dtype=float), segment, fs, rng)
    noise_offset, noise_seg = None, None
    if mix.add_noise:
        if noise is None:
            raise ConfigError("add_noise is set but no noise signal was given")
        crossfade = int(round(CROSSFADE_MS * 1e-3 * fs))
        noise_offset, noise_seg = crop_noise(noise, segment, crossfade, rng)
    snr_db = float(rng.uniform(*mix.snr_range_db)) if mix.add_noise else None

    request = plan_for_t60(
        instance.room.dims,
        instance.source,
        instance.mic,
        instance.t60_target_s,
        fs,
        speed_of_sound=instance.room.speed_of_sound,
        calibrate=mix.calibrate_absorption,
    )
    rir = simulate(request)
    measured_t60 = None
    if mix.shaping.mode == "adaptive":
        measured_t60 = _measured_or_target_t60(rir, instance.t60_target_s)
    target_rir = apply_shaping(rir, mix.shaping, measured_t60)

    reverberant = fftconvolve(clean, rir.samples)[:segment]
    target = fftconvolve(clean, target_rir.samples)[:segment]

    gain = 0.0
    noise_component = np.zeros(segment)
    if noise_seg is not None and snr_db is not None:
        if mix.reverberate_noise:
            noise_seg = fftconvolve(noise_seg, rir.samples)[:segment]
        gain = noise_gain_for_snr(reverberant, noise_seg, snr_db)
        noise_component = gain * noise_seg

    mixture = reverberant + noise_component
    peak = max(float(np.max(np.abs(mixture))), float(np.max(np.abs(target))))
    scale = mix.peak_level / peak if peak > 0 else 1.0
    mixture, target = mixture * scale, target * scale
    reverberant, noise_component = reverberant * scale, noise_component * scale

    realized = measured_snr(reverberant, noise_component) if snr_db is not None else None
    record = ManifestRecord(
        example_id=f"ex_{example_index:06d}",
        example_index=example_index,
        seed=instance.seed,
        speech_path="",
        scenario=ScenarioInstanceSchema.from_instance(instance),
        absorption_used=request.room.absorption[0],
        sample_rate=fs,
        segment_seconds=mix.segment_seconds,
        speech_offset=speech_offset,
        noise_offset=noise_offset,
        snr_drawn_db=snr_db,
        snr_realized_db=realized,
        noise_gain=gain * scale,
        reverberate_noise=mix.reverberate_noise,
        peak_scale=scale,
        shaping=ShapingSchema.from_spec(mix.shaping),
        rir_stats=RirStatsSchema.from_stats(analyze_rir(rir)),
        target_rir_stats=RirStatsSchema.from_stats(analyze_rir(target_rir)),
    )
    return RenderedExample(mixture, target, reverberant, noise_component, rir, target_rir, record)


def synthesize_example(
    instance: ScenarioInstance,
    speech: np.ndarray,
    noise: Optional[np.ndarray],
    mix: MixSpec,
    example_index: int = 0,
) -> MixResult:
    """(input, target, record) for one scenario instance."""
    rendered = render_example(instance, speech, noise, mix, example_index)
    return MixResult(rendered.input, rendered.target, rendered.record)
