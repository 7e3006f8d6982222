"""ism.py

Shoebox image-source simulator. Image sources are enumerated per axis and
combined in chunks; each arrival is rendered with a Hann-windowed sinc
fractional delay up to ``full_kernel_ms`` after the direct path and at the
nearest sample after that. ``simulate_for_t60`` derives the wall absorption
from a target reverberation time (Eyring, optionally refined against the decay
of the actual image set).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from farfield.acoustics.core import (
    DEFAULT_SPEED_OF_SOUND,
    DEFAULT_WALL_MARGIN,
    Position,
    RoomSpec,
    absorption_for_t60,
)
from farfield.analytics.rir_analysis import energy_decay_db, fit_decay
from farfield.exceptions import AnalysisError, GeometryError, SimulationError
from farfield.simulation.rir import Rir

logger = logging.getLogger(__name__)

AUTO = "auto"
DEFAULT_KERNEL_TAPS = 81
DEFAULT_LENGTH_FACTOR = 1.5
MIN_LENGTH_FACTOR = 1.25
DEFAULT_FULL_KERNEL_MS = 80.0  # later arrivals are rendered at the nearest sample
CALIBRATION_BIN_RATE = 1000.0  # energy histogram bins per second
CALIBRATION_ITERATIONS = 4
CALIBRATION_TOLERANCE = 0.01
_CHUNK = 16384

ReflectionOrder = Union[int, str]


@dataclass(frozen=True)
class SimRequest:
    room: RoomSpec
    source: Position
    mic: Position
    sample_rate: int
    max_rir_seconds: float
    reflection_order: ReflectionOrder = AUTO
    target_t60_s: float | None = None
    kernel_taps: int = DEFAULT_KERNEL_TAPS
    wall_margin_m: float = DEFAULT_WALL_MARGIN
    full_kernel_ms: float = DEFAULT_FULL_KERNEL_MS

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise SimulationError(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.max_rir_seconds > 0:
            raise SimulationError(f"max_rir_seconds must be positive, got {self.max_rir_seconds}")
        if self.kernel_taps < 1 or self.kernel_taps % 2 == 0:
            raise SimulationError(f"kernel_taps must be a positive odd number, got {self.kernel_taps}")
        if not self.full_kernel_ms >= 0:
            raise SimulationError(f"full_kernel_ms must be non-negative, got {self.full_kernel_ms}")
        if self.reflection_order != AUTO and (
            not isinstance(self.reflection_order, int) or self.reflection_order < 0
        ):
            raise SimulationError(f"reflection_order must be 'auto' or a non-negative int, got {self.reflection_order!r}")
        self.source.validate_in(self.room, self.wall_margin_m)
        self.mic.validate_in(self.room, self.wall_margin_m)
        if self.source == self.mic:
            raise GeometryError("source and microphone positions coincide")
        if (
            self.reflection_order == AUTO
            and self.target_t60_s is not None
            and self.max_rir_seconds < MIN_LENGTH_FACTOR * self.target_t60_s
        ):
            raise SimulationError(
                f"max_rir_seconds={self.max_rir_seconds:.3f} is shorter than "
                f"{MIN_LENGTH_FACTOR} x target T60 ({self.target_t60_s:.3f} s)"
            )

    @property
    def distance_m(self) -> float:
        return self.source.distance_to(self.mic)


@dataclass(frozen=True, eq=False)
class ImageChunk:
    distances: np.ndarray  # (M,) metres
    reflections: np.ndarray  # (M, 6) reflection count per wall


def _axis_images(src: float, mic: float, size: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Image offsets along one axis and their reflection counts on (wall at 0, wall at size)."""
    r = np.arange(-n, n + 1)
    offsets, counts = [], []
    for p in (0, 1):
        offsets.append((1 - 2 * p) * src + 2 * r * size - mic)
        counts.append(np.stack([np.abs(r - p), np.abs(r)], axis=1))
    return np.concatenate(offsets), np.concatenate(counts)


def _axis_order(max_distance: float, size: float) -> int:
    return int(math.ceil(max_distance / (2.0 * size))) + 1


def iter_image_sources(
    dims: Sequence[float],
    source: Position,
    mic: Position,
    max_distance: float,
    reflection_order: int | None = None,
) -> Iterator[ImageChunk]:
    """Yield all image sources within ``max_distance`` of the microphone."""
    (dx, cx), (dy, cy), (dz, cz) = (
        _axis_images(s, m, size, _axis_order(max_distance, size))
        for s, m, size in zip(source.as_array(), mic.as_array(), dims)
    )
    dyz2 = (dy[:, None] ** 2 + dz[None, :] ** 2).ravel()
    cyz = np.concatenate(
        [np.repeat(cy, dz.size, axis=0), np.tile(cz, (dy.size, 1))], axis=1
    )
    cyz_total = cyz.sum(axis=1)
    limit = max_distance**2
    for offset, counts in zip(dx, cx):
        mask = offset**2 + dyz2 <= limit
        if reflection_order is not None:
            mask &= counts.sum() + cyz_total <= reflection_order
        if not np.any(mask):
            continue
        distances = np.sqrt(offset**2 + dyz2[mask])
        reflections = np.concatenate([np.broadcast_to(counts, (distances.size, 2)), cyz[mask]], axis=1)
        yield ImageChunk(distances, reflections)


def _hann_sinc(t: np.ndarray, taps: int) -> np.ndarray:
    return 0.5 * (1.0 + np.cos(2.0 * np.pi * t / (taps + 1))) * np.sinc(t)


def _render(out: np.ndarray, delays: np.ndarray, amplitudes: np.ndarray, taps: int) -> None:
    half = taps // 2
    offsets = np.arange(-half, half + 1)
    for start in range(0, delays.size, _CHUNK):
        tau = delays[start:start + _CHUNK]
        gain = amplitudes[start:start + _CHUNK]
        idx = np.rint(tau).astype(np.int64)[:, None] + offsets
        values = gain[:, None] * _hann_sinc(idx - tau[:, None], taps)
        valid = (idx >= 0) & (idx < out.size)
        out += np.bincount(idx[valid], weights=values[valid], minlength=out.size)


def _render_nearest(out: np.ndarray, delays: np.ndarray, amplitudes: np.ndarray) -> None:
    idx = np.rint(delays).astype(np.int64)
    valid = idx < out.size
    out += np.bincount(idx[valid], weights=amplitudes[valid], minlength=out.size)


def simulate(req: SimRequest) -> Rir:
    """Render the image-source RIR for ``req``.

    ``direct_index`` is the largest-magnitude sample within the kernel around
    the direct-path delay, not the global maximum: coincident late images can
    sum above the direct peak and must not move N1.
    """
    fs = req.sample_rate
    c = req.room.speed_of_sound
    n_samples = int(math.ceil(req.max_rir_seconds * fs))
    half = req.kernel_taps // 2
    direct_delay = req.distance_m / c * fs
    if direct_delay >= n_samples:
        raise SimulationError(
            f"RIR length {req.max_rir_seconds:.4f} s is shorter than the direct-path delay "
            f"{direct_delay / fs:.4f} s"
        )

    betas = np.sqrt(1.0 - np.asarray(req.room.absorption))
    order = None if req.reflection_order == AUTO else int(req.reflection_order)
    max_distance = (n_samples + half) / fs * c
    late_delay = direct_delay + req.full_kernel_ms * 1e-3 * fs
    out = np.zeros(n_samples)
    n_images = 0
    for chunk in iter_image_sources(req.room.dims, req.source, req.mic, max_distance, order):
        amplitudes = np.prod(betas[None, :] ** chunk.reflections, axis=1) / (4.0 * np.pi * chunk.distances)
        keep = amplitudes != 0.0
        if not np.any(keep):
            continue
        n_images += int(np.count_nonzero(keep))
        delays = chunk.distances[keep] / c * fs
        gains = amplitudes[keep]
        early = delays < late_delay
        _render(out, delays[early], gains[early], req.kernel_taps)
        _render_nearest(out, delays[~early], gains[~early])

    center = int(round(direct_delay))
    lo, hi = max(0, center - half), min(n_samples, center + half + 1)
    direct_index = lo + int(np.argmax(np.abs(out[lo:hi])))
    logger.debug("rendered %d image sources into %d samples", n_images, n_samples)
    return Rir(out, fs, direct_index)


def decay_histogram(
    dims: Sequence[float],
    source: Position,
    mic: Position,
    max_seconds: float,
    speed_of_sound: float = DEFAULT_SPEED_OF_SOUND,
    bin_rate: float = CALIBRATION_BIN_RATE,
) -> np.ndarray:
    """Spreading-loss energy per (time bin, total reflection count).

    For a uniform absorption ``alpha`` the energy decay is
    ``hist @ (1 - alpha) ** arange(hist.shape[1])``.
    """
    max_distance = max_seconds * speed_of_sound
    n_bins = int(math.ceil(max_seconds * bin_rate)) + 1
    max_reflections = sum(2 * _axis_order(max_distance, size) + 1 for size in dims)
    width = max_reflections + 1
    hist = np.zeros(n_bins * width)
    for chunk in iter_image_sources(dims, source, mic, max_distance):
        bins = np.minimum((chunk.distances / speed_of_sound * bin_rate).astype(np.int64), n_bins - 1)
        flat = bins * width + chunk.reflections.sum(axis=1)
        hist += np.bincount(flat, weights=(4.0 * np.pi * chunk.distances) ** -2.0, minlength=hist.size)
    return hist.reshape(n_bins, width)


def _histogram_t60(hist: np.ndarray, alpha: float, bin_rate: float) -> float:
    energy = hist @ (1.0 - alpha) ** np.arange(hist.shape[1])
    return fit_decay(energy_decay_db(energy), bin_rate).t60_s


def calibrate_absorption(
    dims: Sequence[float],
    source: Position,
    mic: Position,
    t60: float,
    max_seconds: float,
    speed_of_sound: float = DEFAULT_SPEED_OF_SOUND,
    iterations: int = CALIBRATION_ITERATIONS,
    tolerance: float = CALIBRATION_TOLERANCE,
) -> float:
    """Uniform absorption whose image-source decay has a T30 of ``t60``.

    Starts from the Eyring inversion and rescales the absorption exponent
    ``-ln(1 - alpha)`` by measured/target T60 until within ``tolerance``.
    """
    alpha = absorption_for_t60(dims, t60)
    hist = decay_histogram(dims, source, mic, max_seconds, speed_of_sound)
    exponent = -math.log1p(-alpha)
    for step in range(iterations):
        try:
            measured = _histogram_t60(hist, -math.expm1(-exponent), CALIBRATION_BIN_RATE)
        except AnalysisError as exc:
            logger.debug("absorption calibration stopped at step %d: %s", step, exc)
            break
        ratio = measured / t60
        if abs(ratio - 1.0) <= tolerance:
            break
        exponent *= ratio
    alpha = -math.expm1(-exponent)
    return min(max(alpha, np.finfo(float).tiny), np.nextafter(1.0, 0.0))


def plan_for_t60(
    dims: Sequence[float],
    source: Position,
    mic: Position,
    t60: float,
    sample_rate: int,
    *,
    speed_of_sound: float = DEFAULT_SPEED_OF_SOUND,
    max_rir_seconds: float | None = None,
    reflection_order: ReflectionOrder = AUTO,
    kernel_taps: int = DEFAULT_KERNEL_TAPS,
    wall_margin_m: float = DEFAULT_WALL_MARGIN,
    calibrate: bool = True,
) -> SimRequest:
    """Build the simulator request realising ``t60`` in the given geometry."""
    # validates t60 and geometry before they are used for sizing and calibration
    alpha = absorption_for_t60(dims, t60)
    source.validate_in(dims, wall_margin_m)
    mic.validate_in(dims, wall_margin_m)
    if source == mic:
        raise GeometryError("source and microphone positions coincide")
    if max_rir_seconds is None:
        direct_s = source.distance_to(mic) / speed_of_sound
        max_rir_seconds = direct_s + DEFAULT_LENGTH_FACTOR * t60 + (kernel_taps // 2 + 1) / sample_rate
    if calibrate:
        alpha = calibrate_absorption(dims, source, mic, t60, max_rir_seconds, speed_of_sound)
    return SimRequest(
        room=RoomSpec.uniform(dims, alpha, speed_of_sound),
        source=source,
        mic=mic,
        sample_rate=sample_rate,
        max_rir_seconds=max_rir_seconds,
        reflection_order=reflection_order,
        target_t60_s=t60,
        kernel_taps=kernel_taps,
        wall_margin_m=wall_margin_m,
    )


def simulate_for_t60(
    dims: Sequence[float],
    source: Position,
    mic: Position,
    t60: float,
    sample_rate: int,
    *,
    speed_of_sound: float = DEFAULT_SPEED_OF_SOUND,
    max_rir_seconds: float | None = None,
    reflection_order: ReflectionOrder = AUTO,
    kernel_taps: int = DEFAULT_KERNEL_TAPS,
    wall_margin_m: float = DEFAULT_WALL_MARGIN,
    calibrate: bool = True,
) -> Rir:
    """Invert the absorption for ``t60`` and simulate."""
    request = plan_for_t60(
        dims,
        source,
        mic,
        t60,
        sample_rate,
        speed_of_sound=speed_of_sound,
        max_rir_seconds=max_rir_seconds,
        reflection_order=reflection_order,
        kernel_taps=kernel_taps,
        wall_margin_m=wall_margin_m,
        calibrate=calibrate,
    )
    return simulate(request)
