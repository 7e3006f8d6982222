"""scenarios.py

Scenario presets (close/medium/far microphone, small/large rooms) and the
seeded sampler that draws a room, a reverberation time and source/microphone
positions from them.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Union

import numpy as np

from farfield.acoustics.core import (
    DEFAULT_T60_VARIATION,
    DEFAULT_WALL_MARGIN,
    MIN_VOLUME,
    Position,
    RoomSpec,
    absorption_for_t60,
    t60_band_from_volume,
)
from farfield.exceptions import ConfigError, GeometryError

MAX_SOURCE_TRIES = 1000
MAX_MIC_TRIES = 50
MAX_ROOM_TRIES = 20

SMALL_ROOM_MIN_DIMS = (3.0, 3.0, 2.5)
SMALL_ROOM_MAX_DIMS = (10.0, 10.0, 5.0)
LARGE_ROOM_MAX_DIMS = (40.0, 40.0, 20.0)

TRAIN_SNR_RANGE_DB = (-5.0, 40.0)
TEST_SNR_RANGE_DB = (5.0, 40.0)


@dataclass(frozen=True)
class VolumeBased:
    """T60 uniform within +/- ``fraction`` of the volume law."""

    fraction: float = DEFAULT_T60_VARIATION


@dataclass(frozen=True)
class NaiveUniform:
    """T60 uniform in [lo_s, hi_s] regardless of the room."""

    lo_s: float = 0.1
    hi_s: float = 1.8


T60Mode = Union[VolumeBased, NaiveUniform]


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    distance_range_m: tuple[float, float]
    room_min_dims_m: tuple[float, float, float]
    room_max_dims_m: tuple[float, float, float]
    t60_mode: T60Mode = field(default_factory=VolumeBased)
    wall_margin_m: float = DEFAULT_WALL_MARGIN

    def __post_init__(self) -> None:
        lo, hi = self.distance_range_m
        if not (0 < lo < hi):
            raise ConfigError(f"{self.name}: distance range must satisfy 0 < min < max, got {self.distance_range_m}")
        if len(self.room_min_dims_m) != 3 or len(self.room_max_dims_m) != 3:
            raise ConfigError(f"{self.name}: room dimension bounds need 3 values each")
        if any(a > b for a, b in zip(self.room_min_dims_m, self.room_max_dims_m)):
            raise ConfigError(f"{self.name}: min room dims {self.room_min_dims_m} exceed max {self.room_max_dims_m}")
        if min(self.room_min_dims_m) <= 2 * self.wall_margin_m:
            raise ConfigError(f"{self.name}: rooms must be larger than twice the wall margin")
        if isinstance(self.t60_mode, NaiveUniform):
            if not (0 < self.t60_mode.lo_s < self.t60_mode.hi_s):
                raise ConfigError(f"{self.name}: naive T60 range must satisfy 0 < lo < hi")
        elif isinstance(self.t60_mode, VolumeBased):
            if math.prod(self.room_min_dims_m) <= MIN_VOLUME:
                raise ConfigError(f"{self.name}: smallest room is below the volume law's domain ({MIN_VOLUME:.2f} m^3)")
            if not (0 <= self.t60_mode.fraction < 1):
                raise ConfigError(f"{self.name}: T60 variation must be in [0, 1)")
        else:
            raise ConfigError(f"{self.name}: unknown T60 mode {self.t60_mode!r}")

    def with_t60_mode(self, mode: T60Mode) -> "ScenarioSpec":
        return replace(self, t60_mode=mode)


CLOSE_SMALL = ScenarioSpec("close_small", (0.1, 0.5), SMALL_ROOM_MIN_DIMS, SMALL_ROOM_MAX_DIMS)
CLOSE_LARGE = ScenarioSpec("close_large", (0.1, 1.0), SMALL_ROOM_MIN_DIMS, LARGE_ROOM_MAX_DIMS)
MEDIUM_SMALL = ScenarioSpec("medium_small", (0.1, 2.0), SMALL_ROOM_MIN_DIMS, SMALL_ROOM_MAX_DIMS)
FAR_LARGE = ScenarioSpec("far_large", (0.2, 10.0), SMALL_ROOM_MIN_DIMS, LARGE_ROOM_MAX_DIMS)

SCENARIO_PRESETS: dict[str, ScenarioSpec] = {
    spec.name: spec for spec in (CLOSE_SMALL, CLOSE_LARGE, MEDIUM_SMALL, FAR_LARGE)
}


def get_scenario(name: str) -> ScenarioSpec:
    try:
        return SCENARIO_PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIO_PRESETS)}") from None


@dataclass(frozen=True)
class ScenarioInstance:
    room: RoomSpec
    t60_target_s: float
    source: Position
    mic: Position
    distance_m: float
    seed: int
    scenario: str = "custom"
    t60_mode: str = "volume"

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "room_dims_m": list(self.room.dims),
            "volume_m3": self.room.volume(),
            "surface_m2": self.room.surface_area(),
            "absorption": self.room.absorption[0],
            "t60_mode": self.t60_mode,
            "t60_target_s": self.t60_target_s,
            "source": list(asdict(self.source).values()),
            "mic": list(asdict(self.mic).values()),
            "distance_m": self.distance_m,
        }


def _draw_t60(mode: T60Mode, volume: float, rng: np.random.Generator) -> float:
    if isinstance(mode, NaiveUniform):
        return float(rng.uniform(mode.lo_s, mode.hi_s))
    band = t60_band_from_volume(volume, mode.fraction)
    return float(rng.uniform(band.low_s, band.high_s))


def _mode_name(mode: T60Mode) -> str:
    return "naive" if isinstance(mode, NaiveUniform) else "volume"


def sample_scenario(spec: ScenarioSpec, rng_seed: int) -> ScenarioInstance:
    """Draw one scenario instance; identical seeds give identical instances."""
    if rng_seed < 0:
        raise ConfigError(f"seed must be non-negative, got {rng_seed}")
    margin = spec.wall_margin_m
    d_min, d_max = spec.distance_range_m
    largest_interior = np.asarray(spec.room_max_dims_m) - 2 * margin
    if float(np.linalg.norm(largest_interior)) < d_min:
        raise GeometryError(
            f"{spec.name}: minimum distance {d_min} m does not fit the largest room interior"
        )

    rng = np.random.default_rng(rng_seed)
    lo_dims = np.asarray(spec.room_min_dims_m, dtype=float)
    hi_dims = np.asarray(spec.room_max_dims_m, dtype=float)
    for _ in range(MAX_ROOM_TRIES):
        dims = rng.uniform(lo_dims, hi_dims)
        t60 = _draw_t60(spec.t60_mode, float(np.prod(dims)), rng)
        for _ in range(MAX_MIC_TRIES):
            mic = rng.uniform(margin, dims - margin)
            directions = rng.standard_normal((MAX_SOURCE_TRIES, 3))
            directions /= np.linalg.norm(directions, axis=1, keepdims=True)
            distances = rng.uniform(d_min, d_max, MAX_SOURCE_TRIES)
            candidates = mic + directions * distances[:, None]
            inside = np.all((candidates >= margin) & (candidates <= dims - margin), axis=1)
            if not np.any(inside):
                continue
            pick = int(np.argmax(inside))
            source = Position.from_sequence(candidates[pick].tolist())
            mic_position = Position.from_sequence(mic.tolist())
            return ScenarioInstance(
                room=RoomSpec.uniform(dims.tolist(), absorption_for_t60(dims.tolist(), t60)),
                t60_target_s=t60,
                source=source,
                mic=mic_position,
                distance_m=source.distance_to(mic_position),
                seed=int(rng_seed),
                scenario=spec.name,
                t60_mode=_mode_name(spec.t60_mode),
            )
    raise GeometryError(
        f"{spec.name}: no valid source/microphone placement after "
        f"{MAX_ROOM_TRIES} rooms x {MAX_MIC_TRIES} microphones x {MAX_SOURCE_TRIES} sources"
    )


def derive_example_seed(master_seed: int, index: int) -> int:
    """Independent 64-bit seed for example ``index`` of a run."""
    if master_seed < 0 or index < 0:
        raise ConfigError("master seed and example index must be non-negative")
    sequence = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
