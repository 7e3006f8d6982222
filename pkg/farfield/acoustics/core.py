"""core.py

Room geometry types, the conference-room volume/T60 law and the absorption
inversions (Eyring primary, Sabine cross-check) that turn a target T60 into a
wall absorption coefficient for the simulator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from farfield.exceptions import AcousticsDomainError, GeometryError

DEFAULT_SPEED_OF_SOUND = 343.0
SABINE_CONSTANT = 0.161  # s/m, tied to c = 343 m/s
DEFAULT_WALL_MARGIN = 0.3

# T60 = a * ln(V) - b, fitted on conference rooms
T60_LAW_A = 0.145
T60_LAW_B = 0.165
MIN_VOLUME = math.exp(T60_LAW_B / T60_LAW_A)
DEFAULT_T60_VARIATION = 0.2

N_WALLS = 6  # x0, x1, y0, y1, z0, z1


@dataclass(frozen=True)
class RoomSpec:
    """Shoebox room. ``absorption`` holds one coefficient per wall (x0, x1, y0, y1, z0, z1)."""

    length_m: float
    width_m: float
    height_m: float
    absorption: tuple[float, ...] = field(default=(1.0,) * N_WALLS)
    speed_of_sound: float = DEFAULT_SPEED_OF_SOUND

    def __post_init__(self) -> None:
        for name, value in (("length_m", self.length_m), ("width_m", self.width_m), ("height_m", self.height_m)):
            if not math.isfinite(value) or value <= 0:
                raise GeometryError(f"room {name} must be positive, got {value}")
        absorption = tuple(float(a) for a in self.absorption)
        if len(absorption) != N_WALLS:
            raise GeometryError(f"expected {N_WALLS} wall absorption coefficients, got {len(absorption)}")
        bad = [a for a in absorption if not (0.0 < a <= 1.0)]
        if bad:
            raise GeometryError(f"absorption coefficients must lie in (0, 1], got {bad}")
        if self.speed_of_sound <= 0:
            raise GeometryError(f"speed_of_sound must be positive, got {self.speed_of_sound}")
        object.__setattr__(self, "absorption", absorption)

    @classmethod
    def uniform(cls, dims: Sequence[float], alpha: float, speed_of_sound: float = DEFAULT_SPEED_OF_SOUND) -> "RoomSpec":
        length, width, height = _unpack_dims(dims)
        return cls(length, width, height, (float(alpha),) * N_WALLS, speed_of_sound)

    @property
    def dims(self) -> tuple[float, float, float]:
        return (self.length_m, self.width_m, self.height_m)

    def volume(self) -> float:
        return self.length_m * self.width_m * self.height_m

    def surface_area(self) -> float:
        lx, ly, lz = self.dims
        return 2.0 * (lx * ly + lx * lz + ly * lz)

    def wall_areas(self) -> np.ndarray:
        lx, ly, lz = self.dims
        return np.array([ly * lz, ly * lz, lx * lz, lx * lz, lx * ly, lx * ly])

    def mean_absorption(self) -> float:
        """Area-weighted mean absorption coefficient."""
        areas = self.wall_areas()
        return float(np.dot(areas, self.absorption) / areas.sum())


@dataclass(frozen=True)
class T60Band:
    center_s: float
    low_s: float
    high_s: float

    @classmethod
    def around(cls, center_s: float, fraction: float = DEFAULT_T60_VARIATION) -> "T60Band":
        if center_s <= 0:
            raise AcousticsDomainError(f"T60 band center must be positive, got {center_s}")
        if not (0.0 <= fraction < 1.0):
            raise AcousticsDomainError(f"T60 variation must be in [0, 1), got {fraction}")
        return cls(center_s, (1.0 - fraction) * center_s, (1.0 + fraction) * center_s)

    def contains(self, t60_s: float) -> bool:
        return self.low_s <= t60_s <= self.high_s


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "Position":
        if len(values) != 3:
            raise GeometryError(f"position needs 3 coordinates, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def distance_to(self, other: "Position") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def validate_in(self, room: RoomLike, margin_m: float = DEFAULT_WALL_MARGIN) -> None:
        """Raise ``GeometryError`` unless the point keeps ``margin_m`` from every wall."""
        dims = _room_dims(room)
        for axis, coord, size in zip("xyz", (self.x, self.y, self.z), dims):
            if not (margin_m <= coord <= size - margin_m) or not (0.0 < coord < size):
                raise GeometryError(
                    f"{axis}={coord:.3f} m is outside the room interior [{margin_m}, {size - margin_m:.3f}] m"
                )


RoomLike = Union[RoomSpec, Sequence[float]]


def _unpack_dims(dims: Sequence[float]) -> tuple[float, float, float]:
    if len(dims) != 3:
        raise GeometryError(f"room dimensions need 3 values, got {len(dims)}")
    length, width, height = (float(d) for d in dims)
    if min(length, width, height) <= 0:
        raise GeometryError(f"room dimensions must be positive, got {tuple(dims)}")
    return length, width, height


def _room_dims(room: RoomLike) -> tuple[float, float, float]:
    if isinstance(room, RoomSpec):
        return room.dims
    return _unpack_dims(room)


def _volume_and_surface(room: RoomLike) -> tuple[float, float]:
    lx, ly, lz = _room_dims(room)
    return lx * ly * lz, 2.0 * (lx * ly + lx * lz + ly * lz)


def t60_from_volume(volume: float) -> float:
    """Conference-room reverberation time (s) for a room volume in m^3."""
    if not math.isfinite(volume) or volume <= MIN_VOLUME:
        raise AcousticsDomainError(
            f"volume must exceed {MIN_VOLUME:.3f} m^3 for a positive T60, got {volume}"
        )
    return T60_LAW_A * math.log(volume) - T60_LAW_B


def t60_band_from_volume(volume: float, fraction: float = DEFAULT_T60_VARIATION) -> T60Band:
    return T60Band.around(t60_from_volume(volume), fraction)


def absorption_for_t60(room: RoomLike, t60: float) -> float:
    """Uniform absorption coefficient realising ``t60`` by Eyring's formula.

    Always in (0, 1), unlike Sabine which exceeds 1 for large rooms with short T60.
    """
    if not math.isfinite(t60) or t60 <= 0:
        raise AcousticsDomainError(f"t60 must be positive, got {t60}")
    volume, surface = _volume_and_surface(room)
    alpha = -math.expm1(-SABINE_CONSTANT * volume / (surface * t60))
    # keep strictly inside (0, 1) at floating-point extremes
    return min(max(alpha, np.finfo(float).tiny), np.nextafter(1.0, 0.0))


def sabine_absorption_for_t60(room: RoomLike, t60: float) -> float:
    if not math.isfinite(t60) or t60 <= 0:
        raise AcousticsDomainError(f"t60 must be positive, got {t60}")
    volume, surface = _volume_and_surface(room)
    return SABINE_CONSTANT * volume / (surface * t60)


def sabine_t60(room: RoomSpec) -> float:
    return SABINE_CONSTANT * room.volume() / (room.surface_area() * room.mean_absorption())


def eyring_t60(room: RoomSpec) -> float:
    alpha = room.mean_absorption()
    if alpha >= 1.0:
        return 0.0
    return SABINE_CONSTANT * room.volume() / (-room.surface_area() * math.log1p(-alpha))
