"""Room acoustics primitives: geometry, volume/T60 law, absorption inversion."""
from farfield.acoustics.core import (
    DEFAULT_SPEED_OF_SOUND,
    DEFAULT_WALL_MARGIN,
    MIN_VOLUME,
    Position,
    RoomSpec,
    T60Band,
    absorption_for_t60,
    eyring_t60,
    sabine_absorption_for_t60,
    sabine_t60,
    t60_band_from_volume,
    t60_from_volume,
)

__all__ = [
    "DEFAULT_SPEED_OF_SOUND",
    "DEFAULT_WALL_MARGIN",
    "MIN_VOLUME",
    "Position",
    "RoomSpec",
    "T60Band",
    "absorption_for_t60",
    "eyring_t60",
    "sabine_absorption_for_t60",
    "sabine_t60",
    "t60_band_from_volume",
    "t60_from_volume",
]
