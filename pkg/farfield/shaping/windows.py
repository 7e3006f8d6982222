"""windows.py

Dereverberation targets: gain windows that keep an RIR intact up to the direct
sound plus an early-reflection offset and then either cut it (N.D.), decay it
at a fixed rate (constant T60max) or at a rate that tops up the RIR's own decay
(adaptive T60max).

All decaying windows reach -60 dB at N1 + T60max regardless of the offset.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Union

import numpy as np

from farfield.analytics.rir_analysis import estimate_t60
from farfield.exceptions import ShapingError
from farfield.simulation.rir import Rir

logger = logging.getLogger(__name__)

OFFSET_PRESETS_MS: tuple[float, ...] = (0.0, 5.0, 30.0, 50.0, 80.0)
T60MAX_PRESETS_MS: tuple[Optional[float], ...] = (None, 150.0, 300.0, 500.0)  # None = N.D.
DECAY_DB = 60.0


@dataclass(frozen=True)
class Truncate:
    """No decay: hard cut after the offset."""


@dataclass(frozen=True)
class ConstantT60:
    t60max_s: float


@dataclass(frozen=True)
class AdaptiveT60:
    t60max_s: float


Decay = Union[Truncate, ConstantT60, AdaptiveT60]

_MODES = {Truncate: "nd", ConstantT60: "const", AdaptiveT60: "adaptive"}


@dataclass(frozen=True)
class ShapingSpec:
    offset_ms: float
    decay: Decay

    def __post_init__(self) -> None:
        if math.isnan(self.offset_ms) or self.offset_ms < 0:
            raise ShapingError(f"offset_ms must be >= 0, got {self.offset_ms}")
        if isinstance(self.decay, (ConstantT60, AdaptiveT60)):
            t60max = self.decay.t60max_s
            if not math.isfinite(t60max) or t60max <= 0:
                raise ShapingError(f"t60max must be a positive number of seconds, got {t60max}")
            if t60max <= self.offset_ms / 1000.0:
                raise ShapingError(
                    f"t60max ({t60max * 1000:g} ms) must exceed the offset ({self.offset_ms:g} ms)"
                )
        elif not isinstance(self.decay, Truncate):
            raise ShapingError(f"unsupported decay {self.decay!r}")

    @classmethod
    def identity(cls) -> "ShapingSpec":
        """Keeps the whole RIR at unit gain."""
        return cls(math.inf, Truncate())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ShapingSpec":
        mode = data.get("mode", "const")
        offset_ms = float(data.get("offset_ms", 0.0))
        t60max_ms = data.get("t60max_ms")
        if mode == "nd":
            return cls(offset_ms, Truncate())
        if t60max_ms is None:
            raise ShapingError(f"mode {mode!r} requires t60max_ms")
        if mode == "const":
            return cls(offset_ms, ConstantT60(float(t60max_ms) / 1000.0))
        if mode == "adaptive":
            return cls(offset_ms, AdaptiveT60(float(t60max_ms) / 1000.0))
        raise ShapingError(f"unknown shaping mode {mode!r}; expected nd, const or adaptive")

    @property
    def mode(self) -> str:
        return _MODES[type(self.decay)]

    @property
    def t60max_ms(self) -> float | None:
        if isinstance(self.decay, Truncate):
            return None
        return self.decay.t60max_s * 1000.0

    def to_dict(self) -> dict[str, Any]:
        return {"offset_ms": self.offset_ms, "mode": self.mode, "t60max_ms": self.t60max_ms}

    @property
    def label(self) -> str:
        decay = "N.D." if self.t60max_ms is None else f"{self.t60max_ms:g}"
        return f"({self.offset_ms:g}, {decay})"


DEFAULT_SHAPING = ShapingSpec(0.0, ConstantT60(0.3))


@dataclass(frozen=True, eq=False)
class GainCurve:
    gains: np.ndarray
    warning: str | None = None

    def is_identity(self) -> bool:
        return bool(np.all(self.gains == 1.0))


def _offset_samples(offset_ms: float, fs: float) -> float:
    if math.isinf(offset_ms):
        return math.inf
    return float(round(offset_ms * 1e-3 * fs))


def _decay_span(spec: ShapingSpec, fs: float) -> int:
    """Samples between the end of the flat region and the -60 dB point."""
    if isinstance(spec.decay, Truncate):
        raise ShapingError("truncation has no decay rate")
    span = round(spec.decay.t60max_s * fs) - _offset_samples(spec.offset_ms, fs)
    if span <= 0:
        raise ShapingError(f"t60max and offset round to the same sample at fs={fs:g} Hz")
    return int(span)


def constant_decay_rate(spec: ShapingSpec, fs: float) -> float:
    """Per-sample exponent q' with w = 10^(-q' k): 3 / ((T60max - offset) fs)."""
    return (DECAY_DB / 20.0) / _decay_span(spec, fs)


def adaptive_decay_rate(spec: ShapingSpec, measured_t60: float, fs: float) -> float:
    """Exponent that, added to the RIR's own decay, reaches -60 dB at N1 + T60max.

    With no offset this is 3/(T60max fs) - 3/(T60 fs).
    """
    if isinstance(spec.decay, Truncate):
        raise ShapingError("truncation has no decay rate")
    three = DECAY_DB / 20.0
    own_decay = three * round(spec.decay.t60max_s * fs) / (measured_t60 * fs)
    return (three - own_decay) / _decay_span(spec, fs)


def _flat_then_decay(rir_len: int, n1: int, n_off: float, q: float) -> np.ndarray:
    gains = np.ones(rir_len)
    if math.isinf(n_off):
        return gains
    start = n1 + int(n_off)
    if start + 1 < rir_len:
        k = np.arange(1, rir_len - start)
        gains[start + 1:] = 10.0 ** (-q * k)
    return gains


def constant_window(rir_len: int, n1: int, fs: float, spec: ShapingSpec) -> GainCurve:
    if not isinstance(spec.decay, ConstantT60):
        raise ShapingError(f"constant window needs a ConstantT60 spec, got {spec.mode}")
    q = constant_decay_rate(spec, fs)
    return GainCurve(_flat_then_decay(rir_len, n1, _offset_samples(spec.offset_ms, fs), q))


def adaptive_window(rir: Rir, measured_t60: float, spec: ShapingSpec) -> GainCurve:
    if not isinstance(spec.decay, AdaptiveT60):
        raise ShapingError(f"adaptive window needs an AdaptiveT60 spec, got {spec.mode}")
    if measured_t60 <= spec.decay.t60max_s:
        message = (
            f"measured T60 {measured_t60:.3f} s does not exceed T60max {spec.decay.t60max_s:.3f} s; "
            "returning the identity window"
        )
        logger.info(message)
        return GainCurve(np.ones(len(rir)), warning=message)
    q = adaptive_decay_rate(spec, measured_t60, rir.sample_rate)
    n_off = _offset_samples(spec.offset_ms, rir.sample_rate)
    return GainCurve(_flat_then_decay(len(rir), rir.direct_index, n_off, q))


def truncate_window(rir_len: int, n1: int, fs: float, spec: ShapingSpec) -> GainCurve:
    if not isinstance(spec.decay, Truncate):
        raise ShapingError(f"truncate window needs an N.D. spec, got {spec.mode}")
    gains = np.ones(rir_len)
    n_off = _offset_samples(spec.offset_ms, fs)
    if not math.isinf(n_off):
        gains[n1 + int(n_off) + 1:] = 0.0
    return GainCurve(gains)


def window_for(rir: Rir, spec: ShapingSpec, measured_t60: float | None = None) -> GainCurve:
    if isinstance(spec.decay, Truncate):
        return truncate_window(len(rir), rir.direct_index, rir.sample_rate, spec)
    if isinstance(spec.decay, ConstantT60):
        return constant_window(len(rir), rir.direct_index, rir.sample_rate, spec)
    if measured_t60 is None:
        measured_t60 = estimate_t60(rir).t60_s
    return adaptive_window(rir, measured_t60, spec)


def apply_shaping(rir: Rir, spec: ShapingSpec, measured_t60: float | None = None) -> Rir:
    """Multiply ``rir`` by the window of ``spec``; length and N1 are preserved."""
    curve = window_for(rir, spec, measured_t60)
    return rir.with_samples(rir.samples * curve.gains)


def shaping_grid(
    offsets_ms: Iterable[float] = OFFSET_PRESETS_MS,
    t60max_ms: Iterable[Optional[float]] = T60MAX_PRESETS_MS,
    adaptive: bool = False,
) -> list[ShapingSpec]:
    """Every feasible (offset, T60max) pair; pairs with T60max <= offset are skipped."""
    specs = []
    t60max_values = list(t60max_ms)
    for offset in offsets_ms:
        for t60max in t60max_values:
            if t60max is None:
                specs.append(ShapingSpec(offset, Truncate()))
            elif t60max > offset:
                decay: Decay = AdaptiveT60(t60max / 1000.0) if adaptive else ConstantT60(t60max / 1000.0)
                specs.append(ShapingSpec(offset, decay))
    return specs
