"""rir_analysis.py

Acoustic descriptors of an impulse response: Schroeder energy decay curve,
T60 (T30 with T20 fallback), direct-to-reverberant ratio and C50.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, NamedTuple

import numpy as np
from scipy import stats

from farfield.exceptions import AnalysisError
from farfield.simulation.rir import Rir

DEFAULT_DIRECT_HALF_WINDOW_MS = 2.5
EARLY_LIMIT_MS = 50.0
FIT_START_DB = -5.0
T30_END_DB = -35.0
T20_END_DB = -25.0
NOISE_FLOOR_MARGIN_DB = 5.0
MIN_FIT_SPAN_DB = 10.0


@dataclass(frozen=True, eq=False)
class EnergyDecayCurve:
    edc_db: np.ndarray
    sample_rate: float

    def times(self) -> np.ndarray:
        return np.arange(self.edc_db.size) / self.sample_rate


class T60Estimate(NamedTuple):
    t60_s: float
    fit_quality: float
    method: str  # "T30", or "T20" when the decay never reaches -35 dB


@dataclass(frozen=True)
class RirStats:
    t60_s: float | None
    drr_db: float
    c50_db: float
    direct_index: int
    fit_quality: float | None
    t60_method: str | None = None
    t60_error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _ratio_db(numerator: float, denominator: float) -> float:
    if denominator == 0.0:
        return math.inf
    if numerator == 0.0:
        return -math.inf
    return 10.0 * math.log10(numerator / denominator)


def energy_decay_db(energy: np.ndarray) -> np.ndarray:
    """Backward-integrated energy in dB relative to the total (first value 0 dB)."""
    energy = np.asarray(energy, dtype=float)
    remaining = np.cumsum(energy[::-1])[::-1]
    total = remaining[0] if remaining.size else 0.0
    if total <= 0.0:
        raise AnalysisError("cannot integrate the decay of a zero-energy response")
    with np.errstate(divide="ignore"):
        edc = 10.0 * np.log10(remaining / total)
    edc[0] = 0.0
    return edc


def schroeder_edc(rir: Rir) -> EnergyDecayCurve:
    return EnergyDecayCurve(energy_decay_db(rir.samples**2), rir.sample_rate)


def fit_decay(edc_db: np.ndarray, sample_rate: float) -> T60Estimate:
    """Least-squares decay line over [-5, -35] dB (or [-5, -25] dB) of an EDC."""
    finite = edc_db[np.isfinite(edc_db)]
    lowest = float(finite.min()) if finite.size else 0.0
    if lowest <= T30_END_DB:
        end_db, method = T30_END_DB, "T30"
    elif lowest <= T20_END_DB:
        end_db, method = T20_END_DB, "T20"
    else:
        raise AnalysisError(f"decay curve only reaches {lowest:.1f} dB; at least {T20_END_DB:.0f} dB is needed")

    # stay clear of the truncation floor
    final_db = float(finite[-1])
    end_db = max(end_db, final_db + NOISE_FLOOR_MARGIN_DB)
    if FIT_START_DB - end_db < MIN_FIT_SPAN_DB:
        raise AnalysisError(f"usable decay range [{FIT_START_DB}, {end_db:.1f}] dB is too short to fit")

    mask = np.isfinite(edc_db) & (edc_db <= FIT_START_DB) & (edc_db >= end_db)
    if np.count_nonzero(mask) < 3:
        raise AnalysisError("too few decay samples in the fit range")
    times = np.flatnonzero(mask) / sample_rate
    fit = stats.linregress(times, edc_db[mask])
    if not fit.slope < 0:
        raise AnalysisError("decay curve does not decrease over the fit range")
    return T60Estimate(-60.0 / float(fit.slope), abs(float(fit.rvalue)), method)


def estimate_t60(rir: Rir) -> T60Estimate:
    return fit_decay(schroeder_edc(rir).edc_db, rir.sample_rate)


def _require_energy(rir: Rir) -> np.ndarray:
    energy = rir.samples**2
    if not np.any(energy > 0):
        raise AnalysisError("RIR has zero energy")
    return energy


def drr(rir: Rir, direct_half_window_ms: float = DEFAULT_DIRECT_HALF_WINDOW_MS) -> float:
    """Direct-to-reverberant ratio in dB (+inf when there is no reverberant energy).

    The direct window is clipped to the RIR bounds.
    """
    energy = _require_energy(rir)
    half = int(round(direct_half_window_ms * 1e-3 * rir.sample_rate))
    lo = max(0, rir.direct_index - half)
    hi = min(energy.size, rir.direct_index + half + 1)
    direct = float(energy[lo:hi].sum())
    reverberant = float(energy[:lo].sum() + energy[hi:].sum())
    return _ratio_db(direct, reverberant)


def c50(rir: Rir) -> float:
    """Early (first 50 ms after N1) to late energy ratio in dB."""
    energy = _require_energy(rir)
    split = rir.direct_index + int(round(EARLY_LIMIT_MS * 1e-3 * rir.sample_rate))
    early = float(energy[rir.direct_index:split].sum())
    late = float(energy[split:].sum())
    return _ratio_db(early, late)


def analyze_rir(rir: Rir, direct_half_window_ms: float = DEFAULT_DIRECT_HALF_WINDOW_MS) -> RirStats:
    try:
        estimate: T60Estimate | None = estimate_t60(rir)
        error = None
    except AnalysisError as exc:
        estimate, error = None, str(exc)
    return RirStats(
        t60_s=estimate.t60_s if estimate else None,
        drr_db=drr(rir, direct_half_window_ms),
        c50_db=c50(rir),
        direct_index=rir.direct_index,
        fit_quality=estimate.fit_quality if estimate else None,
        t60_method=estimate.method if estimate else None,
        t60_error=error,
    )
