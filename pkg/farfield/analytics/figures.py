"""figures.py

Static figures for reports: the volume/T60 law with its sampling band against
the reference room table, and the shaping gain curves of the preset grid.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from farfield.acoustics.core import DEFAULT_T60_VARIATION, MIN_VOLUME, t60_band_from_volume  # noqa: E402
from farfield.acoustics.reference import reference_table  # noqa: E402
from farfield.exceptions import AudioIOError  # noqa: E402
from farfield.shaping.windows import (  # noqa: E402
    OFFSET_PRESETS_MS,
    T60MAX_PRESETS_MS,
    ShapingSpec,
    Truncate,
    constant_window,
    shaping_grid,
    truncate_window,
)

logger = logging.getLogger(__name__)

T60_LAW_FILE = "t60_volume_law.png"
GAIN_CURVES_FILE = "gain_curves.png"


def _save(fig: plt.Figure, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=150, bbox_inches="tight")
    except OSError as exc:
        raise AudioIOError(f"cannot write figure {path}: {exc}") from exc
    finally:
        plt.close(fig)
    logger.info("wrote %s", path)
    return path


def plot_t60_law(path: Union[str, Path], fraction: float = DEFAULT_T60_VARIATION) -> Path:
    volumes = np.geomspace(max(10.0, MIN_VOLUME * 1.01), 1e5, 400)
    bands = [t60_band_from_volume(v, fraction) for v in volumes]
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(volumes, [b.center_s for b in bands], color="black", label="volume law")
    ax.fill_between(
        volumes,
        [b.low_s for b in bands],
        [b.high_s for b in bands],
        color="grey",
        alpha=0.3,
        label=f"±{fraction:.0%} sampling band",
    )
    table = reference_table()
    for room_type, group in table.groupby("room_type"):
        ax.plot(group["volume_m3"], group["t60_s"], marker="o", linestyle="--", label=room_type.replace("_", " "))
    ax.set_xscale("log")
    ax.set_xlabel("Volume (m³)")
    ax.set_ylabel("T60 (s)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="upper left")
    return _save(fig, Path(path))


def plot_gain_curves(
    path: Union[str, Path],
    specs: Optional[Iterable[ShapingSpec]] = None,
    sample_rate: int = 48000,
    duration_s: float = 0.6,
) -> Path:
    specs = list(specs) if specs is not None else shaping_grid(OFFSET_PRESETS_MS, T60MAX_PRESETS_MS)
    n = int(round(duration_s * sample_rate))
    times_ms = np.arange(n) / sample_rate * 1000.0
    fig, ax = plt.subplots(figsize=(9, 5))
    for spec in specs:
        if isinstance(spec.decay, Truncate):
            gains = truncate_window(n, 0, sample_rate, spec).gains
        else:
            gains = constant_window(n, 0, sample_rate, spec).gains
        with np.errstate(divide="ignore"):
            gains_db = 20.0 * np.log10(gains)
        ax.plot(times_ms, np.maximum(gains_db, -100.0), label=spec.label, linewidth=1)
    ax.axhline(-60.0, color="black", linestyle=":", linewidth=1)
    ax.set_xlabel("Time after direct sound (ms)")
    ax.set_ylabel("Gain (dB)")
    ax.set_ylim(-80.0, 5.0)
    ax.grid(True, alpha=0.3)
    ax.legend(ncol=3, fontsize="small")
    return _save(fig, Path(path))


def write_figures(out_dir: Union[str, Path]) -> List[Path]:
    root = Path(out_dir)
    return [plot_t60_law(root / T60_LAW_FILE), plot_gain_curves(root / GAIN_CURVES_FILE)]
