"""reference.py

Published reverberation times per room type and volume. Only the conference-room
row is used for the volume/T60 law; the rest is reference data for reports.
"""
from __future__ import annotations

import pandas as pd

# room type -> ((volume m^3, T60 s), ...)
ROOM_TYPE_T60: dict[str, tuple[tuple[float, float], ...]] = {
    "radio_studio": ((100.0, 0.4), (500.0, 0.75), (2000.0, 1.2)),
    "catholic_church": ((500.0, 1.3), (1000.0, 1.5), (5000.0, 1.8)),
    "speech_auditorium": ((200.0, 0.7), (1000.0, 0.8), (10000.0, 1.0)),
    "conference_room": ((200.0, 0.6), (1000.0, 0.84), (10000.0, 1.17)),
}


def reference_table() -> pd.DataFrame:
    """Long-format table with columns ``room_type``, ``volume_m3``, ``t60_s``."""
    rows = [
        {"room_type": room_type, "volume_m3": volume, "t60_s": t60}
        for room_type, pairs in ROOM_TYPE_T60.items()
        for volume, t60 in pairs
    ]
    return pd.DataFrame(rows)
