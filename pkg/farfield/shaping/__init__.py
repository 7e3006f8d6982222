"""RIR shaping windows for dereverberation targets."""
from farfield.shaping.windows import (
    DEFAULT_SHAPING,
    AdaptiveT60,
    ConstantT60,
    GainCurve,
    ShapingSpec,
    Truncate,
    apply_shaping,
    shaping_grid,
)

__all__ = [
    "DEFAULT_SHAPING",
    "AdaptiveT60",
    "ConstantT60",
    "GainCurve",
    "ShapingSpec",
    "Truncate",
    "apply_shaping",
    "shaping_grid",
]
