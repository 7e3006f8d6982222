"""exceptions.py

Exception hierarchy shared by the library and the CLI. Each error carries an
``ErrorCategory`` which the application layer maps to an exit code.
"""
from __future__ import annotations

from enum import Enum


class ErrorCategory(Enum):
    VALIDATION = "validation"
    IO = "io"
    GENERATION = "generation"


class FarfieldError(Exception):
    """Base class for all package errors."""

    category: ErrorCategory = ErrorCategory.VALIDATION


class AcousticsDomainError(FarfieldError, ValueError):
    """Input outside the domain of an acoustic law (volume, T60, absorption)."""


class GeometryError(FarfieldError, ValueError):
    """Invalid room or source/microphone placement."""


class SimulationError(FarfieldError, ValueError):
    """Simulator request that cannot be realised."""


class ShapingError(FarfieldError, ValueError):
    """Invalid shaping window parameters."""


class AnalysisError(FarfieldError, ValueError):
    """RIR descriptor that cannot be measured on the given signal."""


class SignalError(FarfieldError, ValueError):
    """Signal metric preconditions violated (length mismatch, zero energy)."""


class ConfigError(FarfieldError, ValueError):
    """Malformed configuration, flag or unsupported audio layout."""


class AudioIOError(FarfieldError, OSError):
    category = ErrorCategory.IO


class GenerationError(FarfieldError, RuntimeError):
    """Dataset example that could not be produced after retries."""

    category = ErrorCategory.GENERATION

    def __init__(self, message: str, example_index: int | None = None):
        super().__init__(message)
        self.example_index = example_index

    def __reduce__(self) -> tuple[type[GenerationError], tuple[str, int | None]]:
        # keeps example_index across process boundaries
        return (type(self), (str(self), self.example_index))
