"""Error recording, exit-code mapping and bounded retries"""
from __future__ import annotations

import logging
import traceback
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Type, TypeVar

from farfield.exceptions import ErrorCategory, FarfieldError

logger = logging.getLogger(__name__)

T = TypeVar("T")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_GENERATION = 4

EXIT_CODES: Dict[ErrorCategory, int] = {
    ErrorCategory.VALIDATION: EXIT_VALIDATION,
    ErrorCategory.IO: EXIT_IO,
    ErrorCategory.GENERATION: EXIT_GENERATION,
}


@dataclass
class ErrorContext:
    """Where an error happened"""
    command: Optional[str] = None
    example_index: Optional[int] = None


@dataclass
class ErrorRecord:
    error_id: str
    category: ErrorCategory
    message: str
    stack_trace: str
    context: ErrorContext = field(default_factory=ErrorContext)


def categorize(error: BaseException) -> ErrorCategory:
    if isinstance(error, FarfieldError):
        return error.category
    if isinstance(error, OSError):
        return ErrorCategory.IO
    if isinstance(error, ValueError):
        return ErrorCategory.VALIDATION
    return ErrorCategory.GENERATION


def exit_code_for(error: BaseException) -> int:
    return EXIT_CODES[categorize(error)]


def format_error(error: BaseException) -> str:
    """One-line, machine-parsable error message."""
    message = " ".join(str(error).split()) or type(error).__name__
    index = getattr(error, "example_index", None)
    if index is not None and f"example {index}" not in message:
        message = f"example {index}: {message}"
    return f"error: {message}"


class ErrorHandler:
    """Keeps the errors seen during one CLI invocation"""

    def __init__(self) -> None:
        self.error_records: List[ErrorRecord] = []
        self.error_counts: Dict[str, int] = {}

    def record_error(self, error: BaseException, context: Optional[ErrorContext] = None) -> ErrorRecord:
        category = categorize(error)
        record = ErrorRecord(
            error_id=f"{category.value}_{len(self.error_records) + 1}",
            category=category,
            message=str(error),
            stack_trace="".join(traceback.format_exception(type(error), error, error.__traceback__)),
            context=context or ErrorContext(),
        )
        self.error_records.append(record)
        self.error_counts[category.value] = self.error_counts.get(category.value, 0) + 1
        logger.debug("Error recorded [%s] %s", record.error_id, record.stack_trace)
        return record

    def get_error_statistics(self) -> Dict[str, Any]:
        return {
            "total_errors": len(self.error_records),
            "errors_by_category": dict(self.error_counts),
        }


class RetryConfig:
    """Attempt budget for retried operations (no sleeping: retries are local and deterministic)"""

    def __init__(self, max_attempts: int = 3):
        if max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        self.max_attempts = max_attempts


def retry_on(
    func: Callable[[int], T],
    config: RetryConfig,
    exceptions: Tuple[Type[BaseException], ...],
    on_failure: Optional[Callable[[int, BaseException], None]] = None,
) -> T:
    """Call ``func(attempt)`` until it succeeds or the attempts run out.

    The last exception is re-raised once the budget is exhausted.
    """
    last_exception: Optional[BaseException] = None
    for attempt in range(config.max_attempts):
        try:
            return func(attempt)
        except exceptions as exc:
            last_exception = exc
            if on_failure is not None:
                on_failure(attempt, exc)
            logger.debug("attempt %d/%d failed: %s", attempt + 1, config.max_attempts, exc)
    assert last_exception is not None
    raise last_exception


# Crop windows are cheap to redraw; file substitution walks the whole list instead.
CROP_RETRY_CONFIG = RetryConfig(max_attempts=10)
