import pickle

import pytest

from farfield.app.error_handling import (
    EXIT_GENERATION,
    EXIT_IO,
    EXIT_VALIDATION,
    ErrorContext,
    ErrorHandler,
    RetryConfig,
    categorize,
    exit_code_for,
    format_error,
    retry_on,
)
from farfield.exceptions import (
    AcousticsDomainError,
    AudioIOError,
    ConfigError,
    ErrorCategory,
    GenerationError,
    SignalError,
)


@pytest.mark.parametrize(
    "error, code",
    [
        (AcousticsDomainError("v"), EXIT_VALIDATION),
        (ConfigError("c"), EXIT_VALIDATION),
        (ValueError("plain"), EXIT_VALIDATION),
        (AudioIOError("io"), EXIT_IO),
        (FileNotFoundError("gone"), EXIT_IO),
        (GenerationError("gen", example_index=2), EXIT_GENERATION),
        (RuntimeError("other"), EXIT_GENERATION),
    ],
)
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_format_error_is_one_line():
    assert format_error(ConfigError("bad\nvalue")) == "error: bad value"
    assert format_error(GenerationError("no speech", example_index=4)) == "error: example 4: no speech"
    assert format_error(GenerationError("example 4 failed", example_index=4)) == "error: example 4 failed"
    assert format_error(RuntimeError()) == "error: RuntimeError"


def test_generation_error_survives_pickling():
    error = pickle.loads(pickle.dumps(GenerationError("boom", example_index=7)))
    assert isinstance(error, GenerationError)
    assert error.example_index == 7
    assert str(error) == "boom"
    assert error.category is ErrorCategory.GENERATION


def test_retry_returns_first_success():
    calls = []

    def flaky(attempt):
        calls.append(attempt)
        if attempt < 2:
            raise SignalError("silent")
        return "ok"

    assert retry_on(flaky, RetryConfig(5), (SignalError,)) == "ok"
    assert calls == [0, 1, 2]


def test_retry_reraises_last_error_and_reports_failures():
    failures = []

    def always_fails(attempt):
        raise SignalError(f"attempt {attempt}")

    with pytest.raises(SignalError, match="attempt 2"):
        retry_on(always_fails, RetryConfig(3), (SignalError,), on_failure=lambda i, e: failures.append(i))
    assert failures == [0, 1, 2]


def test_retry_does_not_catch_other_errors():
    def broken(attempt):
        raise ConfigError("not retried")

    with pytest.raises(ConfigError):
        retry_on(broken, RetryConfig(3), (SignalError,))


def test_retry_config_validation():
    with pytest.raises(ValueError):
        RetryConfig(0)


def test_error_handler_statistics():
    handler = ErrorHandler()
    record = handler.record_error(AudioIOError("x"), ErrorContext(command="dataset generate", example_index=3))
    handler.record_error(ConfigError("y"))
    handler.record_error(ConfigError("z"))
    assert record.error_id == "io_1"
    assert record.context.example_index == 3
    assert categorize(ConfigError("y")) is ErrorCategory.VALIDATION
    stats = handler.get_error_statistics()
    assert stats == {"total_errors": 3, "errors_by_category": {"io": 1, "validation": 2}}
