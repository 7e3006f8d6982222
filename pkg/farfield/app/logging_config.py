import logging
import logging.config
import os
from typing import Any, Dict, Optional

from farfield.app.settings import Settings


class ExampleContextFilter(logging.Filter):
    """Stamp every record with the dataset example it belongs to ("-" outside generation)"""

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "example_id"):
            record.example_id = "-"
        return True


def _json_formatter_class() -> str:
    """Dotted path of the JSON formatter, or the plain formatter when python-json-logger is missing."""
    try:
        import pythonjsonlogger.json as _jj  # type: ignore  # noqa: F401
        return "pythonjsonlogger.json.JsonFormatter"
    except ImportError:  # pragma: no cover
        return "logging.Formatter"


def build_logging_config(settings: Optional[Settings] = None) -> Dict[str, Any]:
    settings = settings or Settings()
    formatter = "json" if settings.log_json else "detailed"
    handlers: Dict[str, Any] = {
        "console": {
            "class": "logging.StreamHandler",
            "level": settings.log_level,
            "formatter": formatter,
            "filters": ["example_context"],
            "stream": "ext://sys.stderr",
        }
    }
    if settings.log_file:
        log_dir = os.path.dirname(settings.log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        handlers["file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "level": "DEBUG",
            "formatter": formatter,
            "filters": ["example_context"],
            "filename": settings.log_file,
            "maxBytes": 10485760,  # 10MB
            "backupCount": 5,
        }

    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "detailed": {
                "format": "%(asctime)s - %(name)s - %(levelname)s - [%(example_id)s] %(message)s"
            },
            "json": {
                "format": "%(asctime)s %(name)s %(levelname)s %(example_id)s %(message)s",
                "class": _json_formatter_class(),
            },
        },
        "filters": {
            "example_context": {
                "()": ExampleContextFilter,
            }
        },
        "handlers": handlers,
        "loggers": {
            "farfield": {
                "level": "DEBUG",
                "handlers": list(handlers),
                "propagate": False,
            },
            "matplotlib": {"level": "WARNING"},
        },
        "root": {"level": "WARNING", "handlers": ["console"]},
    }


def setup_logging(settings: Optional[Settings] = None) -> logging.Logger:
    """Configure logging for the CLI; stdout stays free for command output."""
    logging.config.dictConfig(build_logging_config(settings))
    logger = logging.getLogger("farfield")
    logger.debug("Logging configuration initialized", extra={"component": "logging_config"})
    return logger
