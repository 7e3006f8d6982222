"""Runtime settings read from the environment (optionally a .env file)"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import find_dotenv, load_dotenv

from farfield.exceptions import ConfigError


@dataclass(frozen=True)
class Settings:
    workers: int = 1
    log_level: str = "INFO"
    log_json: bool = False
    log_file: Optional[str] = None


def _flag(value: str) -> bool:
    return value.strip().lower() in {"1", "true", "yes", "on"}


def load_settings(dotenv: bool = True) -> Settings:
    if dotenv:
        # .env of the working directory, not of the installed package
        load_dotenv(find_dotenv(usecwd=True), override=False)
    raw_workers = os.getenv("FARFIELD_WORKERS", "1")
    try:
        workers = int(raw_workers)
    except ValueError:
        raise ConfigError(f"FARFIELD_WORKERS must be an integer, got {raw_workers!r}") from None
    if workers < 1:
        raise ConfigError(f"FARFIELD_WORKERS must be >= 1, got {workers}")
    return Settings(
        workers=workers,
        log_level=os.getenv("FARFIELD_LOG_LEVEL", "INFO").upper(),
        log_json=_flag(os.getenv("FARFIELD_LOG_JSON", "false")),
        log_file=os.getenv("FARFIELD_LOG_FILE") or None,
    )
