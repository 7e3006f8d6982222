"""dataset.py

Seeded, parallel generation of (input, target) WAV pairs plus a JSON Lines
manifest, and pandas helpers to load and summarise that manifest.

Each example derives its own seed from (master seed, index), so examples are
independent of each other and of the worker count; results are consumed in
index order and the manifest is written in that order.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from farfield.app.audio_io import read_mono, write_wav
from farfield.app.schemas import ManifestRecord
from farfield.exceptions import AudioIOError, ConfigError, FarfieldError, GenerationError, SignalError
from farfield.pipeline.config import DatasetConfig
from farfield.pipeline.mixing import MixSpec, synthesize_example
from farfield.pipeline.scenarios import ScenarioSpec, derive_example_seed, sample_scenario

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
INPUT_DIR = "input"
TARGET_DIR = "target"

# spawn key of the per-example file-selection stream
_FILE_STREAM = 2


@dataclass(frozen=True)
class ExampleJob:
    """Everything a worker needs to build one example."""

    index: int
    master_seed: int
    scenario: ScenarioSpec
    mix: MixSpec
    speech_files: tuple[str, ...]
    noise_files: tuple[str, ...]
    out_dir: str


def _load_usable(
    paths: tuple[str, ...],
    start: int,
    sample_rate: int,
    min_samples: int,
    kind: str,
    example_id: str,
) -> tuple[str, np.ndarray, list[str]]:
    """First readable file at or after ``start`` (cyclically) long enough for a segment."""
    substitutions: list[str] = []
    for step in range(len(paths)):
        path = paths[(start + step) % len(paths)]
        try:
            samples, _ = read_mono(path, expected_rate=sample_rate)
            if samples.size < min_samples:
                raise SignalError(f"{samples.size} samples, need at least {min_samples}")
            return path, samples, substitutions
        except (AudioIOError, ConfigError, SignalError) as exc:
            # workers may run without logging configured; the parent reports substitutions
            logger.debug("skipping %s file %s: %s", kind, path, exc, extra={"example_id": example_id})
            substitutions.append(path)
    raise GenerationError(f"no usable {kind} file among {len(paths)} candidates")


def _relative(path: Path, root: Path) -> str:
    return path.relative_to(root).as_posix()


def generate_example(job: ExampleJob) -> ManifestRecord:
    example_id = f"ex_{job.index:06d}"
    started = time.perf_counter()
    try:
        seed = derive_example_seed(job.master_seed, job.index)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_FILE_STREAM,)))
        speech_start = int(rng.integers(len(job.speech_files)))
        noise_start = int(rng.integers(len(job.noise_files))) if job.noise_files else 0

        segment = job.mix.segment_samples
        speech_path, speech, substitutions = _load_usable(
            job.speech_files, speech_start, job.mix.sample_rate, segment, "speech", example_id
        )
        noise_path, noise = None, None
        if job.mix.add_noise:
            # noise shorter than the segment is loop-tiled
            noise_path, noise, skipped = _load_usable(
                job.noise_files, noise_start, job.mix.sample_rate, 1, "noise", example_id
            )
            substitutions += skipped

        instance = sample_scenario(job.scenario, seed)
        mixture, target, record = synthesize_example(instance, speech, noise, job.mix, job.index)

        root = Path(job.out_dir)
        input_path = write_wav(root / INPUT_DIR / f"{example_id}.wav", mixture, job.mix.sample_rate)
        target_path = write_wav(root / TARGET_DIR / f"{example_id}.wav", target, job.mix.sample_rate)
    except GenerationError as exc:
        exc.example_index = job.index
        raise
    except FarfieldError as exc:
        if isinstance(exc, AudioIOError):
            raise
        raise GenerationError(f"example {job.index} failed: {exc}", example_index=job.index) from exc

    logger.debug(
        "example built in %.2f s", time.perf_counter() - started, extra={"example_id": example_id}
    )
    return record.model_copy(
        update={
            "speech_path": speech_path,
            "noise_path": noise_path,
            "input_path": _relative(input_path, root),
            "target_path": _relative(target_path, root),
            "substitutions": substitutions,
        }
    )


def iter_examples(config: DatasetConfig, master_seed: int, out_dir: Path, workers: int = 1) -> Iterator[ManifestRecord]:
    """Yield manifest records in index order while workers build the examples."""
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    speech_files = tuple(config.speech_files())
    noise_files = tuple(config.noise_files())
    scenario = config.scenario_spec()
    mix = config.mix_spec()
    jobs = (
        ExampleJob(i, master_seed, scenario, mix, speech_files, noise_files, str(out_dir))
        for i in range(config.count)
    )
    parallel = Parallel(n_jobs=workers, return_as="generator")
    yield from parallel(delayed(generate_example)(job) for job in jobs)


def generate_dataset(
    config: DatasetConfig,
    master_seed: Optional[int],
    out_dir: Union[str, Path],
    workers: int = 1,
) -> List[ManifestRecord]:
    """Write ``config.count`` input/target pairs and ``manifest.jsonl`` under ``out_dir``."""
    seed = config.master_seed if master_seed is None else master_seed
    if seed < 0:
        raise ConfigError(f"master seed must be non-negative, got {seed}")
    root = Path(out_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise AudioIOError(f"cannot create output directory {root}: {exc}") from exc

    records: List[ManifestRecord] = []
    manifest_path = root / MANIFEST_NAME
    logger.info("generating %d examples into %s with %d worker(s)", config.count, root, workers)
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        for record in iter_examples(config, seed, root, workers):
            fh.write(record.to_json_line() + "\n")
            records.append(record)
            for path in record.substitutions:
                logger.warning("substituted unusable file %s", path, extra={"example_id": record.example_id})
            logger.info("generated %d/%d examples", len(records), config.count)
    return records


def load_manifest(path: Union[str, Path]) -> pd.DataFrame:
    """Flatten manifest.jsonl into one row per example."""
    manifest_path = Path(path)
    try:
        lines = manifest_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise AudioIOError(f"cannot read manifest {manifest_path}: {exc}") from exc
    rows = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = ManifestRecord.model_validate_json(line)
        except ValueError as exc:
            raise ConfigError(f"{manifest_path}:{number}: invalid manifest record: {exc}") from None
        rows.append(record.model_dump(mode="python"))
    frame = pd.json_normalize(rows, sep=".")
    if frame.empty:
        raise ConfigError(f"manifest {manifest_path} has no records")
    return frame


SUMMARY_COLUMNS = (
    "scenario.t60_target_s",
    "scenario.distance_m",
    "scenario.volume_m3",
    "rir_stats.t60_s",
    "rir_stats.drr_db",
    "rir_stats.c50_db",
    "target_rir_stats.t60_s",
    "target_rir_stats.drr_db",
    "snr_drawn_db",
    "snr_realized_db",
)


def summarize_manifest(frame: pd.DataFrame) -> pd.DataFrame:
    """count/mean/std/min/max per numeric descriptor; infinities are left out of the stats."""
    present = [c for c in SUMMARY_COLUMNS if c in frame.columns]
    numeric = frame[present].apply(pd.to_numeric, errors="coerce").replace([np.inf, -np.inf], np.nan)
    summary = numeric.agg(["count", "mean", "std", "min", "max"]).T
    summary.index.name = "column"
    return summary
