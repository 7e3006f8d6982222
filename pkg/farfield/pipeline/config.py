"""config.py

JSON dataset configuration, validated with pydantic and turned into the
ScenarioSpec and MixSpec objects the generator consumes.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from farfield.app.audio_io import SUPPORTED_SAMPLE_RATES
from farfield.app.schemas import ShapingSchema
from farfield.exceptions import ConfigError, FarfieldError
from farfield.pipeline.mixing import MixSpec
from farfield.pipeline.scenarios import (
    NaiveUniform,
    ScenarioSpec,
    T60Mode,
    VolumeBased,
    get_scenario,
)

Vector3 = Tuple[float, float, float]


class ShapingConfig(ShapingSchema):
    pass


class T60ModeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["volume", "naive"] = "volume"
    fraction: float = 0.2
    lo_s: float = 0.1
    hi_s: float = 1.8

    def to_mode(self) -> T60Mode:
        if self.kind == "naive":
            return NaiveUniform(self.lo_s, self.hi_s)
        return VolumeBased(self.fraction)


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    distance_range_m: Tuple[float, float]
    room_min_dims_m: Vector3
    room_max_dims_m: Vector3
    wall_margin_m: float = 0.3


class DatasetConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: Union[str, ScenarioConfig] = "far_large"
    t60_mode: Union[Literal["volume", "naive"], T60ModeConfig] = "volume"
    snr_range_db: Tuple[float, float] = (-5.0, 40.0)
    shaping: ShapingConfig = Field(default_factory=ShapingConfig)
    sample_rate: int = 48000
    segment_seconds: float = Field(10.0, gt=0)
    count: int = Field(..., gt=0)
    speech_list: Union[List[str], str]
    noise_list: Union[List[str], str]
    master_seed: int = Field(0, ge=0)
    reverberate_noise: bool = False
    add_noise: bool = True
    calibrate_absorption: bool = True
    base_dir: Optional[str] = Field(None, exclude=True)

    @field_validator("sample_rate")
    @classmethod
    def _supported_rate(cls, value: int) -> int:
        if value not in SUPPORTED_SAMPLE_RATES:
            raise ValueError(f"sample_rate must be one of {SUPPORTED_SAMPLE_RATES}")
        return value

    @model_validator(mode="after")
    def _ordered_snr(self) -> "DatasetConfig":
        lo, hi = self.snr_range_db
        if lo > hi:
            raise ValueError(f"snr_range_db lower bound {lo} exceeds upper bound {hi}")
        return self

    def _resolve(self, entry: str) -> Path:
        path = Path(entry).expanduser()
        if not path.is_absolute() and self.base_dir:
            path = Path(self.base_dir) / path
        return path

    def _file_list(self, value: Union[List[str], str], field_name: str) -> List[str]:
        if isinstance(value, str):
            list_file = self._resolve(value)
            try:
                lines = list_file.read_text(encoding="utf-8").splitlines()
            except OSError as exc:
                raise ConfigError(f"{field_name}: cannot read list file {list_file}: {exc}") from exc
            list_dir = str(list_file.parent)
            entries = [line.strip() for line in lines]
            paths = [
                str(Path(e) if Path(e).is_absolute() else Path(list_dir) / e)
                for e in entries
                if e and not e.startswith("#")
            ]
        else:
            paths = [str(self._resolve(e)) for e in value if e.strip()]
        if not paths:
            raise ConfigError(f"{field_name} is empty")
        return paths

    def speech_files(self) -> List[str]:
        return self._file_list(self.speech_list, "speech_list")

    def noise_files(self) -> List[str]:
        if not self.add_noise:
            return []
        return self._file_list(self.noise_list, "noise_list")

    def scenario_spec(self) -> ScenarioSpec:
        if isinstance(self.scenario, str):
            base = get_scenario(self.scenario)
        else:
            base = ScenarioSpec(
                name=self.scenario.name,
                distance_range_m=self.scenario.distance_range_m,
                room_min_dims_m=self.scenario.room_min_dims_m,
                room_max_dims_m=self.scenario.room_max_dims_m,
                wall_margin_m=self.scenario.wall_margin_m,
            )
        mode = self.t60_mode if isinstance(self.t60_mode, T60ModeConfig) else T60ModeConfig(kind=self.t60_mode)
        return base.with_t60_mode(mode.to_mode())

    def mix_spec(self) -> MixSpec:
        return MixSpec(
            snr_range_db=self.snr_range_db,
            segment_seconds=self.segment_seconds,
            shaping=self.shaping.to_spec(),
            sample_rate=self.sample_rate,
            reverberate_noise=self.reverberate_noise,
            add_noise=self.add_noise,
            calibrate_absorption=self.calibrate_absorption,
        )


def _describe(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        location = ".".join(str(p) for p in err["loc"]) or "config"
        parts.append(f"{location}: {err['msg']}")
    return "; ".join(parts)


def parse_dataset_config(data: dict, base_dir: Union[str, Path, None] = None) -> DatasetConfig:
    try:
        config = DatasetConfig.model_validate({**data, "base_dir": str(base_dir) if base_dir else None})
    except ValidationError as exc:
        raise ConfigError(f"invalid dataset config: {_describe(exc)}") from None
    # invalid scenario or mix combinations fail at load time
    try:
        config.scenario_spec()
        config.mix_spec()
    except ConfigError:
        raise
    except FarfieldError as exc:
        raise ConfigError(f"invalid dataset config: {exc}") from exc
    return config


def load_dataset_config(path: Union[str, Path]) -> DatasetConfig:
    config_path = Path(path)
    try:
        data = json.loads(config_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {config_path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {config_path} must contain a JSON object")
    return parse_dataset_config(data, base_dir=config_path.resolve().parent)
