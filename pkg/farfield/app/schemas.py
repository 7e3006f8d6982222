from __future__ import annotations

import math
from typing import TYPE_CHECKING, Annotated, Any, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer

from farfield.shaping.windows import ShapingSpec

if TYPE_CHECKING:
    from farfield.analytics.rir_analysis import RirStats
    from farfield.pipeline.scenarios import ScenarioInstance

MANIFEST_SCHEMA_VERSION = 1


def _parse_db(value: Any) -> Any:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in {"+inf", "inf", "infinity"}:
            return math.inf
        if text in {"-inf", "-infinity"}:
            return -math.inf
    return value


def _dump_db(value: float) -> Union[float, str]:
    if math.isinf(value):
        return "+inf" if value > 0 else "-inf"
    return value


# Finite floats stay numbers; infinities become "+inf" / "-inf" in JSON.
DbFloat = Annotated[float, BeforeValidator(_parse_db), PlainSerializer(_dump_db, return_type=Union[float, str])]

Vector3 = Tuple[float, float, float]


# --- RIR descriptors ---

class RirStatsSchema(BaseModel):
    t60_s: Optional[float] = None
    drr_db: DbFloat
    c50_db: DbFloat
    direct_index: int
    fit_quality: Optional[float] = None
    t60_method: Optional[str] = None
    t60_error: Optional[str] = None

    @classmethod
    def from_stats(cls, stats: "RirStats") -> "RirStatsSchema":
        return cls(**stats.to_dict())


class SimulationReport(BaseModel):
    """stdout payload of ``rir simulate``"""
    output: str
    sample_rate: int
    length_samples: int
    room_dims_m: Vector3
    absorption: float
    t60_target_s: Optional[float] = None
    distance_m: float
    stats: RirStatsSchema


# --- Shaping ---

class ShapingSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Literal["nd", "const", "adaptive"] = "const"
    offset_ms: DbFloat = 0.0
    t60max_ms: Optional[float] = 300.0

    @classmethod
    def from_spec(cls, spec: ShapingSpec) -> "ShapingSchema":
        return cls(**spec.to_dict())

    def to_spec(self) -> ShapingSpec:
        return ShapingSpec.from_dict(self.model_dump())


# --- Scenarios ---

class ScenarioInstanceSchema(BaseModel):
    scenario: str
    seed: int
    room_dims_m: Vector3
    volume_m3: float
    surface_m2: float
    absorption: float
    t60_mode: str
    t60_target_s: float
    source: Vector3
    mic: Vector3
    distance_m: float

    @classmethod
    def from_instance(cls, instance: "ScenarioInstance") -> "ScenarioInstanceSchema":
        return cls(**instance.to_dict())


# --- Manifest ---

class ManifestRecord(BaseModel):
    """One line of manifest.jsonl"""
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(MANIFEST_SCHEMA_VERSION, alias="schema")
    example_id: str
    example_index: int
    seed: int

    speech_path: str
    noise_path: Optional[str] = None
    input_path: Optional[str] = None
    target_path: Optional[str] = None
    substitutions: List[str] = Field(default_factory=list)

    scenario: ScenarioInstanceSchema
    absorption_used: float
    sample_rate: int
    segment_seconds: float
    speech_offset: int
    noise_offset: Optional[int] = None

    snr_drawn_db: Optional[float] = None
    snr_realized_db: Optional[float] = None
    snr_reference: Literal["reverberant_speech"] = "reverberant_speech"
    noise_gain: float = 0.0
    reverberate_noise: bool = False
    peak_scale: float

    shaping: ShapingSchema
    rir_stats: RirStatsSchema
    target_rir_stats: RirStatsSchema

    def to_json_line(self) -> str:
        return self.model_dump_json(by_alias=True)
