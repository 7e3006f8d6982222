"""reporting.py

Render a Markdown summary of a generated dataset from its manifest using a
Jinja2 template.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Union

import pandas as pd
from jinja2 import Environment, FileSystemLoader, select_autoescape

from farfield.exceptions import AudioIOError
from farfield.pipeline.dataset import load_manifest, summarize_manifest

TEMPLATE_DIR = Path(__file__).resolve().parent / "templates"
TEMPLATE_FILE = "dataset_report.md.j2"


def _fmt(value: Any) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "n/a"
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def _joined(frame: pd.DataFrame, column: str) -> str:
    if column not in frame.columns:
        return "n/a"
    return ", ".join(str(v) for v in sorted(frame[column].dropna().unique()))


def build_context(frame: pd.DataFrame, manifest_name: str) -> dict[str, Any]:
    summary = summarize_manifest(frame)
    rows = []
    for column in summary.index:
        stats = summary.loc[column]
        rows.append(
            {"column": column, "count": str(int(stats["count"])), **{k: _fmt(stats[k]) for k in ("mean", "std", "min", "max")}}
        )

    substitutions = []
    if "substitutions" in frame.columns:
        for example_id, files in zip(frame["example_id"], frame["substitutions"]):
            if files:
                substitutions.append({"example_id": example_id, "files": ", ".join(files)})

    shaping = "n/a"
    if {"shaping.mode", "shaping.offset_ms", "shaping.t60max_ms"} <= set(frame.columns):
        first = frame.iloc[0]
        decay = "N.D." if first["shaping.mode"] == "nd" else f"{first['shaping.t60max_ms']:g} ms ({first['shaping.mode']})"
        shaping = f"offset {first['shaping.offset_ms']} ms, T60max {decay}"

    failures = int(frame["rir_stats.t60_error"].notna().sum()) if "rir_stats.t60_error" in frame.columns else 0
    return {
        "manifest_name": manifest_name,
        "examples": len(frame),
        "scenarios": _joined(frame, "scenario.scenario"),
        "t60_modes": _joined(frame, "scenario.t60_mode"),
        "sample_rates": _joined(frame, "sample_rate"),
        "segment_seconds": _joined(frame, "segment_seconds"),
        "shaping": shaping,
        "summary": rows,
        "substitutions": substitutions,
        "t60_failures": failures,
    }


def render_report(manifest_path: Union[str, Path]) -> str:
    path = Path(manifest_path)
    env = Environment(loader=FileSystemLoader(TEMPLATE_DIR), autoescape=select_autoescape())
    template = env.get_template(TEMPLATE_FILE)
    return template.render(**build_context(load_manifest(path), path.name))


def write_report(manifest_path: Union[str, Path], output: Union[str, Path]) -> Path:
    target = Path(output)
    rendered = render_report(manifest_path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(rendered, encoding="utf-8")
    except OSError as exc:
        raise AudioIOError(f"cannot write report {target}: {exc}") from exc
    return target
