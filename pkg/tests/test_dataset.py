import hashlib
import json
import logging
from pathlib import Path

import numpy as np
import pytest

from farfield.exceptions import AudioIOError, ConfigError, GenerationError
from farfield.pipeline.config import load_dataset_config, parse_dataset_config
from farfield.pipeline.dataset import (
    MANIFEST_NAME,
    generate_dataset,
    load_manifest,
    summarize_manifest,
)
from farfield.pipeline.scenarios import derive_example_seed


def make_config(corpus, **overrides):
    data = {
        "scenario": "close_small",
        "snr_range_db": [5, 30],
        "sample_rate": 16000,
        "segment_seconds": 1.0,
        "count": 3,
        "speech_list": [str(p) for p in corpus["speech"]],
        "noise_list": [str(p) for p in corpus["noise"]],
        "master_seed": 11,
        "calibrate_absorption": False,
    }
    data.update(overrides)
    return parse_dataset_config(data)


def digest_tree(root: Path) -> dict[str, str]:
    return {
        p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_generates_pairs_and_manifest(corpus, tmp_path):
    out = tmp_path / "out"
    records = generate_dataset(make_config(corpus), None, out)
    lines = (out / MANIFEST_NAME).read_text().splitlines()
    assert len(records) == len(lines) == 3
    for index, line in enumerate(lines):
        data = json.loads(line)
        assert data["schema"] == 1
        assert data["example_index"] == index
        assert data["input_path"] == f"input/ex_{index:06d}.wav"
        assert (out / data["input_path"]).is_file()
        assert (out / data["target_path"]).is_file()
        assert data["seed"] == derive_example_seed(11, index)
        assert data["snr_realized_db"] == pytest.approx(data["snr_drawn_db"], abs=1e-6)


def test_output_is_independent_of_worker_count(corpus, tmp_path):
    config = make_config(corpus)
    generate_dataset(config, 5, tmp_path / "serial", workers=1)
    generate_dataset(config, 5, tmp_path / "parallel", workers=2)
    serial = digest_tree(tmp_path / "serial")
    assert len(serial) == 7
    assert serial == digest_tree(tmp_path / "parallel")


def test_seed_override_changes_output(corpus, tmp_path):
    config = make_config(corpus, count=1)
    a = generate_dataset(config, 1, tmp_path / "a")[0]
    b = generate_dataset(config, 2, tmp_path / "b")[0]
    assert a.seed != b.seed


def test_unusable_speech_is_substituted(corpus, tmp_path):
    bad = tmp_path / "broken.wav"
    bad.write_text("not audio")
    good = str(corpus["speech"][0])
    config = make_config(corpus, speech_list=[str(bad), good], count=4)
    records = generate_dataset(config, None, tmp_path / "out")
    for index, record in enumerate(records):
        rng = np.random.default_rng(np.random.SeedSequence(derive_example_seed(11, index), spawn_key=(2,)))
        started_on_bad = int(rng.integers(2)) == 0
        assert record.speech_path == good
        assert record.substitutions == ([str(bad)] if started_on_bad else [])


def test_substitutions_are_logged_by_the_parent_process(corpus, tmp_path, caplog, monkeypatch):
    monkeypatch.setattr(logging.getLogger("farfield"), "propagate", True)
    bad = tmp_path / "broken.wav"
    bad.write_text("not audio")
    config = make_config(corpus, speech_list=[str(bad), str(corpus["speech"][0])], count=4)
    with caplog.at_level(logging.WARNING, logger="farfield.pipeline.dataset"):
        records = generate_dataset(config, None, tmp_path / "out", workers=2)
    substituted = {r.example_id for r in records if r.substitutions}
    logged = {r.example_id for r in caplog.records if r.getMessage().startswith("substituted unusable file")}
    assert logged == substituted
    warnings = [r for r in caplog.records if r.name == "farfield.pipeline.dataset" and r.levelno == logging.WARNING]
    assert len(warnings) == len(substituted)
    assert all(str(bad) in r.getMessage() for r in warnings)


def test_no_usable_speech_fails_with_example_index(corpus, tmp_path):
    bad = tmp_path / "broken.wav"
    bad.write_text("not audio")
    config = make_config(corpus, speech_list=[str(bad)], count=1)
    with pytest.raises(GenerationError) as info:
        generate_dataset(config, None, tmp_path / "out")
    assert info.value.example_index == 0


def test_short_noise_is_tiled(corpus, tmp_path):
    config = make_config(corpus, noise_list=[str(corpus["noise"][1])], count=1)
    record = generate_dataset(config, None, tmp_path / "out")[0]
    assert record.noise_path.endswith("short.wav")
    assert record.substitutions == []


def test_without_noise_input_matches_target_for_identity_shaping(corpus, tmp_path):
    config = make_config(corpus, add_noise=False, shaping={"mode": "nd", "offset_ms": "+inf"}, count=1)
    out = tmp_path / "out"
    record = generate_dataset(config, None, out)[0]
    assert (out / record.input_path).read_bytes() == (out / record.target_path).read_bytes()
    assert record.noise_path is None


def test_empty_speech_list_is_a_config_error(corpus):
    with pytest.raises(ConfigError, match="speech_list is empty"):
        make_config(corpus, speech_list=[]).speech_files()


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"sample_rate": 22050}, "sample_rate"),
        ({"count": 0}, "count"),
        ({"snr_range_db": [30, 5]}, "snr_range_db"),
        ({"scenario": "cathedral"}, "cathedral"),
        ({"shaping": {"mode": "const", "offset_ms": 300, "t60max_ms": 300}}, "offset"),
        ({"colour": "blue"}, "colour"),
    ],
)
def test_invalid_configs(corpus, overrides, field):
    with pytest.raises(ConfigError, match=field):
        make_config(corpus, **overrides)


def test_missing_speech_list_is_rejected(corpus):
    with pytest.raises(ConfigError, match="speech_list"):
        parse_dataset_config({"count": 1, "noise_list": ["n.wav"]})


def test_config_file_paths_resolve_against_its_directory(corpus, tmp_path):
    listing = tmp_path / "speech.txt"
    listing.write_text("# speech corpus\nspeech/s0.wav\n\nspeech/s1.wav\n")
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"count": 2, "speech_list": "speech.txt", "noise_list": ["noise/long.wav"]}))
    config = load_dataset_config(config_path)
    assert [Path(p).resolve() for p in config.speech_files()] == [p.resolve() for p in corpus["speech"]]
    assert [Path(p).resolve() for p in config.noise_files()] == [corpus["noise"][0].resolve()]


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_dataset_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigError, match="JSON"):
        load_dataset_config(broken)


def test_manifest_loading_and_summary(corpus, tmp_path):
    out = tmp_path / "out"
    generate_dataset(make_config(corpus), None, out)
    frame = load_manifest(out / MANIFEST_NAME)
    assert len(frame) == 3
    assert "scenario.t60_target_s" in frame.columns
    summary = summarize_manifest(frame)
    assert summary.loc["snr_drawn_db", "count"] == 3
    assert 5 <= summary.loc["snr_drawn_db", "min"] <= summary.loc["snr_drawn_db", "max"] <= 30


def test_manifest_errors(tmp_path):
    with pytest.raises(AudioIOError):
        load_manifest(tmp_path / "nope.jsonl")
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"schema": 1}\n')
    with pytest.raises(ConfigError, match="bad.jsonl:1"):
        load_manifest(bad)


@pytest.mark.slow
def test_hundred_examples_hit_drawn_snr(corpus, tmp_path):
    config = make_config(corpus, snr_range_db=[5, 40], count=100)
    records = generate_dataset(config, None, tmp_path / "out", workers=4)
    assert len(records) == 100
    for record in records:
        assert 5.0 <= record.snr_drawn_db <= 40.0
        assert record.snr_realized_db == pytest.approx(record.snr_drawn_db, abs=1e-6)


@pytest.mark.slow
def test_eight_workers_match_serial_run(corpus, tmp_path):
    config = make_config(corpus, count=24)
    generate_dataset(config, 9, tmp_path / "serial", workers=1)
    generate_dataset(config, 9, tmp_path / "parallel", workers=8)
    serial = digest_tree(tmp_path / "serial")
    assert len(serial) == 2 * 24 + 1
    assert serial == digest_tree(tmp_path / "parallel")
