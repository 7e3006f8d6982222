import json

import numpy as np
import pytest

from farfield.app.audio_io import read_mono, write_wav
from farfield.app.cli import main

SIM_ARGS = ["rir", "simulate", "--room", "6,5,3", "--src", "1.5,1.5,1.5", "--mic", "4,3,1.4", "--fs", "16000"]


def test_rir_simulate_writes_wav_and_report(tmp_path, capsys):
    out = tmp_path / "rir.wav"
    assert main(SIM_ARGS + ["--t60", "0.4", "--out", str(out), "--no-calibrate"]) == 0
    report = json.loads(capsys.readouterr().out)
    samples, fs = read_mono(out)
    assert fs == 16000
    assert report["length_samples"] == samples.size
    assert report["t60_target_s"] == 0.4
    assert 0 < report["absorption"] < 1


def test_rir_simulate_with_fixed_absorption(tmp_path, capsys):
    out = tmp_path / "rir.wav"
    assert main(SIM_ARGS + ["--absorption", "0.5", "--out", str(out), "--order", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["absorption"] == 0.5


def test_zero_t60_exits_with_validation_code(tmp_path, capsys):
    assert main(SIM_ARGS + ["--t60", "0", "--out", str(tmp_path / "x.wav")]) == 2
    err = capsys.readouterr().err
    assert "error:" in err
    assert not (tmp_path / "x.wav").exists()


def test_coincident_positions_exit_with_validation_code(tmp_path, capsys):
    args = ["rir", "simulate", "--room", "6,5,3", "--src", "2,2,1.5", "--mic", "2,2,1.5", "--t60", "0.4"]
    assert main(args + ["--out", str(tmp_path / "x.wav")]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_vector_flag(tmp_path, capsys):
    args = ["rir", "simulate", "--room", "6,5", "--src", "2,2,1.5", "--mic", "3,3,1.5", "--t60", "0.4"]
    assert main(args + ["--out", str(tmp_path / "x.wav")]) == 2
    assert "--room" in capsys.readouterr().err


def test_usage_errors_exit_with_validation_code(capsys):
    assert main(["rir"]) == 2
    assert main(["rir", "simulate", "--room", "6,5,3"]) == 2
    assert capsys.readouterr().err.count("error:") == 2


def test_shape_rejects_offset_not_below_t60max(tmp_path, capsys):
    args = ["rir", "shape", "--in", str(tmp_path / "missing.wav"), "--out", str(tmp_path / "t.wav")]
    assert main(args + ["--mode", "const", "--offset-ms", "300", "--t60max-ms", "300"]) == 2
    assert "offset" in capsys.readouterr().err


def test_shape_and_analyze(tmp_path, capsys, make_exp_rir):
    rir = make_exp_rir(0.8, delay=20)
    source = write_wav(tmp_path / "rir.wav", 0.5 * rir.samples, 16000)
    out = tmp_path / "target.wav"
    assert main(["rir", "shape", "--in", str(source), "--out", str(out), "--offset-ms", "0", "--t60max-ms", "300"]) == 0
    shaped = json.loads(capsys.readouterr().out)
    assert shaped["shaping"] == {"mode": "const", "offset_ms": 0.0, "t60max_ms": 300.0}
    assert shaped["stats"]["t60_s"] < 0.3

    assert main(["rir", "analyze", str(source)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["direct_index"] == 20
    assert stats["t60_s"] == pytest.approx(0.8, rel=0.02)


def test_direct_only_shape_reports_infinite_ratios(tmp_path, capsys, make_exp_rir):
    source = write_wav(tmp_path / "rir.wav", 0.5 * make_exp_rir(0.5, delay=100).samples, 16000)
    args = ["rir", "shape", "--in", str(source), "--out", str(tmp_path / "nd.wav"), "--mode", "nd"]
    assert main(args) == 0
    stats = json.loads(capsys.readouterr().out)["stats"]
    assert stats["c50_db"] == "+inf"
    assert stats["t60_s"] is None


def test_analyze_unreadable_file_exits_with_io_code(tmp_path, capsys):
    broken = tmp_path / "broken.wav"
    broken.write_bytes(b"RIFF\x00\x00")
    assert main(["rir", "analyze", str(broken)]) == 3
    assert "error:" in capsys.readouterr().err


def test_sweep_writes_every_preset(tmp_path, capsys, make_exp_rir):
    source = write_wav(tmp_path / "rir.wav", 0.5 * make_exp_rir(0.9).samples, 16000)
    assert main(["rir", "sweep", "--in", str(source), "--out-dir", str(tmp_path / "sweep")]) == 0
    written = json.loads(capsys.readouterr().out)
    assert len(written) == 20
    assert len(list((tmp_path / "sweep").glob("*.wav"))) == 20


def test_si_sdr_of_identical_files_is_plus_inf(tmp_path, capsys):
    signal = 0.3 * np.random.default_rng(0).standard_normal(1600)
    path = write_wav(tmp_path / "a.wav", signal, 16000)
    assert main(["metrics", "si-sdr", "--estimate", str(path), "--reference", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "+inf"


def test_si_sdr_of_equal_energy_orthogonal_residual(tmp_path, capsys):
    reference = write_wav(tmp_path / "ref.wav", np.array([0.5, 0.0, 0.0, 0.0]), 16000)
    estimate = write_wav(tmp_path / "est.wav", np.array([0.5, 0.5, 0.0, 0.0]), 16000)
    assert main(["metrics", "si-sdr", "--estimate", str(estimate), "--reference", str(reference)]) == 0
    assert capsys.readouterr().out.strip() == "0.00"


def test_si_sdr_requires_named_files(tmp_path, capsys):
    path = write_wav(tmp_path / "a.wav", np.ones(16) * 0.1, 16000)
    assert main(["metrics", "si-sdr", str(path), str(path)]) == 2


def test_si_sdr_length_mismatch(tmp_path, capsys):
    a = write_wav(tmp_path / "a.wav", np.ones(100) * 0.1, 16000)
    b = write_wav(tmp_path / "b.wav", np.ones(120) * 0.1, 16000)
    assert main(["metrics", "si-sdr", "--estimate", str(a), "--reference", str(b)]) == 2
    assert "lengths differ" in capsys.readouterr().err


def test_snr_command(tmp_path, capsys):
    t = np.arange(1600) / 16000
    speech = write_wav(tmp_path / "s.wav", 0.2 * np.sin(2 * np.pi * 440 * t), 16000)
    noise = write_wav(tmp_path / "n.wav", 0.02 * np.sin(2 * np.pi * 1000 * t), 16000)
    assert main(["metrics", "snr", "--speech", str(speech), "--noise", str(noise)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(20.0, abs=0.01)


def test_scenario_sample_is_reproducible(capsys):
    assert main(["scenario", "sample", "--scenario", "close_small", "--seed", "3", "--count", "2"]) == 0
    first = capsys.readouterr().out.splitlines()
    assert main(["scenario", "sample", "--scenario", "close_small", "--seed", "3", "--count", "2"]) == 0
    assert capsys.readouterr().out.splitlines() == first
    assert len(first) == 2
    assert json.loads(first[0])["scenario"] == "close_small"


def test_scenario_list_and_unknown_scenario(capsys):
    assert main(["scenario", "list"]) == 0
    names = [json.loads(line)["name"] for line in capsys.readouterr().out.splitlines()]
    assert names == ["close_small", "close_large", "medium_small", "far_large"]
    assert main(["scenario", "sample", "--scenario", "cathedral"]) == 2


def test_dataset_generate_missing_speech_list(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"count": 1, "noise_list": ["n.wav"]}))
    assert main(["dataset", "generate", str(config), "--out", str(tmp_path / "out")]) == 2
    assert "speech_list" in capsys.readouterr().err


def test_dataset_generate_and_report(tmp_path, capsys, corpus):
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "scenario": "close_small",
                "sample_rate": 16000,
                "segment_seconds": 1.0,
                "count": 2,
                "speech_list": ["speech/s0.wav", "speech/s1.wav"],
                "noise_list": ["noise/long.wav"],
                "calibrate_absorption": False,
            }
        )
    )
    out = tmp_path / "out"
    assert main(["dataset", "generate", str(config), "--seed", "9", "--workers", "1", "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["examples"] == 2
    report = tmp_path / "report.md"
    assert main(["dataset", "report", "--manifest", str(out / "manifest.jsonl"), "--out", str(report)]) == 0
    assert "close_small" in report.read_text()


def test_dataset_generation_failure_exit_code(tmp_path, capsys):
    (tmp_path / "broken.wav").write_text("not audio")
    (tmp_path / "n.wav").write_text("not audio")
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps({"sample_rate": 16000, "count": 1, "speech_list": ["broken.wav"], "noise_list": ["n.wav"]})
    )
    assert main(["dataset", "generate", str(config), "--out", str(tmp_path / "out")]) == 4
    assert "example 0" in capsys.readouterr().err


def test_rir_simulate_meets_requested_t60(tmp_path, capsys):
    args = ["rir", "simulate", "--room", "10,10,5", "--t60", "0.5", "--src", "2,2,1.5", "--mic", "4,6,1.5"]
    assert main(args + ["--fs", "16000", "--out", str(tmp_path / "rir.wav")]) == 0
    stats = json.loads(capsys.readouterr().out)["stats"]
    assert 0.4 <= stats["t60_s"] <= 0.6


def test_analyze_unit_impulse_and_exponential_decay(tmp_path, capsys, make_exp_rir):
    impulse = np.zeros(1600)
    impulse[0] = 1.0
    assert main(["rir", "analyze", str(write_wav(tmp_path / "impulse.wav", impulse, 16000))]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["drr_db"] == "+inf" and stats["c50_db"] == "+inf"
    assert stats["t60_s"] is None and stats["t60_error"]

    decay = write_wav(tmp_path / "decay.wav", make_exp_rir(0.6).samples, 16000)
    assert main(["rir", "analyze", str(decay)]) == 0
    assert json.loads(capsys.readouterr().out)["t60_s"] == pytest.approx(0.6, abs=0.006)
