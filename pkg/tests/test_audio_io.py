import numpy as np
import pytest
import soundfile as sf

from farfield.app.audio_io import AudioBuffer, read_audio, read_mono, write_wav
from farfield.exceptions import AudioIOError, ConfigError


def test_float_wav_roundtrip_is_exact(tmp_path):
    samples = 0.5 * np.random.default_rng(0).standard_normal(4800)
    path = write_wav(tmp_path / "nested" / "x.wav", samples, 48000)
    restored, fs = read_mono(path)
    assert fs == 48000
    assert np.array_equal(restored, samples.astype(np.float32).astype(np.float64))


def test_identical_samples_give_identical_files(tmp_path):
    samples = np.linspace(-0.5, 0.5, 1000)
    a = write_wav(tmp_path / "a.wav", samples, 16000)
    b = write_wav(tmp_path / "b.wav", samples, 16000)
    assert a.read_bytes() == b.read_bytes()


def test_reads_pcm16(tmp_path):
    path = tmp_path / "pcm.wav"
    sf.write(path, np.array([0.0, 0.5, -0.5]), 16000, subtype="PCM_16")
    samples, fs = read_mono(path, expected_rate=16000)
    np.testing.assert_allclose(samples, [0.0, 0.5, -0.5], atol=1 / 32768)


def test_multichannel_input_is_rejected(tmp_path):
    path = tmp_path / "stereo.wav"
    sf.write(path, np.zeros((100, 2)), 16000)
    assert read_audio(path).channels == 2
    with pytest.raises(ConfigError, match="2 channels"):
        read_mono(path)


def test_unsupported_sample_rate(tmp_path):
    path = write_wav(tmp_path / "x.wav", np.zeros(100), 22050)
    with pytest.raises(ConfigError, match="22050"):
        read_mono(path)


def test_expected_rate_mismatch(tmp_path):
    path = write_wav(tmp_path / "x.wav", np.zeros(100), 48000)
    with pytest.raises(ConfigError, match="expected 16000"):
        read_mono(path, expected_rate=16000)


def test_unreadable_and_missing_files(tmp_path):
    broken = tmp_path / "broken.wav"
    broken.write_bytes(b"RIFF\x10\x00\x00\x00WAVE")
    with pytest.raises(AudioIOError):
        read_mono(broken)
    with pytest.raises(AudioIOError):
        read_mono(tmp_path / "missing.wav")


def test_empty_file_is_an_error(tmp_path):
    path = write_wav(tmp_path / "empty.wav", np.zeros(0), 16000)
    with pytest.raises(AudioIOError):
        read_mono(path)


def test_write_rejects_multichannel(tmp_path):
    with pytest.raises(ConfigError):
        write_wav(tmp_path / "x.wav", np.zeros((2, 10)), 16000)


def test_buffer_shape_validation():
    with pytest.raises(ConfigError):
        AudioBuffer(np.zeros(10), 16000)
