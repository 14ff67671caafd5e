import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.io import wavfile

from ouvephase.io import SpectrogramFormatError, Waveform, load_spec, read_wav, save_spec, write_wav


def test_zero_signal_round_trip(tmp_path):
    path = tmp_path / "z.wav"
    write_wav(path, Waveform(np.zeros(160), 16000))
    w = read_wav(path)
    assert w.sample_rate == 16000
    assert np.array_equal(w.samples, np.zeros(160))


def test_pcm16_normalisation(tmp_path):
    path = tmp_path / "max.wav"
    wavfile.write(path, 16000, np.array([32767, -32768, 0], dtype=np.int16))
    w = read_wav(path)
    assert w.samples.tolist() == [32767 / 32768, -1.0, 0.0]


def test_multichannel_rejected(tmp_path):
    path = tmp_path / "stereo.wav"
    wavfile.write(path, 16000, np.zeros((10, 2), dtype=np.int16))
    with pytest.raises(ValueError, match="multichannel unsupported"):
        read_wav(path)


def test_unsupported_encoding(tmp_path):
    path = tmp_path / "i32.wav"
    wavfile.write(path, 16000, np.zeros(10, dtype=np.int32))
    with pytest.raises(ValueError, match="unsupported"):
        read_wav(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_wav(tmp_path / "nope.wav")


def test_ramp_within_quantisation(tmp_path):
    ramp = np.linspace(-1, 1, 1001)
    path = tmp_path / "ramp.wav"
    write_wav(path, Waveform(ramp, 16000))
    assert np.max(np.abs(read_wav(path).samples - ramp)) <= 2.0**-15


def test_float32_encoding(tmp_path):
    x = np.random.default_rng(0).uniform(-1, 1, 500)
    path = tmp_path / "f.wav"
    write_wav(path, Waveform(x, 22050), encoding="float32")
    w = read_wav(path)
    assert w.sample_rate == 22050
    np.testing.assert_array_equal(w.samples, x.astype(np.float32).astype(np.float64))


def test_nan_rejected(tmp_path):
    with pytest.raises(ValueError):
        Waveform(np.array([0.0, np.nan]), 16000)
    good = Waveform(np.zeros(3), 16000)
    object.__setattr__(good, "samples", np.array([0.0, np.nan, 1.0]))
    with pytest.raises(ValueError):
        write_wav("unused.wav", good)


def test_waveform_invariants():
    with pytest.raises(ValueError):
        Waveform(np.zeros(4), 0)
    with pytest.raises(ValueError):
        Waveform(np.zeros((2, 2)), 16000)
    assert Waveform(np.zeros(8000), 16000).duration == 0.5


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        write_wav(tmp_path / "missing_dir" / "x.wav", Waveform(np.zeros(4), 16000))


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, st.integers(1, 400), elements=st.floats(-1, 1)))
def test_wav_round_trip_property(tmp_path_factory, x):
    path = tmp_path_factory.mktemp("wav") / "p.wav"
    write_wav(path, Waveform(x, 16000))
    assert np.max(np.abs(read_wav(path).samples - x)) <= 2.0**-15


def test_spec_zero_round_trip(tmp_path):
    path = tmp_path / "z.cspg"
    save_spec(path, np.zeros((2, 3), dtype=complex))
    out = load_spec(path)
    assert out.shape == (2, 3)
    assert not out.any()


def test_spec_random_bit_exact(tmp_path, rng):
    s = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
    path = tmp_path / "r.cspg"
    save_spec(path, s)
    out = load_spec(path)
    assert out.tobytes() == s.tobytes()


def test_spec_layout_is_column_major(tmp_path):
    s = np.array([[1 + 2j, 3 + 4j], [5 + 6j, 7 + 8j]])
    path = tmp_path / "l.cspg"
    save_spec(path, s)
    blob = path.read_bytes()
    assert len(blob) == 16 + 4 * 16
    magic, version, k, l = struct.unpack("<4sIII", blob[:16])
    assert (magic, version, k, l) == (b"CSPG", 1, 2, 2)
    payload = np.frombuffer(blob[16:], dtype="<f8")
    assert payload.tolist() == [1, 2, 5, 6, 3, 4, 7, 8]


def test_spec_header_payload_mismatch(tmp_path):
    path = tmp_path / "bad.cspg"
    path.write_bytes(struct.pack("<4sIII", b"CSPG", 1, 4, 4) + np.zeros(16, dtype="<f8").tobytes())
    with pytest.raises(SpectrogramFormatError, match="4x4"):
        load_spec(path)


@pytest.mark.parametrize("blob", [b"CSP", struct.pack("<4sIII", b"XXXX", 1, 1, 1) + bytes(16),
                                  struct.pack("<4sIII", b"CSPG", 1, 0, 3)])
def test_spec_malformed(tmp_path, blob):
    path = tmp_path / "m.cspg"
    path.write_bytes(blob)
    with pytest.raises(SpectrogramFormatError):
        load_spec(path)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_spec_round_trip_property(tmp_path_factory, k, l, seed):
    r = np.random.default_rng(seed)
    s = r.standard_normal((k, l)) * 1e3 + 1j * r.standard_normal((k, l))
    path = tmp_path_factory.mktemp("spec") / "p.cspg"
    save_spec(path, s)
    assert np.array_equal(load_spec(path), s)
