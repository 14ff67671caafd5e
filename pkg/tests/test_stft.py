import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ouvephase.io import Waveform
from ouvephase.stft import (
    StftConfig,
    consistency_project,
    istft,
    magnitude_project,
    n_frames,
    overlap_add_floor,
    stft,
)
from ouvephase.synthetic import sinusoid


def direct_dft(frame):
    n = frame.size
    k = np.arange(n // 2 + 1)[:, None]
    return np.exp(-2j * np.pi * k * np.arange(n) / n) @ frame


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.mark.parametrize("kwargs", [dict(hop=0), dict(hop=600), dict(window_len=511), dict(window="hamming"),
                                    dict(expected_rate=0)])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        StftConfig(**kwargs)


def test_default_config_overlap_add(cfg):
    assert cfg.n_bins == 256
    assert overlap_add_floor(cfg) > 1.0


def test_shape_contract(cfg, rng):
    for n in (510, 1000, 16000, 16001):
        s = stft(rng.standard_normal(n), cfg)
        assert s.shape == (256, (n + 2 * 255 - 510) // 128 + 1) == (256, n_frames(n, cfg))


def test_zero_signal(cfg):
    assert not stft(np.zeros(2000), cfg).any()


def test_rate_mismatch_and_empty(cfg):
    with pytest.raises(ValueError, match="sample rate"):
        stft(Waveform(np.zeros(100), 8000), cfg)
    with pytest.raises(ValueError):
        stft(np.zeros(0), cfg)


def test_impulse_column_matches_direct_dft(cfg):
    x = np.zeros(4000)
    m = 10
    x[m * cfg.hop] = 1.0
    frame = np.zeros(cfg.window_len)
    frame[cfg.pad] = 1.0
    expected = direct_dft(cfg.analysis_window * frame)
    np.testing.assert_allclose(stft(x, cfg)[:, m], expected, atol=1e-12)


def test_constant_signal_gives_window_spectrum(cfg):
    col = stft(np.ones(4000), cfg)[:, 12]
    np.testing.assert_allclose(col, direct_dft(cfg.analysis_window), atol=1e-10)


def test_sinusoid_peak_bin(cfg):
    spec = stft(sinusoid(1000.0, 1.0, 16000), cfg)
    peaks = np.argmax(np.abs(spec[:, 4:-4]), axis=0)
    expected_bin = round(1000 * 510 / 16000)
    assert expected_bin == 32
    assert np.all(peaks == expected_bin)


@settings(max_examples=20, deadline=None)
@given(st.integers(1020, 6000), st.integers(0, 2**32 - 1))
def test_round_trip_property(n, seed):
    cfg = StftConfig()
    x = np.random.default_rng(seed).standard_normal(n)
    assert rel(istft(stft(x, cfg), cfg, n), x) <= 1e-6


def test_parseval_against_direct_dft(cfg, rng):
    x = rng.standard_normal(3000)
    spec = stft(x, cfg)
    padded = np.pad(x, cfg.pad)
    for m in (0, 5, spec.shape[1] - 1):
        frame = cfg.analysis_window * padded[m * cfg.hop: m * cfg.hop + cfg.window_len]
        np.testing.assert_allclose(spec[:, m], direct_dft(frame), rtol=1e-9, atol=1e-9)
        weights = np.full(cfg.n_bins, 2.0)
        weights[[0, -1]] = 1.0
        energy = np.sum(weights * np.abs(spec[:, m]) ** 2) / cfg.window_len
        assert energy == pytest.approx(np.sum(frame**2), rel=1e-6)


def test_linearity(cfg, rng):
    x, y = rng.standard_normal((2, 4000))
    a, b = 0.7, -2.3
    lhs = stft(a * x + b * y, cfg)
    rhs = a * stft(x, cfg) + b * stft(y, cfg)
    assert rel(lhs, rhs) <= 1e-10
    sx, sy = stft(x, cfg), stft(y, cfg)
    assert rel(istft(a * sx + b * sy, cfg, 4000), a * istft(sx, cfg, 4000) + b * istft(sy, cfg, 4000)) <= 1e-10


def test_istft_length_contract(cfg, rng):
    spec = stft(rng.standard_normal(4000), cfg)
    assert istft(spec, cfg, 100).shape == (100,)
    full = istft(spec, cfg, 4000)
    np.testing.assert_array_equal(istft(spec, cfg, 100), full[:100])
    longer = istft(spec, cfg, 9000)
    assert longer.shape == (9000,) and not longer[5000:].any()
    assert not istft(np.zeros_like(spec), cfg, 4000).any()


def test_istft_rejects_wrong_bins(cfg):
    with pytest.raises(ValueError):
        istft(np.zeros((100, 5)), cfg)


def test_consistency_fixed_point(cfg, rng):
    spec = stft(rng.standard_normal(5000), cfg)
    assert rel(consistency_project(spec, cfg), spec) <= 1e-6


def test_consistency_idempotent(cfg, rng):
    r = rng.standard_normal((256, 40)) + 1j * rng.standard_normal((256, 40))
    once = consistency_project(r, cfg)
    assert rel(consistency_project(once, cfg), once) <= 1e-6
    assert rel(once, r) > 1e-3
    assert not consistency_project(np.zeros((256, 7), complex), cfg).any()


def test_magnitude_project(rng):
    s = rng.standard_normal((5, 6)) + 1j * rng.standard_normal((5, 6))
    np.testing.assert_allclose(magnitude_project(s, np.abs(s)), s, rtol=1e-12)
    a = rng.uniform(0, 3, (5, 6))
    np.testing.assert_allclose(np.abs(magnitude_project(s, a)), a, rtol=1e-14, atol=0)
    out = magnitude_project(np.array([[0j, 1j]]), np.array([[2.0, 3.0]]))
    assert out[0, 0] == 2 + 0j
    assert out[0, 1] == pytest.approx(3j)


def test_magnitude_project_errors():
    with pytest.raises(ValueError):
        magnitude_project(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        magnitude_project(np.zeros((2, 2)), -np.ones((2, 2)))


def test_small_config_round_trip(small_cfg, rng):
    x = rng.standard_normal(777)
    assert rel(istft(stft(x, small_cfg), small_cfg, 777), x) <= 1e-10
