import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ouvephase.transforms import CompressionParams, compress, decompress


def test_identity_params(rng):
    s = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
    np.testing.assert_allclose(compress(s, CompressionParams(1.0, 1.0)), s, rtol=1e-14)


def test_known_value():
    v = np.array([4 * np.exp(1j * np.pi / 3)])
    out = compress(v)
    assert abs(out[0]) == pytest.approx(0.3, rel=1e-14)
    assert np.angle(out[0]) == pytest.approx(np.pi / 3, rel=1e-14)
    back = decompress(np.array([0.3 + 0j]))
    assert abs(back[0]) == pytest.approx(4.0, rel=1e-13)


def test_phase_preserved(rng):
    s = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
    np.testing.assert_allclose(np.angle(compress(s)), np.angle(s), atol=1e-14)
    np.testing.assert_allclose(np.angle(decompress(s)), np.angle(s), atol=1e-14)


def test_zero_maps_to_zero():
    z = np.zeros((2, 2), complex)
    assert not compress(z).any()
    assert not decompress(z).any()


def test_round_trip(rng):
    mag = rng.uniform(0, 10, (64, 64))
    s = mag * np.exp(1j * rng.uniform(-np.pi, np.pi, mag.shape))
    out = decompress(compress(s))
    assert np.linalg.norm(out - s) / np.linalg.norm(s) <= 1e-10


@pytest.mark.parametrize("alpha,beta", [(0, 1), (-1, 1), (1, 0), (0.5, -0.1)])
def test_invalid_params(alpha, beta):
    with pytest.raises(ValueError):
        CompressionParams(alpha, beta)


@given(st.floats(0, 1e6, allow_subnormal=False), st.floats(0, 1e6, allow_subnormal=False))
def test_monotone(u, v):
    if u == v:
        return
    cu, cv = abs(compress(np.array([u + 0j]))[0]), abs(compress(np.array([v + 0j]))[0])
    assert (cu < cv) == (u < v)
