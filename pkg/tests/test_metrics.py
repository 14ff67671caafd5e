import csv
import time

import numpy as np
import pytest

from ouvephase.baselines import GlaConfig, gla
from ouvephase.metrics import (
    BENCHMARK_HEADER,
    SI_SNR_CAP_DB,
    benchmark,
    consistency_residual,
    linear_fit_r2,
    si_snr,
    spectral_convergence,
    write_csv,
)
from ouvephase.stft import consistency_project, stft


def test_spectral_convergence(rng):
    a = rng.uniform(0, 1, (4, 4))
    assert spectral_convergence(a, a * np.exp(1j * rng.uniform(0, 6, a.shape))) == pytest.approx(0, abs=1e-15)
    assert spectral_convergence(a, np.zeros_like(a)) == 1.0
    assert spectral_convergence(np.ones((2, 2)), np.full((2, 2), 0.5)) == 0.5
    with pytest.raises(ValueError):
        spectral_convergence(np.zeros((2, 2)), np.ones((2, 2)))
    with pytest.raises(ValueError):
        spectral_convergence(np.ones((2, 2)), np.ones((2, 3)))


def test_consistency_residual(cfg, rng):
    assert consistency_residual(stft(rng.standard_normal(3000), cfg), cfg) <= 1e-6
    vals = []
    for _ in range(10):
        s = rng.standard_normal((256, 20)) + 1j * rng.standard_normal((256, 20))
        vals.append(consistency_residual(s, cfg))
        assert consistency_residual(consistency_project(s, cfg), cfg) <= vals[-1]
    assert min(vals) > 1e-3
    assert consistency_residual(np.zeros((256, 4), complex), cfg) == 0.0


def test_si_snr(rng):
    x = rng.standard_normal(2000)
    assert si_snr(x, x) == SI_SNR_CAP_DB
    assert si_snr(x, -x) == SI_SNR_CAP_DB
    assert si_snr(x, 3.7 * x) == SI_SNR_CAP_DB
    noise = rng.standard_normal(2000)
    noise -= (noise @ x) / (x @ x) * x
    noise *= np.linalg.norm(x) / np.linalg.norm(noise)
    assert si_snr(x, x + noise) == pytest.approx(0.0, abs=1e-9)
    assert si_snr(x, x + 0.1 * noise) == pytest.approx(20.0, abs=1e-9)
    with pytest.raises(ValueError):
        si_snr(np.zeros(5), np.ones(5))
    with pytest.raises(ValueError):
        si_snr(np.ones(5), np.ones(4))


def test_benchmark_rtf_definition():
    rows = benchmark(lambda length: time.sleep(0.02), [1.0, 2.0], repetitions=2, method="dummy")
    assert [r.length_s for r in rows] == [1.0, 2.0]
    assert rows[1].rtf == pytest.approx(rows[0].rtf / 2, rel=0.3)
    for r in rows:
        assert r.rtf == pytest.approx(r.mean_time_s / r.length_s)
    with pytest.raises(ValueError):
        benchmark(lambda length: None, [1.0], repetitions=0)


def test_benchmark_propagates_failure():
    def boom(length):
        raise ValueError("nope")

    with pytest.raises(RuntimeError, match="length 2"):
        benchmark(boom, [2], 1)


def test_gla_runtime_linear_in_iterations(cfg, rng):
    a = np.abs(stft(rng.standard_normal(16000), cfg))
    iters = [10, 20, 40, 80]
    times = []
    for n in iters:
        runs = []
        for _ in range(3):
            start = time.perf_counter()
            gla(a, GlaConfig(n), cfg)
            runs.append(time.perf_counter() - start)
        times.append(min(runs))
    assert linear_fit_r2(iters, times) >= 0.99


def test_csv_schema(tmp_path):
    rows = benchmark(lambda length: None, [0.5], 1, method="m", n_steps=3)
    path = tmp_path / "b.csv"
    write_csv(path, rows, BENCHMARK_HEADER)
    with open(path) as fh:
        reader = csv.DictReader(fh)
        assert reader.fieldnames == BENCHMARK_HEADER
        (row,) = list(reader)
    assert row["method"] == "m" and row["n_steps"] == "3"


def test_linear_fit_r2():
    assert linear_fit_r2([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert linear_fit_r2([1, 2, 3, 4], [1, -1, 1, -1]) < 0.5
