"""Objective quality measures and a runtime benchmark harness."""
from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .stft import StftConfig, consistency_project

__all__ = [
    "EvalReport",
    "SI_SNR_CAP_DB",
    "spectral_convergence",
    "consistency_residual",
    "si_snr",
    "BenchmarkRow",
    "benchmark",
    "write_csv",
    "linear_fit_r2",
]

SI_SNR_CAP_DB = 100.0


@dataclass
class EvalReport:
    spectral_convergence: float = math.nan
    consistency_residual: float = math.nan
    si_snr_db: float = math.nan
    wall_time_s: float = math.nan
    rtf: float = math.nan


def spectral_convergence(reference_magnitude, estimate) -> float:
    """``||A - |S|||_F / ||A||_F``."""
    ref = np.asarray(reference_magnitude, dtype=np.float64)
    est = np.abs(np.asarray(estimate))
    if ref.shape != est.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {est.shape}")
    denom = np.linalg.norm(ref)
    if denom == 0:
        raise ValueError("reference magnitude has zero norm")
    return float(np.linalg.norm(ref - est) / denom)


def consistency_residual(spec, config: StftConfig = StftConfig()) -> float:
    spec = np.asarray(spec)
    denom = np.linalg.norm(spec)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(spec - consistency_project(spec, config)) / denom)


def si_snr(reference, estimate, cap_db: float = SI_SNR_CAP_DB) -> float:
    """Scale-invariant SNR in dB, capped at ``cap_db``.

    The estimate is projected onto the reference, so a global sign flip (the
    inherent ambiguity of magnitude-only retrieval) or gain does not matter.
    """
    ref = np.asarray(getattr(reference, "samples", reference), dtype=np.float64)
    est = np.asarray(getattr(estimate, "samples", estimate), dtype=np.float64)
    if ref.shape != est.shape:
        raise ValueError(f"length mismatch: {ref.shape} vs {est.shape}")
    ref_energy = ref @ ref
    if ref_energy == 0 or est @ est == 0:
        raise ValueError("si_snr is undefined for zero-energy signals")
    target = (est @ ref) / ref_energy * ref
    noise = est - target
    noise_energy = noise @ noise
    target_energy = target @ target
    if noise_energy <= target_energy * 10 ** (-cap_db / 10):
        return cap_db
    return float(10 * np.log10(target_energy / noise_energy))


@dataclass
class BenchmarkRow:
    method: str
    length_s: float
    n_steps: int
    mean_time_s: float
    rtf: float


def benchmark(runner, lengths, repetitions: int = 1, *, method: str = "", n_steps: int = 0):
    """Time ``runner(length_s)`` ``repetitions`` times per length.

    Returns one :class:`BenchmarkRow` per length with RTF = mean time / length.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    rows = []
    for length in lengths:
        times = []
        for _ in range(repetitions):
            start = time.perf_counter()
            try:
                runner(length)
            except Exception as exc:
                raise RuntimeError(f"benchmark runner failed at length {length}s: {exc}") from exc
            times.append(time.perf_counter() - start)
        mean_time = float(np.mean(times))
        rows.append(BenchmarkRow(method, float(length), int(n_steps), mean_time, mean_time / length))
    return rows


BENCHMARK_HEADER = ["method", "length_s", "n_steps", "mean_time_s", "rtf"]


def write_csv(path, rows, header=None):
    """Write dataclass rows (or plain dicts) with a fixed header."""
    dict_rows = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    if header is None:
        header = list(dict_rows[0]) if dict_rows else BENCHMARK_HEADER
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        writer.writerows(dict_rows)


def linear_fit_r2(x, y) -> float:
    """Coefficient of determination of an ordinary least-squares line through ``(x, y)``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    return float(1 - np.sum(resid**2) / total) if total > 0 else 1.0
