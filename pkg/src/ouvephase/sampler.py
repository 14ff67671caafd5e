"""Reverse-time sampling of the OUVE process and the phase-retrieval pipeline."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .sde import OuveParams, complex_normal, diffusion, drift, sample_terminal
from .stft import StftConfig, istft, magnitude_project
from .transforms import CompressionParams, compress, decompress

__all__ = [
    "SamplerConfig",
    "RetrievalResult",
    "SamplingError",
    "time_grid",
    "reverse_step",
    "solve_reverse",
    "retrieve_phase",
]


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    n_steps: int = 30
    seed: int = 0
    enforce_magnitude: bool = True

    def __post_init__(self):
        if int(self.n_steps) < 1:
            raise ValueError("N must be >= 1")


@dataclass
class RetrievalResult:
    spectrogram: np.ndarray
    waveform: np.ndarray
    t_grid: np.ndarray
    wall_time: float
    diagnostics: dict = field(default_factory=dict)


def time_grid(n_steps: int, params: OuveParams = OuveParams()) -> np.ndarray:
    """``n_steps + 1`` uniformly spaced times from T down to t_eps."""
    if n_steps < 1:
        raise ValueError("N must be >= 1")
    grid = np.linspace(params.T, params.t_eps, n_steps + 1)
    grid[-1] = params.t_eps
    return grid


def reverse_step(x, y, t, dt, score, rng: np.random.Generator, params: OuveParams = OuveParams()):
    """Single Euler-Maruyama step of the reverse SDE from ``t`` to ``t - dt``.

    ``x <- x + (-f(x, y) + g(t)^2 s(x, y, t)) dt + g(t) sqrt(dt) z``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t - dt < params.t_eps - 1e-12:
        raise ValueError(f"step from t={t} by {dt} would cross below t_eps={params.t_eps}")
    s = np.asarray(score.evaluate(x, y, t))
    if s.shape != np.shape(x):
        raise SamplingError(f"score returned shape {s.shape}, expected {np.shape(x)}")
    if not np.all(np.isfinite(s)):
        raise SamplingError(f"score produced non-finite values at t={t}")
    g = diffusion(t, params)
    return x + (-drift(x, y, params) + g**2 * s) * dt + g * math.sqrt(dt) * complex_normal(rng, np.shape(x))


def solve_reverse(y, score, config: SamplerConfig = SamplerConfig(), params: OuveParams = OuveParams(),
                  *, x_T=None, trajectory: list | None = None):
    """Integrate the reverse SDE from ``x_T ~ N_C(y, sigma(T)^2)`` down to t_eps.

    Pass a list as ``trajectory`` to collect every intermediate state
    (``n_steps + 1`` arrays, starting with x_T).
    """
    y = np.asarray(y, dtype=np.complex128)
    rng = np.random.default_rng(config.seed)
    x = sample_terminal(y, rng, params) if x_T is None else np.array(x_T, dtype=np.complex128)
    grid = time_grid(config.n_steps, params)
    dt = (params.T - params.t_eps) / config.n_steps
    if trajectory is not None:
        trajectory.append(x)
    for i, t in enumerate(grid[:-1]):
        try:
            x = reverse_step(x, y, float(t), dt, score, rng, params)
        except SamplingError as exc:
            raise SamplingError(f"step {i + 1}: {exc}") from exc
        if not np.all(np.isfinite(x)):
            raise SamplingError(f"state became non-finite at step {i + 1} (t={grid[i + 1]:.4g})")
        if trajectory is not None:
            trajectory.append(x)
    return x


def retrieve_phase(magnitude, score, config: SamplerConfig = SamplerConfig(), params: OuveParams = OuveParams(),
                   compression: CompressionParams = CompressionParams(), stft_config: StftConfig = StftConfig(),
                   target_len: int | None = None) -> RetrievalResult:
    """Estimate a complex spectrogram and waveform from a magnitude spectrogram.

    The conditioner is the compressed magnitude with zero phase.  ``score``
    operates in the compressed domain.
    """
    magnitude = np.asarray(magnitude, dtype=np.float64)
    if np.any(magnitude < 0):
        raise ValueError("magnitude must be entrywise nonnegative")
    start = time.perf_counter()
    y = compress(magnitude.astype(np.complex128), compression)
    x0_hat = decompress(solve_reverse(y, score, config, params), compression)
    if config.enforce_magnitude:
        x0_hat = magnitude_project(x0_hat, magnitude)
    wave = istft(x0_hat, stft_config, target_len)
    elapsed = time.perf_counter() - start
    return RetrievalResult(
        spectrogram=x0_hat,
        waveform=wave,
        t_grid=time_grid(config.n_steps, params),
        wall_time=elapsed,
        diagnostics={"n_steps": config.n_steps, "seed": config.seed},
    )
