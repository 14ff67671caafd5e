"""Griffin-Lim phase retrieval."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stft import StftConfig, consistency_project, magnitude_project

__all__ = ["GlaConfig", "GlaResult", "gla"]


@dataclass(frozen=True)
class GlaConfig:
    iterations: int = 200

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass
class GlaResult:
    spectrogram: np.ndarray
    # residual_trace[k] = ||S_k - P_C(S_k)|| / ||S_k|| for k = 0..iterations
    residual_trace: np.ndarray


def gla(magnitude, config: GlaConfig = GlaConfig(), stft_config: StftConfig = StftConfig(), init_phase=None) -> GlaResult:
    """Alternate consistency and magnitude projections starting from zero (or ``init_phase``) phase."""
    magnitude = np.asarray(magnitude, dtype=np.float64)
    if np.any(magnitude < 0):
        raise ValueError("magnitude must be entrywise nonnegative")
    phase = 0.0 if init_phase is None else np.asarray(init_phase, dtype=np.float64)
    spec = magnitude * np.exp(1j * phase)
    norm = np.linalg.norm(magnitude)
    trace = []
    for _ in range(config.iterations):
        projected = consistency_project(spec, stft_config)
        trace.append(np.linalg.norm(spec - projected))
        spec = magnitude_project(projected, magnitude)
    trace.append(np.linalg.norm(spec - consistency_project(spec, stft_config)))
    trace = np.asarray(trace) / norm if norm > 0 else np.zeros(len(trace))
    return GlaResult(spectrogram=spec, residual_trace=trace)
