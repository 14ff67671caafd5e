"""Fixed Fourier features of the diffusion time."""
from __future__ import annotations

import numpy as np

__all__ = ["TimeEmbedding", "embed_time"]


class TimeEmbedding:
    """Sinusoidal features at ``dim // 2`` log-spaced frequencies in [f_low, f_high]."""

    def __init__(self, dim: int = 64, f_low: float = 1.0, f_high: float = 1000.0):
        if dim < 2 or dim % 2:
            raise ValueError(f"embedding dim must be an even integer >= 2, got {dim}")
        if not 0 < f_low < f_high:
            raise ValueError("need 0 < f_low < f_high")
        self.dim = dim
        self.frequencies = np.geomspace(f_low, f_high, dim // 2)
        self.frequencies.setflags(write=False)

    def __call__(self, t) -> np.ndarray:
        return embed_time(t, self)


def embed_time(t, embedding: TimeEmbedding) -> np.ndarray:
    """``[sin(f_i t)..., cos(f_i t)...]``; a batch of times gives one row per time."""
    t = np.asarray(t, dtype=np.float64)
    phase = t[..., None] * embedding.frequencies
    return np.concatenate([np.sin(phase), np.cos(phase)], axis=-1)
