"""Magnitude compression applied to spectrograms before they reach the score model."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["CompressionParams", "compress", "decompress"]


@dataclass(frozen=True)
class CompressionParams:
    alpha: float = 0.5
    beta: float = 0.15

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


def _remap_modulus(spec, new_modulus):
    spec = np.asarray(spec, dtype=np.complex128)
    return new_modulus(np.abs(spec)) * np.exp(1j * np.angle(spec))


def compress(spec, params: CompressionParams = CompressionParams()) -> np.ndarray:
    """``v -> beta * |v|**alpha * exp(j * angle(v))`` per bin; zero stays zero."""
    return _remap_modulus(spec, lambda mag: params.beta * mag**params.alpha)


def decompress(spec, params: CompressionParams = CompressionParams()) -> np.ndarray:
    """Inverse of :func:`compress`."""
    return _remap_modulus(spec, lambda mag: (mag / params.beta) ** (1.0 / params.alpha))
