"""Short-time Fourier transform with least-squares overlap-add inversion.

Spectrograms are plain ``complex128`` arrays of shape ``(K, L)`` with
``K = window_len // 2 + 1`` one-sided bins (rows) and ``L`` frames (columns).
The phase of each frame is referenced to the first sample of the frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.signal import get_window

from .io import Waveform

__all__ = [
    "StftConfig",
    "stft",
    "istft",
    "consistency_project",
    "magnitude_project",
    "n_frames",
    "max_signal_len",
]


@dataclass(frozen=True)
class StftConfig:
    window_len: int = 510
    hop: int = 128
    window: str = "hann"
    expected_rate: int = 16000

    def __post_init__(self):
        if self.window != "hann":
            raise ValueError(f"only the periodic Hann window is supported, got {self.window!r}")
        if self.window_len < 2 or self.window_len % 2:
            raise ValueError(f"window_len must be an even integer >= 2, got {self.window_len}")
        if not 0 < self.hop <= self.window_len:
            raise ValueError(f"hop must satisfy 0 < hop <= window_len, got {self.hop}")
        if self.expected_rate <= 0:
            raise ValueError("expected_rate must be positive")
        if overlap_add_floor(self) <= 0:
            raise ValueError(
                f"window_len={self.window_len}, hop={self.hop} leaves gaps in the squared-window overlap-add"
            )

    @cached_property
    def analysis_window(self) -> np.ndarray:
        return get_window("hann", self.window_len, fftbins=True)

    @property
    def n_bins(self) -> int:
        return self.window_len // 2 + 1

    @property
    def pad(self) -> int:
        return self.window_len // 2


def overlap_add_floor(config: StftConfig) -> float:
    """Minimum of the steady-state squared-window overlap-add sum.

    Least-squares synthesis divides by this sum, so it must stay positive.
    """
    w2 = get_window("hann", config.window_len, fftbins=True) ** 2
    acc = np.zeros(config.hop)
    for start in range(0, config.window_len, config.hop):
        chunk = w2[start:start + config.hop]
        acc[:chunk.size] += chunk
    return float(acc.min())


def n_frames(n_samples: int, config: StftConfig) -> int:
    padded = n_samples + 2 * config.pad
    return (padded - config.window_len) // config.hop + 1


def max_signal_len(frames: int, config: StftConfig) -> int:
    """Longest signal whose analysis has exactly ``frames`` frames."""
    return config.hop * frames - 1


def _samples(x) -> np.ndarray:
    if isinstance(x, Waveform):
        return x.samples
    return np.asarray(x, dtype=np.float64)


def stft(x, config: StftConfig = StftConfig()) -> np.ndarray:
    """Analyse a waveform (or raw sample array) into a ``(K, L)`` spectrogram."""
    if isinstance(x, Waveform) and x.sample_rate != config.expected_rate:
        raise ValueError(
            f"sample rate {x.sample_rate} Hz does not match the configured {config.expected_rate} Hz"
        )
    samples = _samples(x)
    if samples.ndim != 1 or samples.size == 0:
        raise ValueError("stft needs a non-empty one-dimensional signal")
    padded = np.pad(samples, config.pad)
    frames = np.lib.stride_tricks.sliding_window_view(padded, config.window_len)[:: config.hop]
    return np.fft.rfft(frames * config.analysis_window, axis=-1).T


def istft(spec, config: StftConfig = StftConfig(), target_len: int | None = None) -> np.ndarray:
    """Least-squares overlap-add synthesis.

    Each inverse-DFT frame is weighted by the window, overlap-added and divided
    by the overlap-added squared window.  The result is trimmed (or
    zero-padded) to ``target_len`` samples; by default the length implied by
    the frame count is used (see :func:`max_signal_len`).
    """
    spec = np.asarray(spec)
    if spec.ndim != 2 or spec.shape[0] != config.n_bins:
        raise ValueError(f"expected a spectrogram with {config.n_bins} rows, got shape {spec.shape}")
    n_fr = spec.shape[1]
    win = config.analysis_window
    frames = np.fft.irfft(spec.T, n=config.window_len, axis=-1) * win
    total = config.window_len + config.hop * (n_fr - 1)
    out = np.zeros(total)
    norm = np.zeros(total)
    w2 = win**2
    for i in range(n_fr):
        sl = slice(i * config.hop, i * config.hop + config.window_len)
        out[sl] += frames[i]
        norm[sl] += w2
    out, norm = out[config.pad:], norm[config.pad:]
    if np.any(norm <= 1e-10):
        raise ValueError("overlap-add normalisation vanishes inside the signal")
    out /= norm
    if target_len is None:
        target_len = max_signal_len(n_fr, config)
    if target_len <= out.size:
        return out[:target_len]
    return np.pad(out, (0, target_len - out.size))


def consistency_project(spec, config: StftConfig = StftConfig()) -> np.ndarray:
    """Map ``spec`` to the nearest consistent spectrogram, ``stft(istft(spec))``."""
    return stft(istft(spec, config), config)


def magnitude_project(spec, magnitude) -> np.ndarray:
    """Replace the modulus of ``spec`` by ``magnitude`` keeping its phase.

    Bins where ``spec`` is exactly zero get phase 0.
    """
    spec = np.asarray(spec)
    magnitude = np.asarray(magnitude, dtype=np.float64)
    if spec.shape != magnitude.shape:
        raise ValueError(f"shape mismatch: {spec.shape} vs {magnitude.shape}")
    if np.any(magnitude < 0):
        raise ValueError("magnitude must be entrywise nonnegative")
    return magnitude * np.exp(1j * np.angle(spec))
