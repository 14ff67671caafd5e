"""Synthetic test signals: sinusoid mixtures and a crude voiced-speech imitation."""
from __future__ import annotations

import numpy as np

from .io import Waveform

__all__ = ["sinusoid", "sinusoid_mixture", "speech_like", "sinusoid_corpus"]


def sinusoid(freq: float, duration: float = 1.0, rate: int = 16000, amplitude: float = 0.5, phase: float = 0.0):
    n = np.arange(int(round(duration * rate)))
    return Waveform(amplitude * np.sin(2 * np.pi * freq * n / rate + phase), rate)


def sinusoid_mixture(rng: np.random.Generator, duration: float = 1.0, rate: int = 16000,
                     n_partials=(2, 4), f_range=(100.0, 3000.0)) -> Waveform:
    """Sum of a few sinusoids with random frequency, amplitude and phase under a smooth envelope."""
    n = np.arange(int(round(duration * rate)))
    k = int(rng.integers(n_partials[0], n_partials[1] + 1))
    freqs = rng.uniform(*f_range, size=k)
    amps = rng.uniform(0.2, 1.0, size=k)
    phases = rng.uniform(0, 2 * np.pi, size=k)
    x = np.sum(amps[:, None] * np.sin(2 * np.pi * freqs[:, None] * n / rate + phases[:, None]), axis=0)
    envelope = 0.6 + 0.4 * np.sin(2 * np.pi * rng.uniform(0.5, 3.0) * n / rate + rng.uniform(0, 2 * np.pi))
    x *= envelope
    return Waveform(0.5 * x / np.max(np.abs(x)), rate)


def speech_like(rng: np.random.Generator, duration: float = 1.0, rate: int = 16000) -> Waveform:
    """Harmonic source with a wandering pitch, formant-like spectral tilt, syllabic envelope and noise."""
    n = int(round(duration * rate))
    t = np.arange(n) / rate
    f0 = rng.uniform(90, 220) * (1 + 0.1 * np.sin(2 * np.pi * rng.uniform(1, 4) * t))
    phase = 2 * np.pi * np.cumsum(f0) / rate
    formants = rng.uniform([400, 1100, 2300], [900, 1800, 3200])
    x = np.zeros(n)
    for h in range(1, int(4000 // f0.max()) + 1):
        fh = h * f0
        gain = sum(np.exp(-((fh - f) / 250.0) ** 2) for f in formants) + 0.05
        x += gain / h**0.5 * np.sin(h * phase)
    syllables = np.clip(np.sin(2 * np.pi * rng.uniform(2, 5) * t + rng.uniform(0, 2 * np.pi)), 0, None)
    x = x * syllables + 0.01 * rng.standard_normal(n)
    return Waveform(0.5 * x / np.max(np.abs(x)), rate)


def sinusoid_corpus(count: int, seed: int = 0, duration: float = 1.0, rate: int = 16000):
    rng = np.random.default_rng(seed)
    return [sinusoid_mixture(rng, duration, rate) for _ in range(count)]
