"""Input checks shared by the estimator wrappers."""
from __future__ import annotations

import numpy as np

from .io import Waveform


def check_magnitudes(X, n_bins: int | None = None):
    """Return ``(list_of_2d_arrays, was_single)`` for one magnitude spectrogram or a batch of them."""
    if isinstance(X, np.ndarray) and X.ndim == 2:
        items, single = [X], True
    elif isinstance(X, np.ndarray) and X.ndim == 3:
        items, single = list(X), False
    else:
        items, single = list(X), False
    out = []
    for i, item in enumerate(items):
        a = np.asarray(item)
        if np.iscomplexobj(a):
            raise ValueError(f"item {i}: expected a real magnitude spectrogram, got complex values")
        a = a.astype(np.float64)
        if a.ndim != 2 or 0 in a.shape:
            raise ValueError(f"item {i}: expected a non-empty 2-D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError(f"item {i}: contains non-finite values")
        if np.any(a < 0):
            raise ValueError(f"item {i}: magnitude must be nonnegative")
        if n_bins is not None and a.shape[0] != n_bins:
            raise ValueError(f"item {i}: expected {n_bins} frequency bins, got {a.shape[0]}")
        out.append(a)
    if not out:
        raise ValueError("no spectrograms given")
    return out, single


def check_waveforms(X, sample_rate: int):
    """Coerce a waveform, 1-D array, or sequence thereof into a list of :class:`Waveform`."""
    if isinstance(X, Waveform) or (isinstance(X, np.ndarray) and X.ndim == 1):
        X = [X]
    out = []
    for i, item in enumerate(X):
        if isinstance(item, Waveform):
            if item.sample_rate != sample_rate:
                raise ValueError(f"item {i}: sample rate {item.sample_rate} != {sample_rate}")
            out.append(item)
        else:
            out.append(Waveform(np.asarray(item, dtype=np.float64), sample_rate))
    if not out:
        raise ValueError("no waveforms given")
    return out
