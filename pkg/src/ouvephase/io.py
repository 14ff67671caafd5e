"""Waveform and spectrogram file I/O.

WAV files are read and written through :mod:`scipy.io.wavfile`; only mono
PCM16 and IEEE float32 are accepted.  Complex spectrograms use a small binary
container::

    offset  size  field
    0       4     magic  b"CSPG"
    4       4     format version (uint32, currently 1)
    8       4     k_bins  (uint32)
    12      4     l_frames (uint32)
    16      ...   k_bins * l_frames (re, im) float64 pairs, column-major

All integers and floats are little-endian.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

__all__ = [
    "Waveform",
    "SpectrogramFormatError",
    "read_wav",
    "write_wav",
    "save_spec",
    "load_spec",
]

SPEC_MAGIC = b"CSPG"
SPEC_VERSION = 1
_HEADER = struct.Struct("<4sIII")

_PCM16_SCALE = 32768.0


class SpectrogramFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono signal with its sample rate (Hz)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("waveform samples must be one-dimensional")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform contains non-finite samples")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


def read_wav(path) -> Waveform:
    """Read a mono PCM16 or float32 WAV file.

    PCM16 values are scaled by 1/32768 so that the full-scale range maps into
    [-1, 1).  Float files are returned as stored.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such WAV file: {path}")
    rate, data = wavfile.read(path)
    if data.ndim != 1:
        raise ValueError("multichannel unsupported")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / _PCM16_SCALE
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV encoding: {data.dtype}")
    return Waveform(samples, rate)


def write_wav(path, waveform: Waveform, encoding: str = "pcm16") -> None:
    """Write ``waveform`` as PCM16 (default) or 32-bit float."""
    samples = np.asarray(waveform.samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise ValueError("cannot write non-finite samples")
    if encoding == "pcm16":
        data = np.clip(np.round(samples * _PCM16_SCALE), -32768, 32767).astype(np.int16)
    elif encoding == "float32":
        data = samples.astype(np.float32)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    wavfile.write(path, waveform.sample_rate, data)


def save_spec(path, spec) -> None:
    spec = np.asarray(spec)
    if spec.ndim != 2 or 0 in spec.shape:
        raise ValueError(f"expected a non-empty 2-D spectrogram, got shape {spec.shape}")
    k_bins, l_frames = spec.shape
    payload = np.asarray(spec, dtype="<c16").ravel(order="F")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SPEC_MAGIC, SPEC_VERSION, k_bins, l_frames))
        fh.write(payload.tobytes())


def load_spec(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise SpectrogramFormatError("truncated spectrogram header")
    magic, version, k_bins, l_frames = _HEADER.unpack_from(blob)
    if magic != SPEC_MAGIC:
        raise SpectrogramFormatError(f"bad magic {magic!r}")
    if version != SPEC_VERSION:
        raise SpectrogramFormatError(f"unsupported format version {version}")
    if k_bins == 0 or l_frames == 0:
        raise SpectrogramFormatError("header dimensions must be nonzero")
    body = blob[_HEADER.size:]
    expected = k_bins * l_frames * 16
    if len(body) != expected:
        raise SpectrogramFormatError(
            f"header claims {k_bins}x{l_frames} ({expected} bytes) but payload has {len(body)} bytes"
        )
    flat = np.frombuffer(body, dtype="<c16")
    return flat.reshape((k_bins, l_frames), order="F").astype(np.complex128)
