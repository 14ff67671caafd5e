"""Ornstein-Uhlenbeck variance-exploding (OUVE) SDE.

Forward process::

    dx = gamma * (y - x) dt + g(t) dw,
    g(t) = sigma_min * (sigma_max / sigma_min)**t * sqrt(2 * log(sigma_max / sigma_min))

The perturbation kernel is Gaussian with closed-form mean and variance, which
makes forward sampling and the conditional score for a point-mass data
distribution exact.  All complex Gaussian noise is circularly symmetric with
``E|z|^2 = 1`` (variance 1/2 per real component).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OuveParams",
    "complex_normal",
    "drift",
    "diffusion",
    "mean",
    "variance",
    "std",
    "sample_forward",
    "sample_terminal",
    "analytic_score",
    "AnalyticScore",
]

_T_SLACK = 1e-12


@dataclass(frozen=True)
class OuveParams:
    sigma_min: float = 0.05
    sigma_max: float = 0.5
    gamma: float = 1.5
    T: float = 1.0
    t_eps: float = 0.03

    def __post_init__(self):
        if not 0 < self.sigma_min < self.sigma_max:
            raise ValueError("need 0 < sigma_min < sigma_max")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not 0 < self.t_eps < self.T:
            raise ValueError("need 0 < t_eps < T")
        if self.gamma + self.log_ratio == 0:
            raise ValueError("gamma + log(sigma_max / sigma_min) must be nonzero")

    @property
    def log_ratio(self) -> float:
        return math.log(self.sigma_max / self.sigma_min)


def _check_time(t, params: OuveParams, lower: float = 0.0):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < lower - _T_SLACK) or np.any(t > params.T + _T_SLACK):
        raise ValueError(f"process time {t} outside [{lower}, {params.T}]")
    return t


def _same_shape(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian draws."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def drift(x, y, params: OuveParams = OuveParams()):
    x, y = _same_shape(x, y)
    return params.gamma * (y - x)


def diffusion(t, params: OuveParams = OuveParams()):
    t = _check_time(t, params)
    ratio = params.sigma_max / params.sigma_min
    return params.sigma_min * ratio**t * math.sqrt(2.0 * params.log_ratio)


def mean(x0, y, t, params: OuveParams = OuveParams()):
    """Mean of x_t given x_0: ``exp(-gamma t) x0 + (1 - exp(-gamma t)) y``."""
    x0, y = _same_shape(x0, y)
    t = _check_time(t, params)
    keep = np.exp(-params.gamma * t)
    return keep * x0 + (-np.expm1(-params.gamma * t)) * y


def variance(t, params: OuveParams = OuveParams()):
    # r^{2t} - e^{-2 gamma t} = e^{-2 gamma t} * expm1(2t (log r + gamma)); avoids cancellation near t=0
    t = _check_time(t, params)
    lr, g = params.log_ratio, params.gamma
    bracket = np.exp(-2.0 * g * t) * np.expm1(2.0 * t * (lr + g))
    return params.sigma_min**2 * bracket * lr / (g + lr)


def std(t, params: OuveParams = OuveParams()):
    return np.sqrt(variance(t, params))


def sample_forward(x0, y, t, rng: np.random.Generator, params: OuveParams = OuveParams()):
    """Draw ``x_t = mean + sigma(t) z``; returns ``(x_t, z)``."""
    mu = mean(x0, y, t, params)
    z = complex_normal(rng, mu.shape)
    return mu + std(t, params) * z, z


def sample_terminal(y, rng: np.random.Generator, params: OuveParams = OuveParams()):
    y = np.asarray(y, dtype=np.complex128)
    if not np.all(np.isfinite(y)):
        raise ValueError("conditioner contains non-finite values")
    return y + std(params.T, params) * complex_normal(rng, y.shape)


def analytic_score(x_t, x0, y, t, params: OuveParams = OuveParams()):
    """Exact score of the perturbation kernel centred on a known clean sample."""
    _check_time(t, params, lower=params.t_eps)
    x_t, x0 = _same_shape(x_t, x0)
    return -(x_t - mean(x0, y, t, params)) / variance(t, params)


class AnalyticScore:
    """Score oracle for a point-mass data distribution at ``x0``.

    Only useful for verification: it needs the clean spectrogram it is
    supposed to recover.
    """

    def __init__(self, x0, params: OuveParams = OuveParams()):
        self.x0 = np.asarray(x0, dtype=np.complex128)
        self.params = params

    def evaluate(self, x_t, y, t):
        return analytic_score(x_t, self.x0, y, t, self.params)

    __call__ = evaluate
