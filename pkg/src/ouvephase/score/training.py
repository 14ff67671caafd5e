"""Denoising score matching for the OUVE process."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import torch

from ..sde import OuveParams, complex_normal, mean, std
from .network import SmallScoreNet

__all__ = [
    "TrainingConfig",
    "TrainingDiverged",
    "dsm_loss",
    "make_optimizer",
    "random_slice",
    "train_step",
    "train",
]

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 1e-4
    steps: int = 2000
    batch_size: int = 4
    slice_frames: int = 256
    seed: int = 0
    checkpoint_every: int = 0

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ValueError("learning_rate must be nonnegative")
        for name in ("steps", "batch_size", "slice_frames"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.checkpoint_every < 0:
            raise ValueError("checkpoint_every must be nonnegative")


def dsm_loss(s_pred, z, sigma_t) -> float:
    """``||s_pred + z / sigma_t||^2`` summed over all complex entries."""
    if not sigma_t > 0:
        raise ValueError(f"sigma_t must be positive, got {sigma_t}")
    s_pred, z = np.asarray(s_pred), np.asarray(z)
    if s_pred.shape != z.shape:
        raise ValueError(f"shape mismatch: {s_pred.shape} vs {z.shape}")
    return float(np.sum(np.abs(s_pred + z / sigma_t) ** 2))


def make_optimizer(net: SmallScoreNet, config: TrainingConfig) -> torch.optim.Optimizer:
    return torch.optim.Adam(net.parameters(), lr=config.learning_rate)


def random_slice(spec: np.ndarray, frames: int, rng: np.random.Generator) -> np.ndarray:
    """Random run of ``frames`` consecutive frames, zero-padded when the input is shorter."""
    n = spec.shape[1]
    if n <= frames:
        return np.pad(spec, ((0, 0), (0, frames - n)))
    start = int(rng.integers(0, n - frames + 1))
    return spec[:, start:start + frames]


def _complex(a):
    return torch.tensor(a, dtype=torch.complex64)


def _real(a):
    return torch.tensor(a, dtype=torch.float32)


def train_step(net, optimizer, x0, y, rng: np.random.Generator, params: OuveParams = OuveParams(), *, t=None, z=None):
    """One DSM update on a batch.

    ``x0`` and ``y`` are complex arrays of shape (B, K, L).  Diffusion times
    are drawn uniformly from [t_eps, T] and noise from the standard complex
    Gaussian unless given explicitly.  Returns the batch-mean loss before the
    update.
    """
    x0 = np.asarray(x0, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    batch = x0.shape[0]
    if t is None:
        t = rng.uniform(params.t_eps, params.T, size=batch)
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), (batch,))
    if z is None:
        z = complex_normal(rng, x0.shape)
    sigma = std(t, params)
    x_t = mean(x0, y, t[:, None, None], params) + sigma[:, None, None] * z

    sigma_t = _real(sigma)
    s_pred = net.score(_complex(x_t), _complex(y), _real(t), sigma_t)
    residual = s_pred + _complex(z) / sigma_t[:, None, None]
    loss = (residual.abs() ** 2).sum(dim=(1, 2)).mean()
    value = float(loss.detach())
    if not math.isfinite(value):
        raise TrainingDiverged(f"non-finite DSM loss {value}")
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()
    return value


def train(net, dataset, config: TrainingConfig = TrainingConfig(), params: OuveParams = OuveParams(),
          *, optimizer=None, start_step: int = 0, checkpoint_path=None, on_step=None):
    """Train ``net`` on random slices of ``dataset``.

    ``dataset`` is a sequence of compressed complex spectrograms (K, L_i); the
    conditioner for each slice is its zero-phase magnitude.  Returns
    ``(net, losses, optimizer)`` with one loss per step.
    """
    if len(dataset) == 0:
        raise ValueError("training dataset is empty")
    rng = np.random.default_rng([config.seed, start_step])
    if optimizer is None:
        optimizer = make_optimizer(net, config)
    net.train()
    losses = []
    for i in range(config.steps):
        step = start_step + i + 1
        idx = rng.integers(0, len(dataset), size=config.batch_size)
        x0 = np.stack([random_slice(dataset[j], config.slice_frames, rng) for j in idx])
        y = np.abs(x0).astype(np.complex128)
        try:
            loss = train_step(net, optimizer, x0, y, rng, params)
        except TrainingDiverged as exc:
            raise TrainingDiverged(f"step {step}: {exc}") from exc
        losses.append(loss)
        if on_step is not None:
            on_step(step, loss)
        if step % 100 == 0:
            log.info("step %d loss %.4g", step, loss)
        if checkpoint_path is not None and config.checkpoint_every and step % config.checkpoint_every == 0:
            from .checkpoint import save_checkpoint

            save_checkpoint(checkpoint_path, net, step=step, optimizer=optimizer, training=config, params=params)
    return net, losses, optimizer
