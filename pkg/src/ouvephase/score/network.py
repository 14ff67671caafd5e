"""A small convolutional encoder-decoder score model and its numpy-facing wrapper."""
from __future__ import annotations

from typing import Protocol

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from ..sde import OuveParams, std
from .embedding import TimeEmbedding

__all__ = ["ScoreEstimator", "SmallScoreNet", "NetworkScore", "build_score_net"]


class ScoreEstimator(Protocol):
    def evaluate(self, x_t: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
        """Score field with the same shape as ``x_t``."""
        ...


def _block(c_in, c_out, stride=1):
    return nn.Sequential(
        nn.Conv2d(c_in, c_out, 3, stride=stride, padding=1),
        nn.GroupNorm(min(8, c_out), c_out),
        nn.SiLU(),
    )


class SmallScoreNet(nn.Module):
    """Two-level U-Net over (frequency, frame) with time conditioning at the bottleneck.

    Input channels are Re/Im of the diffused state and Re/Im of the
    conditioner.  The network predicts the normalised noise ``z``; the score is
    ``-z_hat / sigma(t)`` (see :meth:`score`).
    """

    def __init__(self, channels=(16, 32), embed_dim: int = 64):
        super().__init__()
        c1, c2 = channels
        self.channels = (c1, c2)
        self.embed_dim = embed_dim
        self.time_embedding = TimeEmbedding(embed_dim)
        self.register_buffer(
            "frequencies", torch.tensor(self.time_embedding.frequencies, dtype=torch.float32)
        )
        self.time_mlp = nn.Sequential(nn.Linear(embed_dim, 4 * c2), nn.SiLU(), nn.Linear(4 * c2, c2))

        self.inc = nn.Sequential(_block(4, c1), _block(c1, c1))
        self.down1 = nn.Sequential(_block(c1, c2, stride=2), _block(c2, c2))
        self.down2 = _block(c2, c2, stride=2)
        self.mid = _block(c2, c2)
        self.up2 = nn.Sequential(_block(2 * c2, c2), _block(c2, c2))
        self.up1 = nn.Sequential(_block(c2 + c1, c1), _block(c1, c1))
        self.out = nn.Conv2d(c1, 2, 1)

    def embed(self, t):
        phase = t[:, None] * self.frequencies
        return torch.cat([torch.sin(phase), torch.cos(phase)], dim=-1)

    def forward(self, inputs, t):
        h1 = self.inc(inputs)
        h2 = self.down1(h1)
        h3 = self.down2(h2)
        h3 = h3 + self.time_mlp(self.embed(t))[:, :, None, None]
        h3 = self.mid(h3)
        u2 = F.interpolate(h3, size=h2.shape[-2:], mode="nearest")
        u2 = self.up2(torch.cat([u2, h2], dim=1))
        u1 = F.interpolate(u2, size=h1.shape[-2:], mode="nearest")
        u1 = self.up1(torch.cat([u1, h1], dim=1))
        return self.out(u1)

    def score(self, x_t, y, t, sigma_t):
        """Complex score for batched complex tensors ``x_t``, ``y`` of shape (B, K, L)."""
        inputs = torch.stack([x_t.real, x_t.imag, y.real, y.imag], dim=1)
        noise = self(inputs, t)
        return -torch.complex(noise[:, 0], noise[:, 1]) / sigma_t[:, None, None]

    def n_parameters(self) -> int:
        return sum(p.numel() for p in self.parameters())


class NetworkScore:
    """Adapts a :class:`SmallScoreNet` to numpy complex spectrograms."""

    def __init__(self, net: SmallScoreNet, params: OuveParams = OuveParams()):
        self.net = net
        self.params = params

    @torch.no_grad()
    def evaluate(self, x_t, y, t):
        x_t = np.asarray(x_t, dtype=np.complex128)
        y = np.asarray(y, dtype=np.complex128)
        if x_t.shape != y.shape or x_t.ndim != 2:
            raise ValueError(f"expected matching 2-D fields, got {x_t.shape} and {y.shape}")
        k, l = x_t.shape
        pad_k, pad_l = (-k) % 4, (-l) % 4
        x = torch.as_tensor(np.pad(x_t, ((0, pad_k), (0, pad_l))), dtype=torch.complex64)[None]
        c = torch.as_tensor(np.pad(y, ((0, pad_k), (0, pad_l))), dtype=torch.complex64)[None]
        tt = torch.tensor([float(t)], dtype=torch.float32)
        sigma = torch.tensor([float(std(t, self.params))], dtype=torch.float32)
        was_training = self.net.training
        self.net.eval()
        try:
            out = self.net.score(x, c, tt, sigma)[0, :k, :l]
        finally:
            self.net.train(was_training)
        return out.numpy().astype(np.complex128)

    __call__ = evaluate


def build_score_net(seed: int = 0, channels=(16, 32), embed_dim: int = 64) -> SmallScoreNet:
    """Construct a :class:`SmallScoreNet` with weights drawn from ``seed`` (global torch RNG untouched)."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return SmallScoreNet(channels=channels, embed_dim=embed_dim)
