"""Checkpoint directories for :class:`SmallScoreNet`.

A checkpoint is a directory holding ``manifest.txt`` (``key=value`` lines)
and one spectrogram-container file per tensor.  Real tensors are stored
flattened as the real part of an ``(n, 1)`` complex payload, which keeps
float32 values exact.
"""
from __future__ import annotations

import dataclasses
import os
from pathlib import Path

import numpy as np
import torch

from ..io import load_spec, save_spec
from .network import SmallScoreNet

__all__ = ["save_checkpoint", "load_checkpoint", "Checkpoint"]

FORMAT = "ouvephase-checkpoint"


@dataclasses.dataclass
class Checkpoint:
    net: SmallScoreNet
    step: int
    manifest: dict
    optimizer_state: dict | None


def _write_tensor(path, tensor):
    flat = tensor.detach().cpu().numpy().astype(np.float64).reshape(-1, 1)
    if flat.size == 0:
        flat = np.zeros((1, 1))
    save_spec(path, flat.astype(np.complex128))


def _read_tensor(path, shape):
    flat = load_spec(path).real
    n = int(np.prod(shape))
    return torch.tensor(flat.ravel()[:n].reshape(shape), dtype=torch.float32)


def _config_lines(prefix, obj):
    if obj is None:
        return []
    return [f"{prefix}.{f.name}={getattr(obj, f.name)}" for f in dataclasses.fields(obj)]


def save_checkpoint(path, net: SmallScoreNet, *, step: int = 0, optimizer=None, training=None, params=None):
    path = Path(path)
    (path / "tensors").mkdir(parents=True, exist_ok=True)
    lines = [
        f"format={FORMAT}",
        "version=1",
        f"step={step}",
        f"net.channels={','.join(map(str, net.channels))}",
        f"net.embed_dim={net.embed_dim}",
    ]
    lines += _config_lines("training", training)
    lines += _config_lines("sde", params)

    tensors = {f"param.{k}": v for k, v in net.state_dict().items()}
    if optimizer is not None:
        state = optimizer.state_dict()
        lines.append(f"optim.steps={','.join(str(int(state['state'][i]['step'])) for i in sorted(state['state']))}")
        for i, slot in state["state"].items():
            tensors[f"optim.{i}.exp_avg"] = slot["exp_avg"]
            tensors[f"optim.{i}.exp_avg_sq"] = slot["exp_avg_sq"]
    for j, (name, tensor) in enumerate(tensors.items()):
        fname = f"t{j:04d}.cspg"
        _write_tensor(path / "tensors" / fname, tensor)
        shape = ",".join(map(str, tensor.shape))
        lines.append(f"tensor.{name}={fname}:{shape}")
    tmp = path / "manifest.txt.tmp"
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, path / "manifest.txt")


def _parse_manifest(text):
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    manifest_path = path / "manifest.txt"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no checkpoint manifest at {manifest_path}")
    manifest = _parse_manifest(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("format") != FORMAT:
        raise ValueError(f"{manifest_path} is not a score-network checkpoint")
    channels = tuple(int(c) for c in manifest["net.channels"].split(","))
    net = SmallScoreNet(channels=channels, embed_dim=int(manifest["net.embed_dim"]))

    state, optim_slots = {}, {}
    for key, value in manifest.items():
        if not key.startswith("tensor."):
            continue
        name = key[len("tensor."):]
        fname, _, shape = value.partition(":")
        shape = tuple(int(s) for s in shape.split(",")) if shape else ()
        tensor = _read_tensor(path / "tensors" / fname, shape)
        if name.startswith("param."):
            state[name[len("param."):]] = tensor
        else:
            _, idx, slot = name.split(".")
            optim_slots.setdefault(int(idx), {})[slot] = tensor
    net.load_state_dict(state)

    optimizer_state = None
    if optim_slots:
        steps = [int(s) for s in manifest["optim.steps"].split(",")]
        optimizer_state = {
            i: {"step": torch.tensor(float(s)), **optim_slots[i]} for i, s in zip(sorted(optim_slots), steps)
        }
    return Checkpoint(net=net, step=int(manifest.get("step", 0)), manifest=manifest, optimizer_state=optimizer_state)


def restore_optimizer(optimizer, optimizer_state):
    """Load Adam moments saved by :func:`save_checkpoint` into a fresh optimizer."""
    if not optimizer_state:
        return optimizer
    state = optimizer.state_dict()
    state["state"] = {i: dict(slot) for i, slot in optimizer_state.items()}
    optimizer.load_state_dict(state)
    return optimizer
