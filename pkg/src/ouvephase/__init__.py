"""STFT phase retrieval by solving a reverse Ornstein-Uhlenbeck variance-exploding diffusion."""

__version__ = "0.1.0"

from .baselines import GlaConfig, gla
from .estimators import DiffusionPhaseRetriever, GriffinLim
from .io import Waveform, load_spec, read_wav, save_spec, write_wav
from .sampler import RetrievalResult, SamplerConfig, retrieve_phase, reverse_step, solve_reverse
from .sde import AnalyticScore, OuveParams
from .stft import StftConfig, consistency_project, istft, magnitude_project, stft
from .transforms import CompressionParams, compress, decompress

__all__ = [
    "AnalyticScore",
    "CompressionParams",
    "DiffusionPhaseRetriever",
    "GlaConfig",
    "GriffinLim",
    "OuveParams",
    "RetrievalResult",
    "SamplerConfig",
    "StftConfig",
    "Waveform",
    "compress",
    "consistency_project",
    "decompress",
    "gla",
    "istft",
    "load_spec",
    "magnitude_project",
    "read_wav",
    "retrieve_phase",
    "reverse_step",
    "save_spec",
    "solve_reverse",
    "stft",
    "write_wav",
]
