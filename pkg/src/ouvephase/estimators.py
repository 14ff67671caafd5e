"""scikit-learn style wrappers around the phase-retrieval routines.

Both estimators map magnitude spectrograms ``(K, L)`` to complex
spectrograms with the same magnitude.  A single 2-D input gives a single
output array; a batch (3-D array or list) gives a list.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_magnitudes, check_waveforms
from .baselines import GlaConfig, gla
from .sampler import SamplerConfig, retrieve_phase
from .sde import OuveParams
from .score import NetworkScore, TrainingConfig, build_score_net, train
from .stft import StftConfig, istft, stft
from .transforms import CompressionParams, compress

__all__ = ["GriffinLim", "DiffusionPhaseRetriever"]


class _StftParamsMixin:
    def _stft_config(self):
        return StftConfig(window_len=self.window_len, hop=self.hop, expected_rate=self.sample_rate)

    def inverse_transform(self, S, target_len=None):
        """Complex spectrogram(s) to waveform array(s)."""
        config = self._stft_config()
        if isinstance(S, np.ndarray) and S.ndim == 2:
            return istft(S, config, target_len)
        return [istft(s, config, target_len) for s in S]


class GriffinLim(_StftParamsMixin, TransformerMixin, BaseEstimator):
    """Griffin-Lim phase retrieval with zero-phase initialisation.

    Stateless: ``fit`` only validates the STFT parameters.
    """

    def __init__(self, n_iter=200, window_len=510, hop=128, sample_rate=16000):
        self.n_iter = n_iter
        self.window_len = window_len
        self.hop = hop
        self.sample_rate = sample_rate

    def fit(self, X=None, y=None):
        self.stft_config_ = self._stft_config()
        self.gla_config_ = GlaConfig(iterations=self.n_iter)
        return self

    def transform(self, X):
        check_is_fitted(self, "stft_config_")
        mags, single = check_magnitudes(X, self.stft_config_.n_bins)
        results = [gla(a, self.gla_config_, self.stft_config_) for a in mags]
        self.residual_traces_ = [r.residual_trace for r in results]
        specs = [r.spectrogram for r in results]
        return specs[0] if single else specs


class DiffusionPhaseRetriever(_StftParamsMixin, TransformerMixin, BaseEstimator):
    """Phase retrieval by reverse diffusion with a trained score network.

    ``fit`` takes clean waveforms and trains a small score model by denoising
    score matching; ``transform`` samples phase for magnitude spectrograms.
    """

    def __init__(self, n_steps=30, sigma_min=0.05, sigma_max=0.5, gamma=1.5, t_eps=0.03,
                 alpha=0.5, beta=0.15, window_len=510, hop=128, sample_rate=16000,
                 learning_rate=1e-4, max_iter=2000, batch_size=4, slice_frames=256,
                 channels=(16, 32), embed_dim=64, enforce_magnitude=True, random_state=0):
        self.n_steps = n_steps
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max
        self.gamma = gamma
        self.t_eps = t_eps
        self.alpha = alpha
        self.beta = beta
        self.window_len = window_len
        self.hop = hop
        self.sample_rate = sample_rate
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.batch_size = batch_size
        self.slice_frames = slice_frames
        self.channels = channels
        self.embed_dim = embed_dim
        self.enforce_magnitude = enforce_magnitude
        self.random_state = random_state

    def _sde_params(self):
        return OuveParams(self.sigma_min, self.sigma_max, self.gamma, 1.0, self.t_eps)

    def _compression(self):
        return CompressionParams(self.alpha, self.beta)

    def fit(self, X, y=None):
        stft_config = self._stft_config()
        waves = check_waveforms(X, self.sample_rate)
        compression = self._compression()
        dataset = [compress(stft(w, stft_config), compression) for w in waves]
        config = TrainingConfig(
            learning_rate=self.learning_rate,
            steps=self.max_iter,
            batch_size=self.batch_size,
            slice_frames=self.slice_frames,
            seed=self.random_state,
        )
        net = build_score_net(self.random_state, tuple(self.channels), self.embed_dim)
        net, losses, _ = train(net, dataset, config, self._sde_params())
        self.net_ = net
        self.loss_curve_ = np.asarray(losses)
        self.n_iter_ = len(losses)
        return self

    def transform(self, X):
        check_is_fitted(self, "net_")
        stft_config = self._stft_config()
        mags, single = check_magnitudes(X, stft_config.n_bins)
        params = self._sde_params()
        score = NetworkScore(self.net_, params)
        specs = []
        for i, a in enumerate(mags):
            sampler = SamplerConfig(self.n_steps, seed=self.random_state + i, enforce_magnitude=self.enforce_magnitude)
            specs.append(retrieve_phase(a, score, sampler, params, self._compression(), stft_config).spectrogram)
        return specs[0] if single else specs
