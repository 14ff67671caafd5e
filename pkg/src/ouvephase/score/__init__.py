from .checkpoint import Checkpoint, load_checkpoint, restore_optimizer, save_checkpoint
from .embedding import TimeEmbedding, embed_time
from .network import NetworkScore, ScoreEstimator, SmallScoreNet, build_score_net
from .training import (
    TrainingConfig,
    TrainingDiverged,
    dsm_loss,
    make_optimizer,
    random_slice,
    train,
    train_step,
)

__all__ = [
    "Checkpoint",
    "NetworkScore",
    "ScoreEstimator",
    "SmallScoreNet",
    "TimeEmbedding",
    "TrainingConfig",
    "TrainingDiverged",
    "build_score_net",
    "dsm_loss",
    "embed_time",
    "load_checkpoint",
    "make_optimizer",
    "random_slice",
    "restore_optimizer",
    "save_checkpoint",
    "train",
    "train_step",
]
