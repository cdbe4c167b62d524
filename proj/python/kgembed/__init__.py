"""Parallel knowledge graph embedding: translational models, lock-free
multi-threaded SGD training, and link-prediction evaluation."""

from ._core import (
    CorruptionMode,
    Corruptor,
    EpochLog,
    KnowledgeGraph,
    MetricSet,
    ModelKind,
    ModelSpec,
    Norm,
    ParamStore,
    ProjInit,
    RankReport,
    Rng,
    ScoreBreakdown,
    Side,
    Split,
    Table,
    TrainConfig,
    Triple,
    evaluate,
    gradient_step,
    rank,
    score,
    score_value,
    train,
)

__all__ = [
    "CorruptionMode",
    "Corruptor",
    "EpochLog",
    "KnowledgeGraph",
    "MetricSet",
    "ModelKind",
    "ModelSpec",
    "Norm",
    "ParamStore",
    "ProjInit",
    "RankReport",
    "Rng",
    "ScoreBreakdown",
    "Side",
    "Split",
    "Table",
    "TrainConfig",
    "Triple",
    "evaluate",
    "gradient_step",
    "rank",
    "score",
    "score_value",
    "train",
]

__version__ = "0.1.0"
