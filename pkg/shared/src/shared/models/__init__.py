"""Typed records shared by every component."""

from shared.models.network import NetSpec
from shared.models.noise import NoiseSpec
from shared.models.records import (
    ConsistencyReport,
    LocalityBox,
    MetricRecord,
    PeriodMatch,
    RenderStats,
)
from shared.models.render import GlobalMode, PeriodicSource, RenderPlan
from shared.models.run import ImageSourceDescriptor, RunConfig, SourceKind
from shared.models.training import TrainConfig

__all__ = [
    "ConsistencyReport",
    "GlobalMode",
    "ImageSourceDescriptor",
    "LocalityBox",
    "MetricRecord",
    "NetSpec",
    "NoiseSpec",
    "PeriodMatch",
    "PeriodicSource",
    "RenderPlan",
    "RenderStats",
    "RunConfig",
    "SourceKind",
    "TrainConfig",
]
