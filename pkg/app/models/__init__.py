"""Models package."""

from app.models.dataset import Dataset
from app.models.graph import NormalizedAffinity, SimilarityGraph
from app.models.ranking import FeatureRanking
from app.models.solver import (
    AdaptiveGraph,
    ProjectionMatrix,
    PseudoLabels,
    SolverState,
    TraceRow,
)

__all__ = [
    "Dataset",
    "SimilarityGraph",
    "NormalizedAffinity",
    "FeatureRanking",
    "AdaptiveGraph",
    "ProjectionMatrix",
    "PseudoLabels",
    "SolverState",
    "TraceRow",
]
