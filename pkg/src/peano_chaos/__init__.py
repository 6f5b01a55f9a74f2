"""Exact constructions and verifiers for chaotic maps on finite metric graphs."""

from ._rational import Q
from .cover import Partition, interior_cover, partition, refine, refinement_chain
from .metric_graph import Cell, GraphError, GraphPoint, MetricGraph
from .pl_map import MapError, PLMap, compose, iterate, sup_distance
from .spaces import GOLDEN

__version__ = "0.1.0"

__all__ = [
    "GOLDEN", "Cell", "GraphError", "GraphPoint", "MapError", "MetricGraph", "PLMap",
    "Partition", "Q", "compose", "interior_cover", "iterate", "partition", "refine",
    "refinement_chain", "sup_distance",
]
