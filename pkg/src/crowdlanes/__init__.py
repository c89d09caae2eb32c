"""Lane detection in simulated crowds from proximity data."""

from .clustering import DbscanParams, Partition, dbscan
from .embedding import LayoutConfig, embed_graph
from .evaluation import nmi
from .kernels import BACKEND_NAME
from .pipeline import DetectionConfig, detect, run_pipeline
from .proximity import TemporalProximityGraph, build_proximity_graph, graph_from_trace
from .scenarios import build_scenario
from .similarity import SimilarityParams
from .simulation import ConfigError, Scenario, SimParams, SimTrace, run

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME", "ConfigError", "DbscanParams", "DetectionConfig", "LayoutConfig", "Partition",
    "Scenario", "SimParams", "SimTrace", "SimilarityParams", "TemporalProximityGraph",
    "build_proximity_graph", "build_scenario", "dbscan", "detect", "embed_graph", "graph_from_trace",
    "nmi", "run", "run_pipeline",
]
