"""Trace consumers.  Each analyzer is a fold: call it with events, then read its result."""

from .activity import (ActivationRecord, ActivationTracker, StatsCollector,
                       detect_useless_activations, statistics)
from .evolution import EvolutionBuilder, EvolutionRow, evolution_matrix, to_csv
from .oracle import OracleSizeError, oracle_solve
from .tree import SearchTree, TreeBuilder, TreeError, TreeNode, build_search_tree, emit_dot
from .validate import TraceValidator, Violation, format_report, validate_trace

__all__ = [
    "ActivationRecord", "ActivationTracker", "StatsCollector", "detect_useless_activations",
    "statistics", "EvolutionBuilder", "EvolutionRow", "evolution_matrix", "to_csv",
    "OracleSizeError", "oracle_solve", "SearchTree", "TreeBuilder", "TreeError", "TreeNode",
    "build_search_tree", "emit_dot", "TraceValidator", "Violation", "format_report",
    "validate_trace",
]
