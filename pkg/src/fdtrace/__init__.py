"""Traceable finite-domain constraint solver and trace analyzers."""

from .constraints import ConstraintForm, ConstraintInstance, Kind
from .domain import Domain, UpdateType, VarRef
from .engine import Engine, StepOutcome
from .model import Model, generate_nqueens, generate_sorted, parse_model
from .search import solve
from .trace import Port, TraceEvent

__version__ = "0.1.0"

__all__ = [
    "ConstraintForm", "ConstraintInstance", "Kind", "Domain", "UpdateType", "VarRef",
    "Engine", "StepOutcome", "Model", "generate_nqueens", "generate_sorted", "parse_model",
    "solve", "Port", "TraceEvent",
]
