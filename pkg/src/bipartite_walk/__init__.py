"""Coined quantum walk search on complete bipartite graphs."""

from .graph import GraphSpec, InvalidArgument, MarkConfig, build_graph, mark, mark_vertices
from .walk import ProbabilityTrace, WalkState, evolve, initial_state, step
from .reduced import DegenerateBasisError, ReducedOperator, simulate_reduced
from .harness import ExperimentConfig, run, table, validate

__all__ = [
    "GraphSpec",
    "InvalidArgument",
    "MarkConfig",
    "build_graph",
    "mark",
    "mark_vertices",
    "ProbabilityTrace",
    "WalkState",
    "evolve",
    "initial_state",
    "step",
    "DegenerateBasisError",
    "ReducedOperator",
    "simulate_reduced",
    "ExperimentConfig",
    "run",
    "table",
    "validate",
]
