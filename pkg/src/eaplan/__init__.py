"""Expectation-aware planning: plans that explain themselves to an observer."""

from .compile import CompileConfig, EASolution, compile_ea, extract_solution, verify_solution
from .grounding import PlanningTask, ground, ground_pair, validate_plan
from .pddl import parse_domain, parse_problem
from .planner import Limits, Status, astar, optimal_cost
from .solve import SolveConfig, SolveMode, solve_ea
from .updates import ModelDiff, ModelUpdate, apply_updates, diff_models

__version__ = "0.1.0"

__all__ = [
    "CompileConfig", "EASolution", "compile_ea", "extract_solution", "verify_solution",
    "PlanningTask", "ground", "ground_pair", "validate_plan", "parse_domain",
    "parse_problem", "Limits", "Status", "astar", "optimal_cost", "SolveConfig",
    "SolveMode", "solve_ea", "ModelDiff", "ModelUpdate", "apply_updates", "diff_models",
]
