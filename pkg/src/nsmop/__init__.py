"""Descent methods and Pareto-set covering for locally Lipschitz
multiobjective optimization."""

from .core import (
    ADAPTIVE,
    CounterSnapshot,
    DimensionMismatchError,
    NonFiniteError,
    ObjectiveOracle,
    Problem,
    SolverConfig,
    dominates,
    nondominated_mask,
    snapshot_counters,
)
from .descent import (
    SolverRun,
    StepContractError,
    armijo_step,
    is_eps_delta_critical,
    solve,
    solve_eps_decreasing,
)
from .direction import (
    BisectionStallError,
    DirectionNonterminationError,
    DirectionOutcome,
    compute_descent_direction,
    find_new_subgradient,
)
from .minnorm import Bundle, MinNormConvergenceError, MinNormSolution, min_norm_point
from .problems import catalog, crescent_mifflin2, find_problem, quad_abs, steep_valley
from .subdivision import (
    Box,
    BoxCollection,
    EmptyCoverError,
    ParetoCover,
    descent_map_g,
    pareto_cover,
    select,
    subdivide,
)

__version__ = "0.1.0"

__all__ = [
    "ADAPTIVE",
    "Box",
    "BoxCollection",
    "Bundle",
    "BisectionStallError",
    "CounterSnapshot",
    "DimensionMismatchError",
    "DirectionNonterminationError",
    "DirectionOutcome",
    "EmptyCoverError",
    "MinNormConvergenceError",
    "MinNormSolution",
    "NonFiniteError",
    "ObjectiveOracle",
    "ParetoCover",
    "Problem",
    "SolverConfig",
    "SolverRun",
    "StepContractError",
    "armijo_step",
    "catalog",
    "compute_descent_direction",
    "crescent_mifflin2",
    "descent_map_g",
    "dominates",
    "find_new_subgradient",
    "find_problem",
    "is_eps_delta_critical",
    "min_norm_point",
    "nondominated_mask",
    "pareto_cover",
    "quad_abs",
    "select",
    "snapshot_counters",
    "solve",
    "solve_eps_decreasing",
    "steep_valley",
    "subdivide",
]
