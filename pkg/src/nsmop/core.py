"""Shared domain types for the solver.

Objectives are exposed as oracles that return the function value and a single
subgradient at a point.  Every oracle call is counted so that benchmark
reports cannot silently bypass the bookkeeping.  A :class:`Problem` bundles k
oracles over a common R^n together with optional benchmark metadata.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class DimensionMismatchError(ValueError):
    """Raised when vector lengths do not agree."""


class NonFiniteError(ValueError):
    """Raised when a NaN or infinity enters or leaves an operation."""


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-d float array, optionally of length ``dim``."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-d vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(f"vector contains non-finite entries: {v}")
    return v


def dominates(a, b) -> bool:
    """True iff objective vector ``a`` dominates ``b``.

    ``a`` dominates ``b`` when it is no worse in every component and strictly
    better in at least one.
    """
    av = as_vector(a)
    bv = as_vector(b)
    if av.shape[0] != bv.shape[0]:
        raise DimensionMismatchError(
            f"objective vectors differ in length: {av.shape[0]} vs {bv.shape[0]}"
        )
    return bool(np.all(av <= bv) and np.any(av < bv))


def nondominated_mask(values: np.ndarray) -> np.ndarray:
    """Boolean mask of the mutually non-dominated rows of ``values`` (M, k)."""
    F = np.asarray(values, dtype=float)
    if F.ndim != 2:
        raise DimensionMismatchError("expected a 2-d array of objective vectors")
    if not np.all(np.isfinite(F)):
        raise NonFiniteError("objective values contain non-finite entries")
    m = F.shape[0]
    mask = np.ones(m, dtype=bool)
    chunk = 256
    for start in range(0, m, chunk):
        block = F[start : start + chunk]  # (b, k)
        # row i of `le`: which points are <= block[i] everywhere
        le = np.all(F[None, :, :] <= block[:, None, :], axis=2)
        lt = np.any(F[None, :, :] < block[:, None, :], axis=2)
        dominated = np.any(le & lt, axis=1)
        mask[start : start + chunk] = ~dominated
    return mask


class ObjectiveOracle:
    """Value-and-one-subgradient callbacks for a single objective.

    The wrapped callables must be deterministic.  ``value`` and ``subgrad``
    are the only sanctioned entry points; they increment the evaluation
    counters and reject non-finite data immediately (a NaN would silently
    poison the direction-finding quadratic program downstream).
    """

    def __init__(self, value_fn: Callable, subgrad_fn: Callable, name: str = ""):
        self._value_fn = value_fn
        self._subgrad_fn = subgrad_fn
        self.name = name
        self.value_count = 0
        self.subgrad_count = 0

    def value(self, x: np.ndarray) -> float:
        raw = self._value_fn(x)
        self.value_count += 1
        val = float(raw)
        if not math.isfinite(val):
            raise NonFiniteError(f"objective {self.name!r} returned {val} at {x}")
        return val

    def subgrad(self, x: np.ndarray) -> np.ndarray:
        raw = self._subgrad_fn(x)
        self.subgrad_count += 1
        g = np.asarray(raw, dtype=float)
        if g.shape != np.shape(x):
            raise DimensionMismatchError(
                f"objective {self.name!r}: subgradient shape {g.shape} != point shape {np.shape(x)}"
            )
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"objective {self.name!r} returned subgradient {g} at {x}")
        return g

    def fresh_clone(self) -> "ObjectiveOracle":
        return ObjectiveOracle(self._value_fn, self._subgrad_fn, self.name)


class Problem:
    """A vector objective over R^n given as k single-subgradient oracles.

    Instances are immutable apart from the evaluation counters, so one
    Problem instance should serve one solver run at a time; use
    :meth:`fresh_clone` to obtain an independent copy with zeroed counters
    for parallel or repeated runs.
    """

    def __init__(
        self,
        name: str,
        objectives: Sequence[ObjectiveOracle],
        dimension: int,
        benchmark_box: tuple | None = None,
    ):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        if len(objectives) < 1:
            raise ValueError("a problem needs at least one objective")
        self.name = name
        self.objectives = list(objectives)
        self.dimension = int(dimension)
        if benchmark_box is not None:
            lower = as_vector(benchmark_box[0], dimension)
            upper = as_vector(benchmark_box[1], dimension)
            if not np.all(lower < upper):
                raise ValueError("benchmark box must satisfy lower < upper componentwise")
            benchmark_box = (lower, upper)
        self.benchmark_box = benchmark_box
        self.outer_iterations = 0

    @property
    def k(self) -> int:
        return len(self.objectives)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """All k objective values at ``x`` (counts one evaluation per objective)."""
        return np.array([obj.value(x) for obj in self.objectives])

    def record_descent_step(self) -> None:
        self.outer_iterations += 1

    def fresh_clone(self) -> "Problem":
        return Problem(
            self.name,
            [obj.fresh_clone() for obj in self.objectives],
            self.dimension,
            self.benchmark_box,
        )


@dataclass(frozen=True)
class CounterSnapshot:
    """Evaluation totals at a point in time.  Value counts are per objective,
    so one full vector evaluation on a k-objective problem counts k."""

    value_evals: int
    subgrad_evals: int
    outer_iterations: int


def snapshot_counters(problem: Problem) -> CounterSnapshot:
    """Current counter totals summed over all objectives.  Does not reset."""
    return CounterSnapshot(
        value_evals=sum(o.value_count for o in problem.objectives),
        subgrad_evals=sum(o.subgrad_count for o in problem.objectives),
        outer_iterations=problem.outer_iterations,
    )


ADAPTIVE = "adaptive"


@dataclass
class SolverConfig:
    """Tolerances and guards shared by the direction and descent loops.

    ``t0`` is either a positive initial Armijo step or the string
    ``"adaptive"``, which resolves to ``max(1/||v||, 1)`` per iteration.
    ``epsilon_schedule`` switches :func:`nsmop.descent.solve_eps_decreasing`
    through a strictly decreasing sequence of epsilons.
    """

    epsilon: float = 1e-3
    delta: float = 1e-3
    armijo_c: float = 0.25
    t0: float | str = ADAPTIVE
    max_outer_iterations: int = 5000
    max_direction_iterations: int = 200
    max_bisection_iterations: int = 64
    max_armijo_halvings: int = 30
    epsilon_schedule: tuple[float, ...] | None = None
    qp_tolerance: float = 1e-12
    single_index_enrichment: bool = False
    unbounded_threshold: float = 1e8

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must lie in (0, 1)")
        if isinstance(self.t0, str):
            if self.t0 != ADAPTIVE:
                raise ValueError(f"t0 must be a positive number or {ADAPTIVE!r}")
        elif self.t0 <= 0:
            raise ValueError("fixed t0 must be positive")
        for name in (
            "max_outer_iterations",
            "max_direction_iterations",
            "max_bisection_iterations",
            "max_armijo_halvings",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.qp_tolerance <= 0:
            raise ValueError("qp_tolerance must be positive")
        if self.epsilon_schedule is not None:
            sched = tuple(float(e) for e in self.epsilon_schedule)
            if len(sched) == 0:
                raise ValueError("epsilon_schedule must not be empty")
            if any(e <= 0 for e in sched):
                raise ValueError("epsilon_schedule entries must be positive")
            if any(a <= b for a, b in zip(sched, sched[1:])):
                raise ValueError("epsilon_schedule must be strictly decreasing")
            self.epsilon_schedule = sched
