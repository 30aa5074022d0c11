"""Outer descent loops driving the direction search to critical points.

``solve`` repeats direction computation and an Armijo-backtracked step until
the direction search certifies criticality or an iteration guard fires.  The
step length is floored at ``eps/||v||``: the acceptance test of the direction
search already guarantees sufficient decrease there, so every accepted step
strictly decreases all objectives.  ``solve_eps_decreasing`` chains several
such runs through a decreasing epsilon schedule.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .core import (
    ADAPTIVE,
    CounterSnapshot,
    Problem,
    SolverConfig,
    as_vector,
    snapshot_counters,
)
from .direction import CRITICAL as DIRECTION_CRITICAL
from .direction import compute_descent_direction

CRITICAL = "critical"
MAX_ITERATIONS = "max_iterations"
UNBOUNDED_SUSPECTED = "unbounded_suspected"


class StepContractError(RuntimeError):
    """The fallback step failed the decrease it was guaranteed to satisfy."""


@dataclass
class SolverRun:
    """Record of one descent run.

    ``directions`` has one entry per accepted step plus, when the run stopped
    critical, the final certifying direction.  With ``keep_history=False``
    only the last iterate is retained (used by the subdivision driver).
    """

    iterates: list[np.ndarray]
    directions: list[np.ndarray]
    step_lengths: list[float]
    stop_reason: str
    counters: CounterSnapshot
    stage_starts: tuple[int, ...] = (0,)

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]


def resolve_t0(t0: float | str, vnorm: float) -> float:
    """Initial Armijo step: fixed value, or ``max(1/||v||, 1)`` in adaptive mode."""
    if t0 == ADAPTIVE:
        return max(1.0 / vnorm, 1.0)
    return float(t0)


def armijo_step(
    problem: Problem,
    x: np.ndarray,
    v: np.ndarray,
    epsilon: float,
    c: float,
    t0: float,
    max_armijo_halvings: int = 30,
    *,
    value_at_x: np.ndarray | None = None,
) -> float:
    """Backtracking step length for an acceptable direction ``v``.

    Returns ``max(2^-s t0, epsilon/||v||)`` where ``s`` is the first halving
    achieving ``f_i(x + t v) <= f_i(x) - t c ||v||^2`` for every objective.
    Halvings below the floor ``epsilon/||v||`` are pointless (the floor would
    override them), so the search stops there and falls back to the floor,
    which the direction's acceptance test guarantees; the decrease at the
    chosen step is re-verified either way.
    """
    fx = problem.evaluate(x) if value_at_x is None else np.asarray(value_at_x, dtype=float)
    norm_sq = float(v @ v)
    vnorm = float(np.sqrt(norm_sq))
    if vnorm <= 0.0:
        raise ValueError("direction must be nonzero")
    floor = epsilon / vnorm

    t = float(t0)
    for _ in range(max_armijo_halvings + 1):
        if t < floor:
            break
        trial = problem.evaluate(x + t * v)
        if np.all(trial <= fx - t * c * norm_sq):
            return t
        t *= 0.5

    trial = problem.evaluate(x + floor * v)
    if np.all(trial <= fx - c * epsilon * vnorm):
        return floor
    raise StepContractError(
        "floor step failed the sufficient-decrease test; "
        "the supplied direction was not acceptable"
    )


def solve(
    problem: Problem,
    x1,
    config: SolverConfig,
    *,
    keep_history: bool = True,
) -> SolverRun:
    """Descend from ``x1`` until an (epsilon, delta)-critical point is certified.

    Each iteration computes one descent direction and one Armijo step.  Stops
    with ``stop_reason=CRITICAL`` when the direction search returns a
    direction of norm at most delta, and with ``MAX_ITERATIONS`` (or
    ``UNBOUNDED_SUSPECTED`` after a very large total decrease) when the guard
    fires.
    """
    x = as_vector(x1, problem.dimension).copy()
    fx = problem.evaluate(x)
    f_start = fx.copy()

    iterates = [x.copy()]
    directions: list[np.ndarray] = []
    step_lengths: list[float] = []

    stop_reason = MAX_ITERATIONS
    for _ in range(config.max_outer_iterations):
        outcome = compute_descent_direction(problem, x, config, value_at_x=fx)
        if outcome.status == DIRECTION_CRITICAL:
            directions.append(outcome.v)
            stop_reason = CRITICAL
            break
        v = outcome.v
        vnorm = float(np.linalg.norm(v))
        t0 = resolve_t0(config.t0, vnorm)
        tbar = armijo_step(
            problem, x, v, config.epsilon, config.armijo_c, t0,
            config.max_armijo_halvings, value_at_x=fx,
        )
        x = x + tbar * v
        fx = problem.evaluate(x)
        problem.record_descent_step()
        directions.append(v)
        step_lengths.append(tbar)
        if keep_history:
            iterates.append(x.copy())
        else:
            iterates[-1] = x.copy()

    if stop_reason == MAX_ITERATIONS:
        if float(np.min(f_start - fx)) > config.unbounded_threshold:
            stop_reason = UNBOUNDED_SUSPECTED

    if not keep_history:
        directions = directions[-1:] if stop_reason == CRITICAL else []
        step_lengths = []

    return SolverRun(
        iterates=iterates,
        directions=directions,
        step_lengths=step_lengths,
        stop_reason=stop_reason,
        counters=snapshot_counters(problem),
    )


def solve_eps_decreasing(problem: Problem, x1, config: SolverConfig) -> SolverRun:
    """Run :func:`solve` through ``config.epsilon_schedule``, each stage starting
    from the previous stage's final iterate.  Returns the concatenated run;
    ``stage_starts`` holds the iterate index where each stage began.
    Certifying directions of intermediate stages are not retained."""
    if config.epsilon_schedule is None:
        raise ValueError("config.epsilon_schedule is required")
    x = as_vector(x1, problem.dimension)

    iterates: list[np.ndarray] = []
    directions: list[np.ndarray] = []
    step_lengths: list[float] = []
    stage_starts: list[int] = []
    stop_reason = CRITICAL

    for stage, eps in enumerate(config.epsilon_schedule):
        stage_config = dataclasses.replace(config, epsilon=eps, epsilon_schedule=None)
        run = solve(problem, x, stage_config)
        stage_starts.append(max(0, len(iterates) - 1))
        if stage == 0:
            iterates.extend(run.iterates)
        else:
            iterates.extend(run.iterates[1:])
        n_steps = len(run.step_lengths)
        directions.extend(run.directions[:n_steps])
        step_lengths.extend(run.step_lengths)
        stop_reason = run.stop_reason
        x = run.final
        if stage == len(config.epsilon_schedule) - 1 and run.stop_reason == CRITICAL:
            directions.append(run.directions[-1])

    return SolverRun(
        iterates=iterates,
        directions=directions,
        step_lengths=step_lengths,
        stop_reason=stop_reason,
        counters=snapshot_counters(problem),
        stage_starts=tuple(stage_starts),
    )


def is_eps_delta_critical(problem: Problem, x, epsilon: float, delta: float) -> bool:
    """Sound one-sided criticality check.

    True means a finite bundle inside the epsilon-subdifferential hull has a
    min-norm point of norm at most delta, which upper-bounds the true minimum
    over the full hull.  False certifies nothing.
    """
    config = SolverConfig(epsilon=epsilon, delta=delta)
    outcome = compute_descent_direction(problem, x, config)
    return outcome.status == DIRECTION_CRITICAL
