"""Descent-direction computation by incremental subgradient bundling.

Starting from one subgradient per objective evaluated at the current point,
the loop alternates between solving the min-norm problem over the bundle and
testing the resulting direction for sufficient decrease at step ``eps/||v||``.
Objectives that fail the test contribute a fresh subgradient found by
bisection along the candidate ray, which provably pulls the next min-norm
point strictly closer to the origin.  The loop ends either with a direction
whose norm is at most ``delta`` (the point is flagged critical) or with a
direction that passes the decrease test for every objective.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Problem, SolverConfig, as_vector
from .minnorm import Bundle, min_norm_point

CRITICAL = "critical"
ACCEPTABLE = "acceptable"

#: slack for accepting the last bisection probe when the iteration cap fires
STALL_SLACK = 1e-12


class BisectionStallError(RuntimeError):
    """Bisection exhausted its iteration budget without an admissible probe.

    Carries the last probed subgradient ``xi`` and ray parameter ``t``.
    """

    def __init__(self, message: str, xi: np.ndarray, t: float):
        super().__init__(message)
        self.xi = xi
        self.t = t


class DirectionNonterminationError(RuntimeError):
    """The enrichment loop exceeded its guard; carries the trace so far."""

    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


@dataclass
class PassRecord:
    """One enrichment pass: direction norm and the violating objective indices."""

    norm: float
    violating: tuple[int, ...]


@dataclass
class DirectionOutcome:
    status: str  # CRITICAL or ACCEPTABLE
    v: np.ndarray
    bundle: Bundle
    iterations: int
    trace: list[PassRecord] = field(default_factory=list)
    #: distance from the base point of the oracle call that produced each member
    member_distances: list[float] = field(default_factory=list)


class LineSearchGap:
    """Gap between achieved and required decrease of one objective along a ray.

    Maps ``t`` to ``f_i(x + t v) - f_i(x) + c t ||v||^2``; the value at 0 is
    zero by construction, not by evaluation.
    """

    def __init__(self, problem: Problem, index: int, x: np.ndarray, v: np.ndarray,
                 c: float, value_at_x: float | None = None):
        self._oracle = problem.objectives[index]
        self.x = x
        self.v = v
        self.c = c
        self.norm_sq = float(v @ v)
        self.base = self._oracle.value(x) if value_at_x is None else value_at_x

    def __call__(self, t: float) -> float:
        if t == 0.0:
            return 0.0
        return self._oracle.value(self.x + t * self.v) - self.base + self.c * t * self.norm_sq


def find_new_subgradient(
    problem: Problem,
    index: int,
    x: np.ndarray,
    v: np.ndarray,
    epsilon: float,
    c: float,
    max_bisection_iterations: int = 64,
    *,
    value_at_x: float | None = None,
) -> tuple[np.ndarray, float]:
    """Bisect along ``x + t v`` for a subgradient of objective ``index`` with
    ``<v, xi> > -c ||v||^2``.

    Assumes the sufficient-decrease test failed for this objective, so the
    gap function is positive at the far end of the ray.  Returns the
    subgradient together with the ray parameter ``t`` at which it was taken;
    the probe point lies within ``epsilon`` of ``x`` because
    ``t <= epsilon/||v||``.
    """
    vnorm = float(np.linalg.norm(v))
    if vnorm <= 0.0:
        raise ValueError("direction must be nonzero")
    oracle = problem.objectives[index]
    gap = LineSearchGap(problem, index, x, v, c, value_at_x)
    threshold = -c * vnorm * vnorm

    a = 0.0
    b = epsilon / vnorm
    gap_b = gap(b)
    t = 0.5 * (a + b)
    xi = None
    for _ in range(max_bisection_iterations):
        xi = oracle.subgrad(x + t * v)
        if float(v @ xi) > threshold:
            return xi, t
        gap_t = gap(t)
        if gap_b > gap_t:
            a = t
        else:
            b = t
            gap_b = gap_t
        t = 0.5 * (a + b)

    # Finite termination is guaranteed in theory; on a floating-point plateau
    # accept the last probe if it meets the target within a tiny slack.
    if xi is not None and float(v @ xi) > threshold - STALL_SLACK:
        return xi, t
    raise BisectionStallError(
        f"bisection for objective {index} stalled after "
        f"{max_bisection_iterations} iterations",
        xi=xi if xi is not None else np.zeros_like(x),
        t=t,
    )


def compute_descent_direction(
    problem: Problem,
    x,
    config: SolverConfig,
    *,
    value_at_x: np.ndarray | None = None,
) -> DirectionOutcome:
    """Run the bundle-enrichment loop at ``x``.

    Seeds the bundle with one subgradient per objective evaluated at ``x``
    itself (the plain subdifferential is contained in the epsilon one), then
    enriches until the min-norm direction is either short enough to certify
    criticality or passes the sufficient-decrease test for all objectives.
    """
    x = as_vector(x, problem.dimension)
    eps = config.epsilon
    c = config.armijo_c

    members = [problem.objectives[i].subgrad(x) for i in range(problem.k)]
    distances = [0.0] * problem.k
    fx = problem.evaluate(x) if value_at_x is None else np.asarray(value_at_x, dtype=float)

    trace: list[PassRecord] = []
    for _ in range(config.max_direction_iterations):
        solution = min_norm_point(np.array(members), config.qp_tolerance)
        v = solution.v
        vnorm = float(np.linalg.norm(v))
        if vnorm <= config.delta:
            trace.append(PassRecord(norm=vnorm, violating=()))
            return DirectionOutcome(
                status=CRITICAL,
                v=v,
                bundle=Bundle(np.array(members)),
                iterations=len(trace),
                trace=trace,
                member_distances=distances,
            )

        trial = x + (eps / vnorm) * v
        required = fx - c * eps * vnorm
        violating = tuple(
            i for i in range(problem.k)
            if problem.objectives[i].value(trial) > required[i]
        )
        trace.append(PassRecord(norm=vnorm, violating=violating))
        if not violating:
            return DirectionOutcome(
                status=ACCEPTABLE,
                v=v,
                bundle=Bundle(np.array(members)),
                iterations=len(trace),
                trace=trace,
                member_distances=distances,
            )

        if config.single_index_enrichment:
            violating = violating[:1]
        for i in violating:
            xi, t = find_new_subgradient(
                problem, i, x, v, eps, c,
                config.max_bisection_iterations,
                value_at_x=float(fx[i]),
            )
            members.append(xi)
            distances.append(t * vnorm)

    raise DirectionNonterminationError(
        f"direction search did not terminate within "
        f"{config.max_direction_iterations} passes (likely an oracle or tolerance bug)",
        trace=trace,
    )
