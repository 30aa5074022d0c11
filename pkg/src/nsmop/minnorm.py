"""Minimum-norm point over the convex hull of a finite vector bundle.

This is the computational kernel of the direction search: given subgradients
``W = {xi_1, ..., xi_m}``, find ``v = argmin_{v in -conv(W)} ||v||^2``.  The
solver is a classical active-set method over the coefficient simplex (Wolfe's
minimum-norm-point scheme): it alternates between adding the most violating
bundle member and projecting onto the affine hull of the active members.
Bundle sizes here are small (tens), so no large-scale machinery is needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NonFiniteError

DEFAULT_QP_TOLERANCE = 1e-12


class MinNormConvergenceError(RuntimeError):
    """The active-set loop failed to reach the requested tolerance.

    Carries the best iterate found so far in ``best``.
    """

    def __init__(self, message: str, best: "MinNormSolution"):
        super().__init__(message)
        self.best = best


@dataclass
class Bundle:
    """An ordered collection of m vectors of equal dimension.

    Duplicates are permitted; the convex hull is unchanged by them.
    """

    members: np.ndarray  # (m, n)

    def __init__(self, members):
        arr = np.atleast_2d(np.asarray(members, dtype=float))
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("a bundle needs at least one member vector")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("bundle members must be finite")
        self.members = arr

    def __len__(self) -> int:
        return self.members.shape[0]

    @property
    def dimension(self) -> int:
        return self.members.shape[1]


@dataclass
class MinNormSolution:
    """Solution of the min-norm problem over ``-conv(W)``.

    ``coefficients`` are convex weights with ``-v = sum_i lam_i xi_i`` up to
    the solver tolerance.  ``norm_sq`` equals ``||v||^2`` of the returned
    direction (exactly zero when the hull contains the origin and the
    residual fell below tolerance).
    """

    v: np.ndarray
    coefficients: np.ndarray
    norm_sq: float


def _affine_minimizer(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Min-norm point of the affine hull of ``points`` with its weights.

    Solves the bordered KKT system with least squares so that affinely
    dependent (or duplicated) active sets stay solvable.
    """
    r = points.shape[0]
    if r == 1:
        return points[0].copy(), np.ones(1)
    gram = points @ points.T
    system = np.zeros((r + 1, r + 1))
    system[:r, :r] = 2.0 * gram
    system[:r, r] = 1.0
    system[r, :r] = 1.0
    rhs = np.zeros(r + 1)
    rhs[r] = 1.0
    sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    alpha = sol[:r]
    total = alpha.sum()
    if abs(total) > 1e-300:
        alpha = alpha / total
    return alpha @ points, alpha


def min_norm_point(W, qp_tolerance: float = DEFAULT_QP_TOLERANCE) -> MinNormSolution:
    """Minimum-norm point of ``-conv(W)`` with supporting convex coefficients.

    ``W`` may be a :class:`Bundle` or any (m, n) array-like of finite vectors.
    The result satisfies the half-space property
    ``<v, xi> <= -||v||^2 + tol`` for every member ``xi`` and is deterministic
    for fixed input.  When the computed point has norm at most
    ``qp_tolerance`` it is snapped to exactly zero.
    """
    bundle = W if isinstance(W, Bundle) else Bundle(W)
    if qp_tolerance <= 0:
        raise ValueError("qp_tolerance must be positive")
    P = bundle.members
    m = P.shape[0]

    member_norms_sq = np.einsum("ij,ij->i", P, P)
    scale_sq = max(1.0, float(member_norms_sq.max()))
    tol = qp_tolerance * scale_sq

    active = [int(np.argmin(member_norms_sq))]
    lam = np.ones(1)
    x = P[active[0]].copy()

    max_cycles = 200 * m + 1000
    converged = False
    prev_xx = np.inf
    snap_sq = qp_tolerance * qp_tolerance
    for _ in range(max_cycles):
        dots = P @ x
        xx = float(x @ x)
        j = int(np.argmin(dots))
        # either optimal within tolerance, or close enough to the origin to
        # snap to the exact zero solution
        if dots[j] >= xx - tol or xx <= snap_sq:
            converged = True
            break
        if j in active or xx >= prev_xx:
            # numerical stall: no strict progress is possible at this precision
            break
        prev_xx = xx
        active.append(j)
        lam = np.append(lam, 0.0)

        while True:
            pts = P[active]
            y, alpha = _affine_minimizer(pts)
            if np.all(alpha >= -1e-14):
                x = y
                lam = np.clip(alpha, 0.0, None)
                break
            # step from lam toward alpha until the first coefficient vanishes
            mask = alpha < -1e-14
            ratios = lam[mask] / (lam[mask] - alpha[mask])
            theta = min(1.0, float(ratios.min()))
            lam = lam + theta * (alpha - lam)
            lam[lam < 1e-14] = 0.0
            if np.all(lam > 0):  # force progress despite rounding
                drop = int(np.argmin(lam - alpha))
                lam[drop] = 0.0
            keep = lam > 0
            active = [idx for idx, k in zip(active, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ P[active]

    coeffs = np.zeros(m)
    coeffs[active] = lam
    residual = float((x @ x) - float(np.min(P @ x)))
    solution = _finalize(x, coeffs, qp_tolerance)
    if not converged and residual > tol:
        raise MinNormConvergenceError(
            f"min-norm solver stalled with optimality residual {residual:.3e} > {tol:.3e}",
            best=solution,
        )
    return solution


def _finalize(x: np.ndarray, coeffs: np.ndarray, qp_tolerance: float) -> MinNormSolution:
    norm = float(np.linalg.norm(x))
    if norm <= qp_tolerance:
        v = np.zeros_like(x)
        return MinNormSolution(v=v, coefficients=coeffs, norm_sq=0.0)
    v = -x
    return MinNormSolution(v=v, coefficients=coeffs, norm_sq=float(v @ v))
