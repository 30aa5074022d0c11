"""Independent references used to validate the solver modules.

Nothing here participates in the solution path: the simplex lattice search is
a brute-force counterpoint to the active-set min-norm solver, the convex-body
bracketing yields two-sided bounds on exact hull geometry in the plane, and
the finite-difference helper checks hand-derived oracles on smooth regions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import ObjectiveOracle, as_vector
from .minnorm import min_norm_point


@dataclass(frozen=True)
class ConvexBody:
    """A planar polytope (by vertices) or disk (by center and radius)."""

    kind: str  # "polytope" or "disk"
    vertices: np.ndarray | None = None
    center: np.ndarray | None = None
    radius: float = 0.0

    @staticmethod
    def polytope(vertices) -> "ConvexBody":
        arr = np.atleast_2d(np.asarray(vertices, dtype=float))
        if arr.shape[0] < 1 or arr.shape[1] != 2:
            raise ValueError("polytope needs at least one planar vertex")
        return ConvexBody(kind="polytope", vertices=arr)

    @staticmethod
    def disk(center, radius: float) -> "ConvexBody":
        if radius <= 0:
            raise ValueError("disk radius must be positive")
        return ConvexBody(kind="disk", center=as_vector(center, 2), radius=float(radius))


@dataclass(frozen=True)
class MinNormBracket:
    """Two-sided enclosure of the min-norm value over a convex hull."""

    lower: float
    upper: float
    facets: int

    @property
    def value(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _disk_vertices(center: np.ndarray, radius: float, facets: int) -> tuple[np.ndarray, np.ndarray]:
    angles = 2.0 * np.pi * np.arange(facets) / facets
    ring = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    inscribed = center + radius * ring
    circumscribed = center + (radius / math.cos(math.pi / facets)) * ring
    return inscribed, circumscribed


def exact_min_norm_over_hull(
    bodies: list[ConvexBody],
    disk_facets: int = 512,
    tolerance: float = 1e-3,
    max_facets: int = 1 << 14,
) -> MinNormBracket:
    """Bracket the min-norm value over ``conv(union of bodies)`` in the plane.

    Disks are replaced by inscribed and circumscribed regular polygons; the
    min-norm over the inscribed vertex set overestimates the true value and
    the circumscribed one underestimates it.  Facet counts double until the
    bracket is narrower than ``tolerance``.
    """
    if disk_facets < 64:
        raise ValueError("disk_facets must be at least 64")
    facets = disk_facets
    while True:
        inner_vertices = []
        outer_vertices = []
        for body in bodies:
            if body.kind == "polytope":
                inner_vertices.append(body.vertices)
                outer_vertices.append(body.vertices)
            else:
                ins, circ = _disk_vertices(body.center, body.radius, facets)
                inner_vertices.append(ins)
                outer_vertices.append(circ)
        upper = math.sqrt(min_norm_point(np.vstack(inner_vertices)).norm_sq)
        lower = math.sqrt(min_norm_point(np.vstack(outer_vertices)).norm_sq)
        bracket = MinNormBracket(lower=lower, upper=upper, facets=facets)
        if bracket.width <= tolerance:
            return bracket
        if facets >= max_facets:
            raise RuntimeError(
                f"bracket width {bracket.width:.3e} still above {tolerance:.3e} "
                f"at {facets} facets"
            )
        facets *= 2


def quad_abs_subdifferential_bodies(x, epsilon: float) -> list[ConvexBody]:
    """Exact epsilon-subdifferential geometry of the quad-abs pair at ``x``.

    The shifted quadratic contributes the disk ``2 B_eps(x) - (2, 2)`` and,
    on the kink line ``x2 = 0``, the absolute-value objective contributes the
    rectangle ``[2 x1 - 2 eps, 2 x1 + 2 eps] x [-1, 1]``.  With ``eps = 0``
    the disk degenerates to a point and the rectangle to a segment, both
    returned as polytopes.  This is the only place the library represents a
    full subdifferential; it exists for validation.
    """
    x = as_vector(x, 2)
    if abs(x[1]) > 1e-15:
        raise ValueError("the exact geometry is tabulated on the kink line x2 = 0")
    quad_center = 2.0 * x - np.array([2.0, 2.0])
    lo, hi = 2.0 * x[0] - 2.0 * epsilon, 2.0 * x[0] + 2.0 * epsilon
    if epsilon > 0:
        first = ConvexBody.disk(quad_center, 2.0 * epsilon)
        second = ConvexBody.polytope([[lo, -1.0], [hi, -1.0], [hi, 1.0], [lo, 1.0]])
    else:
        first = ConvexBody.polytope([quad_center])
        second = ConvexBody.polytope([[lo, -1.0], [lo, 1.0]])
    return [first, second]


# ---------------------------------------------------------------------------
# brute-force min-norm over the coefficient simplex

def _full_lattice(m: int, units: int) -> np.ndarray:
    """All integer compositions of ``units`` into m parts, as an array."""
    if m == 1:
        return np.array([[units]])
    if m == 2:
        i = np.arange(units + 1)
        return np.stack([i, units - i], axis=1)
    if m == 3:
        i, j = np.meshgrid(np.arange(units + 1), np.arange(units + 1), indexing="ij")
        keep = (i + j) <= units
        i, j = i[keep], j[keep]
        return np.stack([i, j, units - i - j], axis=1)
    combos = []
    for head in itertools.product(range(units + 1), repeat=m - 1):
        rest = units - sum(head)
        if rest >= 0:
            combos.append(head + (rest,))
    return np.array(combos)


def _window_lattice(m: int, units: int, center_units: np.ndarray, halfwidth: int) -> np.ndarray:
    """Lattice points of the composition simplex near ``center_units``."""
    ranges = []
    for ci in center_units[:-1]:
        lo = max(0, int(ci) - halfwidth)
        hi = min(units, int(ci) + halfwidth)
        ranges.append(np.arange(lo, hi + 1))
    grids = np.meshgrid(*ranges, indexing="ij")
    head = np.stack([g.ravel() for g in grids], axis=1)
    rest = units - head.sum(axis=1)
    keep = (rest >= 0) & (rest <= units)
    return np.concatenate([head[keep], rest[keep, None]], axis=1)


def _lattice_best(P: np.ndarray, lattice: np.ndarray, units: int) -> tuple[float, np.ndarray]:
    coeffs = lattice / float(units)
    pts = coeffs @ P
    norms = np.einsum("ij,ij->i", pts, pts)
    best = int(np.argmin(norms))
    return float(math.sqrt(norms[best])), lattice[best]

#: full enumeration is used whenever the composition count stays below this
_FULL_ENUM_LIMIT = 2_000_000


def simplex_grid_min_norm(W, pitch: float) -> float:
    """Brute-force min of ``||sum_i lam_i xi_i||`` over the coefficient simplex.

    For small bundles the lattice of coefficient vectors with the requested
    pitch is enumerated exhaustively.  When full enumeration is not feasible
    (the composition count explodes with the bundle size) the search starts
    on a coarse full lattice and refines a window around the incumbent until
    the requested pitch is reached, re-centering whenever the incumbent sits
    on the window boundary.  Every candidate is a lattice point, so the
    result never undershoots the true minimum.
    """
    P = np.atleast_2d(np.asarray(W.members if hasattr(W, "members") else W, dtype=float))
    m = P.shape[0]
    if m > 5:
        raise ValueError("brute-force reference is limited to bundles of size 5")
    if pitch <= 0 or pitch > 1e-2:
        raise ValueError("pitch must lie in (0, 1e-2]")
    if m == 1:
        return float(np.linalg.norm(P[0]))

    units = max(1, round(1.0 / pitch))
    n_full = math.comb(units + m - 1, m - 1)
    if n_full <= _FULL_ENUM_LIMIT:
        best, _ = _lattice_best(P, _full_lattice(m, units), units)
        return best

    # coarse-to-fine: refine by factor 4 with a +-8-step window per level
    coarse = 24
    best, best_units = _lattice_best(P, _full_lattice(m, coarse), coarse)
    level_units = coarse
    while level_units < units:
        next_units = min(units, level_units * 4)
        scale = next_units / level_units
        center = np.round(best_units * scale).astype(int)
        halfwidth = int(math.ceil(2 * scale))
        for _ in range(30):  # re-center until the incumbent is interior
            lattice = _window_lattice(m, next_units, center, halfwidth)
            best, best_units = _lattice_best(P, lattice, next_units)
            on_boundary = np.any(
                (np.abs(best_units[:-1] - center[:-1]) >= halfwidth)
                & (best_units[:-1] > 0)
                & (best_units[:-1] < next_units)
            )
            if not on_boundary:
                break
            center = best_units
        level_units = next_units
    return best


def finite_difference_gradient(oracle: ObjectiveOracle, x, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient estimate from oracle values.

    Only meaningful when ``x`` is well inside a smooth region (stay at least
    ten steps away from any nonsmooth set).
    """
    x = as_vector(x)
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        offset = np.zeros_like(x)
        offset[i] = step
        grad[i] = (oracle.value(x + offset) - oracle.value(x - offset)) / (2.0 * step)
    return grad
