"""Pareto-set covering by box subdivision against the descent dynamical system.

Several iterations of the descent method, applied at once, define a map ``g``
whose fixed points contain the Pareto set.  Starting from one large box, the
algorithm alternates dyadic subdivision with a selection step that keeps only
boxes hit by the image of a sample lattice under ``g``.  Running more than
one descent iteration inside ``g`` pushes the discontinuity of the descent
direction away from the Pareto set, which is what makes the selection step
reliable for nonsmooth objectives.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .core import Problem, SolverConfig, as_vector, nondominated_mask
from .descent import solve

#: slack for closed-box containment so shared faces keep all incident boxes
FACE_SLACK = 1e-12


class EmptyCoverError(RuntimeError):
    """Selection removed every box (root excludes the attractor or m too small)."""


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by center and componentwise half-widths."""

    center: np.ndarray
    radii: np.ndarray
    depth: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        object.__setattr__(self, "radii", as_vector(self.radii))
        if self.center.shape != self.radii.shape:
            raise ValueError("center and radii must have equal length")
        if not np.all(self.radii > 0):
            raise ValueError("radii must be strictly positive")

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Closed containment test for an (M, n) array of points."""
        pts = np.atleast_2d(points)
        slack = FACE_SLACK * np.maximum(1.0, self.radii)
        return np.all(np.abs(pts - self.center) <= self.radii + slack, axis=1)

    def children(self) -> list["Box"]:
        """The 2^n dyadic children."""
        half = self.radii / 2.0
        out = []
        for signs in itertools.product((-1.0, 1.0), repeat=len(self.center)):
            out.append(Box(self.center + np.array(signs) * half, half, self.depth + 1))
        return out

    def sample_lattice(self, points_per_axis: int) -> np.ndarray:
        """Inclusive uniform lattice of sample points inside the box."""
        if points_per_axis < 1:
            raise ValueError("points_per_axis must be at least 1")
        if points_per_axis == 1:
            return self.center[None, :].copy()
        axes = [
            np.linspace(c - r, c + r, points_per_axis)
            for c, r in zip(self.center, self.radii)
        ]
        return np.array(list(itertools.product(*axes)))


@dataclass
class BoxCollection:
    """Equal-depth boxes forming the current cover, plus the root box."""

    boxes: list[Box]
    root: Box

    def __len__(self) -> int:
        return len(self.boxes)

    @property
    def depth(self) -> int:
        return self.boxes[0].depth if self.boxes else 0


def descent_map_g(problem: Problem, config: SolverConfig, m: int):
    """The map applying at most ``m`` descent iterations from a point.

    Points that are already critical are fixed.  The returned callable is
    deterministic and safe to evaluate in any order.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    inner = replace(config, max_outer_iterations=m, epsilon_schedule=None)

    def g(x: np.ndarray) -> np.ndarray:
        run = solve(problem, x, inner, keep_history=False)
        return run.final

    return g


def subdivide(collection: BoxCollection) -> BoxCollection:
    """Replace every box by its 2^n dyadic children."""
    children: list[Box] = []
    for box in collection.boxes:
        children.extend(box.children())
    return BoxCollection(boxes=children, root=collection.root)


def _map_samples(collection: BoxCollection, g, samples_per_axis: int) -> np.ndarray:
    """Image under ``g`` of the joint sample lattice of all boxes."""
    if not collection.boxes:
        return np.empty((0, len(collection.root.center)))
    samples = np.vstack([box.sample_lattice(samples_per_axis) for box in collection.boxes])
    # neighbouring boxes share lattice points on their faces
    samples = np.unique(samples, axis=0)
    return np.array([g(p) for p in samples])


def _keep_hit_boxes(
    collection: BoxCollection, images: np.ndarray
) -> tuple[BoxCollection, np.ndarray]:
    """Selection plus the mask of image points inside the surviving union."""
    if images.shape[0] == 0:
        return BoxCollection(boxes=[], root=collection.root), np.zeros(0, dtype=bool)
    outside = ~collection.root.contains(images)
    if np.any(outside):
        warnings.warn(
            f"{int(outside.sum())} image point(s) left the root box and were ignored",
            stacklevel=3,
        )
    kept = []
    covered = np.zeros(images.shape[0], dtype=bool)
    for box in collection.boxes:
        hits = box.contains(images)
        if bool(np.any(hits)):
            kept.append(box)
            covered |= hits
    stray = int(np.sum(~covered & ~outside))
    if stray:
        # transient images can land in regions pruned at an earlier depth;
        # like root escapees they count toward no box
        warnings.warn(
            f"{stray} image point(s) fell outside the current box union and were ignored",
            stacklevel=3,
        )
    return BoxCollection(boxes=kept, root=collection.root), covered


def select(collection: BoxCollection, g, samples_per_axis: int) -> BoxCollection:
    """Keep exactly the boxes containing at least one mapped sample point.

    Containment is closed, so an image point on a shared face retains every
    incident box.  Image points outside the root box (or outside the current
    box union entirely) raise a warning and count toward no box.
    """
    images = _map_samples(collection, g, samples_per_axis)
    kept, _ = _keep_hit_boxes(collection, images)
    return kept


@dataclass
class ParetoCover:
    """Result of the subdivision run: surviving boxes plus the image cloud.

    The cloud holds the final selection's image points that lie inside the
    surviving cover, so the emitted front is always consistent with the
    emitted boxes; ``dropped_points`` counts images discarded for landing
    outside the cover (they are also warned about at run time).
    """

    collection: BoxCollection
    image_points: np.ndarray  # (M, n)
    image_values: np.ndarray  # (M, k)
    nondominated: np.ndarray  # (M,) bool
    dropped_points: int = 0


def pareto_cover(
    problem: Problem,
    config: SolverConfig,
    root: Box,
    iterations: int,
    m: int = 15,
    samples_per_axis: int = 5,
) -> ParetoCover:
    """Alternate subdivision and selection, then evaluate the final image cloud.

    The image points of the last selection step approximate the Pareto set;
    their objective values, with the mutually non-dominated subset flagged,
    approximate the Pareto front.
    """
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    collection = BoxCollection(boxes=[root], root=root)
    images = np.empty((0, problem.dimension))
    dropped = 0
    if iterations > 0:
        g = descent_map_g(problem, config, m)
        for _ in range(iterations):
            collection = subdivide(collection)
            images = _map_samples(collection, g, samples_per_axis)
            collection, covered = _keep_hit_boxes(collection, images)
            if not collection.boxes:
                raise EmptyCoverError(
                    "selection removed every box; enlarge the root box or "
                    "increase the inner iteration count"
                )
            dropped = int(np.sum(~covered))
            images = images[covered]
    values = (
        np.array([problem.evaluate(p) for p in images])
        if images.shape[0]
        else np.empty((0, problem.k))
    )
    mask = nondominated_mask(values) if values.shape[0] else np.zeros(0, dtype=bool)
    return ParetoCover(
        collection=collection,
        image_points=images,
        image_values=values,
        nondominated=mask,
        dropped_points=dropped,
    )
