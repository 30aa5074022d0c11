import numpy as np
import pytest

from nsmop import (
    Box,
    BoxCollection,
    EmptyCoverError,
    SolverConfig,
    descent_map_g,
    pareto_cover,
    select,
    solve,
    subdivide,
)
from conftest import make_single_quadratic


def square_root_box(lo=-3.1, hi=3.0):
    lower = np.array([lo, lo])
    upper = np.array([hi, hi])
    return Box(center=(lower + upper) / 2.0, radii=(upper - lower) / 2.0, depth=0)


class TestBox:
    def test_rejects_nonpositive_radii(self):
        with pytest.raises(ValueError):
            Box(center=np.zeros(2), radii=np.array([1.0, 0.0]))

    def test_closed_containment_on_faces(self):
        box = Box(center=np.zeros(2), radii=np.ones(2))
        assert box.contains(np.array([[1.0, 0.0], [1.0, 1.0], [1.0001, 0.0]])).tolist() == [
            True, True, False,
        ]

    def test_sample_lattice_shapes(self):
        box = Box(center=np.zeros(2), radii=np.ones(2))
        assert box.sample_lattice(1).shape == (1, 2)
        lattice = box.sample_lattice(3)
        assert lattice.shape == (9, 2)
        assert {tuple(p) for p in lattice} >= {(-1.0, -1.0), (1.0, 1.0), (0.0, 0.0)}


class TestSubdivide:
    def test_four_children_in_the_plane(self):
        coll = BoxCollection(boxes=[square_root_box()], root=square_root_box())
        children = subdivide(coll)
        assert len(children) == 4
        assert all(b.depth == 1 for b in children.boxes)
        np.testing.assert_allclose(children.boxes[0].radii, [1.525, 1.525])

    def test_child_volumes_sum_to_parent(self):
        root = square_root_box()
        children = subdivide(BoxCollection([root], root)).boxes
        parent_vol = np.prod(2 * root.radii)
        child_vol = sum(np.prod(2 * b.radii) for b in children)
        assert child_vol == pytest.approx(parent_vol)

    def test_radii_halve_per_iteration(self):
        root = square_root_box()
        coll = BoxCollection([root], root)
        for depth in range(1, 4):
            coll = subdivide(coll)
            np.testing.assert_allclose(coll.boxes[0].radii, root.radii / 2**depth)


class TestSelect:
    def test_identity_map_keeps_all_boxes(self):
        root = square_root_box()
        coll = subdivide(subdivide(BoxCollection([root], root)))
        kept = select(coll, lambda x: x, samples_per_axis=2)
        assert len(kept) == len(coll)

    def test_constant_map_keeps_one_box(self):
        root = square_root_box()
        target = root.center + np.array([0.33, 0.21]) * root.radii
        coll = subdivide(subdivide(BoxCollection([root], root)))
        kept = select(coll, lambda x: target.copy(), samples_per_axis=2)
        assert len(kept) == 1
        assert kept.boxes[0].contains(target[None, :]).all()

    def test_escaping_images_warn(self):
        root = square_root_box()
        coll = subdivide(BoxCollection([root], root))
        far = root.center + 100.0 * root.radii
        with pytest.warns(UserWarning, match="left the root box"):
            kept = select(coll, lambda x: far.copy(), samples_per_axis=2)
        assert len(kept) == 0


class TestDescentMap:
    def test_single_iteration_matches_solve(self):
        cfg = SolverConfig()
        p = make_single_quadratic()
        g = descent_map_g(p, cfg, m=1)
        x = np.array([1.7, -0.9])
        expected = solve(
            make_single_quadratic(), x,
            SolverConfig(max_outer_iterations=1),
        ).final
        np.testing.assert_array_equal(g(x), expected)

    def test_critical_point_is_fixed(self):
        p = make_single_quadratic()
        g = descent_map_g(p, SolverConfig(), m=5)
        np.testing.assert_array_equal(g(np.zeros(2)), np.zeros(2))

    def test_requires_positive_m(self):
        with pytest.raises(ValueError):
            descent_map_g(make_single_quadratic(), SolverConfig(), m=0)


class TestParetoCover:
    def test_zero_iterations_returns_root(self):
        p = make_single_quadratic()
        root = square_root_box()
        cover = pareto_cover(p, SolverConfig(), root, iterations=0)
        assert len(cover.collection) == 1
        assert cover.image_points.shape == (0, 2)

    def test_cover_shrinks_to_minimizer(self):
        # k = 1 strictly convex quadratic: the cover contracts to the unique
        # minimum; pick the minimizer off the dyadic faces
        target = np.array([0.3, -0.43])
        from nsmop import ObjectiveOracle, Problem

        p = Problem("shifted", [
            ObjectiveOracle(lambda x: float((x - target) @ (x - target)),
                            lambda x: 2.0 * (x - target), "q"),
        ], dimension=2)
        root = Box(center=np.zeros(2), radii=np.array([2.0, 2.0]), depth=0)
        iterations = 4
        cover = pareto_cover(p, SolverConfig(), root, iterations=iterations,
                             m=12, samples_per_axis=3)
        assert len(cover.collection) >= 1
        union_lo = np.min([b.center - b.radii for b in cover.collection.boxes], axis=0)
        union_hi = np.max([b.center + b.radii for b in cover.collection.boxes], axis=0)
        assert np.all(union_lo <= target) and np.all(target <= union_hi)
        assert np.all(union_hi - union_lo <= 2 * root.radii * 2.0**-iterations + 1e-12)

    def test_emitted_cloud_is_covered_and_consistent(self):
        p = make_single_quadratic()
        root = Box(center=np.zeros(2), radii=np.array([2.0, 2.0]), depth=0)
        cover = pareto_cover(p, SolverConfig(), root, iterations=3,
                             m=8, samples_per_axis=3)
        assert cover.image_points.shape[0] > 0
        assert cover.image_values.shape == (cover.image_points.shape[0], 1)
        covered = np.zeros(cover.image_points.shape[0], dtype=bool)
        for box in cover.collection.boxes:
            covered |= box.contains(cover.image_points)
        assert covered.all()
        assert cover.dropped_points >= 0

    def test_empty_cover_raises(self):
        from nsmop import ObjectiveOracle, Problem

        # the objective decreases away from the root box, so every image
        # escapes and selection empties the collection
        p = Problem("runaway", [
            ObjectiveOracle(lambda x: float(x[0]), lambda x: np.array([1.0, 0.0]), "r"),
            ObjectiveOracle(lambda x: float(x[0]) + 0.1 * float(x[1] ** 2),
                            lambda x: np.array([1.0, 0.2 * x[1]]), "r2"),
        ], dimension=2)
        root = Box(center=np.zeros(2), radii=np.array([0.1, 0.1]), depth=0)
        cfg = SolverConfig(max_outer_iterations=50)
        with pytest.raises(EmptyCoverError), pytest.warns(UserWarning):
            pareto_cover(p, cfg, root, iterations=2, m=30, samples_per_axis=2)

    def test_front_flags_are_mutually_nondominated(self):
        from nsmop import dominates
        from nsmop.problems import crescent_mifflin2

        root = Box(center=np.array([-0.05, -0.05]), radii=np.array([3.05, 3.05]))
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cover = pareto_cover(crescent_mifflin2(), SolverConfig(), root,
                                 iterations=4, m=8, samples_per_axis=3)
        front = cover.image_values[cover.nondominated]
        assert front.shape[0] > 0
        for i in range(min(40, front.shape[0])):
            for j in range(front.shape[0]):
                assert not dominates(front[j], front[i])
