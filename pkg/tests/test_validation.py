import math

import numpy as np
import pytest

from nsmop import ObjectiveOracle, min_norm_point
from nsmop.problems import crescent_mifflin2
from nsmop.validation import (
    ConvexBody,
    exact_min_norm_over_hull,
    finite_difference_gradient,
    quad_abs_subdifferential_bodies,
    simplex_grid_min_norm,
)


class TestSimplexGrid:
    def test_two_point_segment(self):
        ref = simplex_grid_min_norm(np.array([[1.0, 0.0], [0.0, 1.0]]), 1e-3)
        assert ref == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-3)

    def test_singleton(self):
        assert simplex_grid_min_norm(np.array([[2.0, 0.0]]), 1e-3) == 2.0

    def test_worked_bundle(self):
        ref = simplex_grid_min_norm(np.array([[-0.12, -2.04], [1.88, -1.0]]), 1e-3)
        assert ref == pytest.approx(math.sqrt(3.0784806), abs=2e-3)

    def test_never_undershoots_solver(self, rng):
        for _ in range(60):
            m = int(rng.integers(1, 6))
            W = rng.uniform(-1.5, 1.5, size=(m, 3))
            ref = simplex_grid_min_norm(W, 1e-2)
            sol = min_norm_point(W)
            assert ref >= math.sqrt(sol.norm_sq) - 1e-12

    def test_ladder_matches_solver_for_larger_bundles(self, rng):
        # bundle size 4 exceeds the full-enumeration budget at pitch 1e-3,
        # exercising the coarse-to-fine path
        for _ in range(50):
            W = rng.uniform(-1, 1, size=(4, 3))
            ref = simplex_grid_min_norm(W, 1e-3)
            sol = min_norm_point(W)
            assert abs(ref - math.sqrt(sol.norm_sq)) <= 1e-3

    def test_input_validation(self):
        with pytest.raises(ValueError):
            simplex_grid_min_norm(np.zeros((6, 2)), 1e-3)
        with pytest.raises(ValueError):
            simplex_grid_min_norm(np.zeros((2, 2)), 0.5)


class TestFiniteDifferences:
    def test_quadratic_gradient(self):
        oracle = ObjectiveOracle(lambda x: float(x @ x), lambda x: 2 * x, "sq")
        fd = finite_difference_gradient(oracle, np.array([1.0, 2.0]), 1e-6)
        np.testing.assert_allclose(fd, [2.0, 4.0], atol=1e-8)

    def test_constant_function(self):
        oracle = ObjectiveOracle(lambda x: 3.5, lambda x: np.zeros_like(x), "const")
        fd = finite_difference_gradient(oracle, np.array([0.3, -0.4]), 1e-6)
        np.testing.assert_allclose(fd, [0.0, 0.0], atol=1e-9)

    def test_matches_showcase_oracle(self):
        p = crescent_mifflin2()
        x = np.array([2.0, 2.0])
        fd = finite_difference_gradient(p.objectives[1], x, 1e-6)
        np.testing.assert_allclose(fd, p.objectives[1].subgrad(x), atol=1e-4)


class TestExactHullGeometry:
    def test_bodies_construction(self):
        with pytest.raises(ValueError):
            ConvexBody.disk([0.0, 0.0], 0.0)
        with pytest.raises(ValueError):
            ConvexBody.polytope(np.empty((0, 2)))
        with pytest.raises(ValueError):
            quad_abs_subdifferential_bodies([1.0, 0.5], 0.2)

    def test_degenerate_epsilon_gives_polytopes(self):
        bodies = quad_abs_subdifferential_bodies([1.5, 0.0], 0.0)
        assert all(b.kind == "polytope" for b in bodies)
        bracket = exact_min_norm_over_hull(bodies)
        assert bracket.width <= 1e-12
        assert bracket.value**2 == pytest.approx(637.0 / 169.0, abs=1e-9)

    def test_bracket_ordering_and_convergence(self):
        bodies = quad_abs_subdifferential_bodies([1.5, 0.0], 0.2)
        widths = []
        for facets in (64, 128, 256, 512):
            bracket = exact_min_norm_over_hull(bodies, disk_facets=facets,
                                               tolerance=1.0)
            assert bracket.lower <= bracket.upper
            widths.append(bracket.width)
        assert all(b <= a for a, b in zip(widths, widths[1:]))

    def test_hull_containing_origin(self):
        bodies = quad_abs_subdifferential_bodies([0.5, 0.0], 0.2)
        bracket = exact_min_norm_over_hull(bodies)
        assert bracket.value == pytest.approx(0.0, abs=1e-6)

    def test_refinement_reaches_tolerance(self):
        bodies = quad_abs_subdifferential_bodies([1.5, 0.0], 0.2)
        bracket = exact_min_norm_over_hull(bodies, disk_facets=64, tolerance=1e-4)
        assert bracket.width <= 1e-4
        assert bracket.facets > 64

    def test_rejects_too_few_facets(self):
        with pytest.raises(ValueError):
            exact_min_norm_over_hull([ConvexBody.polytope([[1.0, 1.0]])], disk_facets=8)
