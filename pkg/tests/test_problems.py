import numpy as np
import pytest

from nsmop.problems import (
    catalog,
    crescent_mifflin2,
    demo_problems,
    find_problem,
    quad_abs,
    steep_valley,
)
from nsmop.validation import finite_difference_gradient


class TestQuadAbs:
    def test_values_at_origin(self):
        f = quad_abs().evaluate(np.zeros(2))
        np.testing.assert_allclose(f, [2.0, 0.0])

    def test_smooth_gradient(self):
        g = quad_abs().objectives[0].subgrad(np.array([1.5, 0.0]))
        np.testing.assert_allclose(g, [1.0, -2.0])

    def test_kink_midpoint_selection(self):
        # on the kink line the oracle returns the midpoint of {2 x1} x [-1, 1]
        g = quad_abs().objectives[1].subgrad(np.array([1.5, 0.0]))
        np.testing.assert_allclose(g, [3.0, 0.0])

    def test_off_kink_sign(self):
        g = quad_abs().objectives[1].subgrad(np.array([0.5, -0.3]))
        np.testing.assert_allclose(g, [1.0, -1.0])


class TestSteepValley:
    def test_region_gradients(self):
        p = steep_valley(10.0, 0.5)
        np.testing.assert_allclose(
            p.objectives[1].subgrad(np.array([1e-4, 1e-4])), [10.0, -0.5]
        )
        np.testing.assert_allclose(
            p.objectives[1].subgrad(np.array([0.038e-3, 0.596e-3])), [-10.0, 1.5]
        )

    def test_origin_is_global_minimum_of_valley(self, rng):
        p = steep_valley(10.0, 0.5)
        assert p.objectives[1].value(np.zeros(2)) == 0.0
        for _ in range(200):
            x = rng.uniform(-2, 2, size=2)
            assert p.objectives[1].value(x) >= 0.0

    def test_valley_kink_selection_is_hull_midpoint(self):
        a, b = 10.0, 0.5
        p = steep_valley(a, b)
        x = np.array([0.2, a * 0.2])  # on the valley graph, x1 > 0
        g = p.objectives[1].subgrad(x)
        limits = np.array([[a, b - 1.0], [-a, b + 1.0]])
        np.testing.assert_allclose(g, limits.mean(axis=0))

    def test_rejects_zero_parameters(self):
        with pytest.raises(ValueError):
            steep_valley(0.0, 0.5)


class TestCrescentMifflin2:
    def test_value_at_origin(self):
        np.testing.assert_allclose(crescent_mifflin2().evaluate(np.zeros(2)), [0.0, -0.25])

    def test_max_structure_reevaluated(self, rng):
        p = crescent_mifflin2()
        for _ in range(300):
            x = rng.uniform(-2, 2, size=2)
            b1 = x[0] ** 2 + (x[1] - 1.0) ** 2 + x[1] - 1.0
            b2 = -x[0] ** 2 - (x[1] - 1.0) ** 2 + x[1] + 1.0
            assert p.objectives[0].value(x) == pytest.approx(max(b1, b2))

    def test_tie_selects_first_branch(self):
        p = crescent_mifflin2()
        x = np.array([1.0, 1.0])  # on the shifted circle, both branches tie
        g = p.objectives[0].subgrad(x)
        np.testing.assert_allclose(g, [2.0, 1.0])

    def test_mifflin2_kink_midpoint(self):
        p = crescent_mifflin2()
        x = np.array([0.6, 0.8])  # on the unit circle
        g = p.objectives[1].subgrad(x)
        np.testing.assert_allclose(g, [-1.0 + 4.0 * 0.6, 4.0 * 0.8])
        limits = np.array(
            [[-1.0 + 7.5 * 0.6, 7.5 * 0.8], [-1.0 + 0.5 * 0.6, 0.5 * 0.8]]
        )
        np.testing.assert_allclose(g, limits.mean(axis=0))

    def test_kink_margins_vanish_on_circles(self):
        entry16 = catalog()[15]
        crescent, mifflin2 = entry16.components
        assert crescent.smooth_margin(np.array([0.0, 0.0])) == pytest.approx(0.0)
        assert mifflin2.smooth_margin(np.array([1.0, 0.0])) == pytest.approx(0.0)

    def test_benchmark_box(self):
        p = crescent_mifflin2()
        lower, upper = p.benchmark_box
        np.testing.assert_allclose(lower, [-0.5, -0.5])
        np.testing.assert_allclose(upper, [1.5, 1.5])


class TestCatalog:
    def test_eighteen_entries(self):
        entries = catalog()
        assert [e.number for e in entries] == list(range(1, 19))

    def test_pairings_and_boxes(self):
        entries = {e.number: e for e in catalog()}
        assert entries[16].name == "crescent-mifflin2"
        lower, upper = entries[13].box
        np.testing.assert_allclose(lower, [0.5, -0.5])
        np.testing.assert_allclose(upper, [1.5, 1.0])
        assert entries[18].name == "mifflin2-spiral"

    def test_entry_16_matches_demo_problem(self, rng):
        entry = catalog()[15]
        p_entry = entry.make_problem()
        p_demo = crescent_mifflin2()
        for _ in range(50):
            x = rng.uniform(-0.5, 1.5, size=2)
            np.testing.assert_allclose(p_entry.evaluate(x), p_demo.evaluate(x))

    def test_grid_is_inclusive_lattice(self):
        entry = catalog()[0]  # box [-3, 3]^2
        grid = entry.grid(10)
        assert grid.shape == (100, 2)
        corners = {(-3.0, -3.0), (-3.0, 3.0), (3.0, -3.0), (3.0, 3.0)}
        assert corners <= {tuple(row) for row in grid}
        # row-major: the second coordinate varies fastest
        np.testing.assert_allclose(grid[0], [-3.0, -3.0])
        np.testing.assert_allclose(grid[1][0], -3.0)
        assert grid[1][1] > grid[0][1]

    def test_fresh_problem_per_call(self):
        entry = catalog()[0]
        p1 = entry.make_problem()
        p1.evaluate(np.zeros(2))
        p2 = entry.make_problem()
        assert p2.objectives[0].value_count == 0

    def test_sources_documented(self):
        for entry in catalog():
            assert all(src for src in entry.sources)


class TestOracleValidity:
    """Hand-derived subgradients agree with finite differences off the kinks."""

    STEP = 1e-6
    MARGIN = 1e-2

    def _sample_points(self, component, box, rng, count):
        lower, upper = box
        points = []
        tries = 0
        while len(points) < count and tries < 100 * count:
            tries += 1
            x = lower + (upper - lower) * rng.random(2)
            if component.smooth_margin(x) > self.MARGIN:
                points.append(x)
        assert len(points) == count, f"could not sample {component.name}"
        return points

    @pytest.mark.parametrize("entry_number", range(1, 19))
    def test_finite_difference_match(self, entry_number, rng):
        entry = catalog()[entry_number - 1]
        problem = entry.make_problem()
        for idx, component in enumerate(entry.components):
            oracle = problem.objectives[idx]
            for x in self._sample_points(component, entry.box, rng, 60):
                fd = finite_difference_gradient(oracle, x, self.STEP)
                np.testing.assert_allclose(
                    oracle.subgrad(x), fd, atol=1e-4,
                    err_msg=f"{component.name} at {x}",
                )

    def test_demo_oracles_match(self, rng):
        box = (np.array([-2.0, -2.0]), np.array([2.0, 2.0]))
        for maker in (quad_abs, lambda: steep_valley(10.0, 0.5)):
            problem = maker()
            for idx, oracle in enumerate(problem.objectives):
                margin_points = 0
                while margin_points < 60:
                    x = box[0] + (box[1] - box[0]) * rng.random(2)
                    fd_safe = (
                        abs(x[1]) > self.MARGIN
                        and abs(x[0]) > self.MARGIN
                        and abs(x[1] - 10.0 * abs(x[0])) > self.MARGIN
                    )
                    if not fd_safe:
                        continue
                    margin_points += 1
                    fd = finite_difference_gradient(oracle, x, self.STEP)
                    np.testing.assert_allclose(oracle.subgrad(x), fd, atol=1e-4)


class TestSelectors:
    def test_demo_names(self):
        assert set(demo_problems()) == {"quad-abs", "steep-valley", "crescent-mifflin2"}

    def test_find_by_number_and_name(self):
        assert find_problem("16").name == "crescent-mifflin2"
        assert find_problem("cb3-dem").name == "cb3-dem"
        assert find_problem("quad-abs").k == 2

    def test_unknown_selector(self):
        with pytest.raises(KeyError):
            find_problem("nope")
