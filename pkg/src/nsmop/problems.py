"""Executable catalog of nonsmooth test problems with hand-derived oracles.

Every objective here is differentiable by hand: the oracle returns the exact
gradient on the smooth pieces and a fixed, documented selection from the
Clarke subdifferential on the nonsmooth sets (first active branch for
max-structures, the zero sign for absolute values at their kink).  See
``docs/benchmark_functions.md`` for the formulas and literature sources of
the benchmark suite.

Each scalar objective also carries a ``smooth_margin`` function: zero on its
nonsmooth (or otherwise numerically unsafe) set and growing into the smooth
regions.  It is a sampling aid for finite-difference validation, not a
calibrated distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ObjectiveOracle, Problem


@dataclass(frozen=True)
class ScalarObjective:
    """One scalar test function with value, subgradient selection and margin."""

    name: str
    value: Callable
    subgrad: Callable
    smooth_margin: Callable
    source: str

    def oracle(self) -> ObjectiveOracle:
        return ObjectiveOracle(self.value, self.subgrad, self.name)


def _sign(t: float) -> float:
    # zero selection at the kink keeps the oracle deterministic
    if t > 0.0:
        return 1.0
    if t < 0.0:
        return -1.0
    return 0.0


def _max_gap(values) -> float:
    ordered = sorted(values, reverse=True)
    return ordered[0] - ordered[1]


# ---------------------------------------------------------------------------
# building blocks for max-of-smooth-branches functions

def _branch_max(branch_values, branch_grads, x):
    vals = [b(x) for b in branch_values]
    idx = int(np.argmax(vals))  # ties resolve to the first active branch
    return vals, idx, branch_grads[idx](x)


def _make_max_objective(name, branch_values, branch_grads, source, extra_margin=None):
    def value(x):
        return max(b(x) for b in branch_values)

    def subgrad(x):
        _, _, g = _branch_max(branch_values, branch_grads, x)
        return np.asarray(g, dtype=float)

    def margin(x):
        m = _max_gap([b(x) for b in branch_values])
        if extra_margin is not None:
            m = min(m, extra_margin(x))
        return m

    return ScalarObjective(name, value, subgrad, margin, source)


# ---------------------------------------------------------------------------
# convex benchmark functions

def _cb3() -> ScalarObjective:
    branches = [
        lambda x: x[0] ** 4 + x[1] ** 2,
        lambda x: (2.0 - x[0]) ** 2 + (2.0 - x[1]) ** 2,
        lambda x: 2.0 * math.exp(x[1] - x[0]),
    ]
    grads = [
        lambda x: (4.0 * x[0] ** 3, 2.0 * x[1]),
        lambda x: (2.0 * x[0] - 4.0, 2.0 * x[1] - 4.0),
        lambda x: (-2.0 * math.exp(x[1] - x[0]), 2.0 * math.exp(x[1] - x[0])),
    ]
    return _make_max_objective("cb3", branches, grads, "Charalambous & Bandler (1978), problem CB3")


def _dem() -> ScalarObjective:
    branches = [
        lambda x: 5.0 * x[0] + x[1],
        lambda x: -5.0 * x[0] + x[1],
        lambda x: x[0] ** 2 + x[1] ** 2 + 4.0 * x[1],
    ]
    grads = [
        lambda x: (5.0, 1.0),
        lambda x: (-5.0, 1.0),
        lambda x: (2.0 * x[0], 2.0 * x[1] + 4.0),
    ]
    return _make_max_objective("dem", branches, grads, "Demyanov & Malozemov (1974)")


def _ql() -> ScalarObjective:
    branches = [
        lambda x: x[0] ** 2 + x[1] ** 2,
        lambda x: x[0] ** 2 + x[1] ** 2 + 10.0 * (-4.0 * x[0] - x[1] + 4.0),
        lambda x: x[0] ** 2 + x[1] ** 2 + 10.0 * (-x[0] - 2.0 * x[1] + 6.0),
    ]
    grads = [
        lambda x: (2.0 * x[0], 2.0 * x[1]),
        lambda x: (2.0 * x[0] - 40.0, 2.0 * x[1] - 10.0),
        lambda x: (2.0 * x[0] - 10.0, 2.0 * x[1] - 20.0),
    ]
    return _make_max_objective("ql", branches, grads, "Lukšan & Vlček (2000), problem QL")


def _lq() -> ScalarObjective:
    branches = [
        lambda x: -x[0] - x[1],
        lambda x: -x[0] - x[1] + x[0] ** 2 + x[1] ** 2 - 1.0,
    ]
    grads = [
        lambda x: (-1.0, -1.0),
        lambda x: (2.0 * x[0] - 1.0, 2.0 * x[1] - 1.0),
    ]
    return _make_max_objective("lq", branches, grads, "Lukšan & Vlček (2000), problem LQ")


def _mifflin1() -> ScalarObjective:
    branches = [
        lambda x: -x[0] + 20.0 * (x[0] ** 2 + x[1] ** 2 - 1.0),
        lambda x: -x[0],
    ]
    grads = [
        lambda x: (-1.0 + 40.0 * x[0], 40.0 * x[1]),
        lambda x: (-1.0, 0.0),
    ]
    return _make_max_objective("mifflin1", branches, grads, "Mifflin (1977), function 1")


def _wolfe() -> ScalarObjective:
    def value(x):
        x1, x2 = float(x[0]), float(x[1])
        if x1 >= abs(x2):
            return 5.0 * math.sqrt(9.0 * x1 * x1 + 16.0 * x2 * x2)
        if x1 > 0.0:
            return 9.0 * x1 + 16.0 * abs(x2)
        return 9.0 * x1 + 16.0 * abs(x2) - x1 ** 9

    def subgrad(x):
        x1, x2 = float(x[0]), float(x[1])
        if x1 >= abs(x2):
            s = math.sqrt(9.0 * x1 * x1 + 16.0 * x2 * x2)
            if s == 0.0:
                return np.array([9.0, 0.0])  # limiting selection along x2 = 0
            return np.array([45.0 * x1 / s, 80.0 * x2 / s])
        if x1 > 0.0:
            return np.array([9.0, 16.0 * _sign(x2)])
        return np.array([9.0 - 9.0 * x1 ** 8, 16.0 * _sign(x2)])

    def margin(x):
        x1, x2 = float(x[0]), float(x[1])
        return min(abs(x1 - abs(x2)), abs(x1), abs(x2))

    return ScalarObjective("wolfe", value, subgrad, margin, "Wolfe (1975)")


# ---------------------------------------------------------------------------
# nonconvex benchmark functions

def _crescent() -> ScalarObjective:
    branches = [
        lambda x: x[0] ** 2 + (x[1] - 1.0) ** 2 + x[1] - 1.0,
        lambda x: -x[0] ** 2 - (x[1] - 1.0) ** 2 + x[1] + 1.0,
    ]
    grads = [
        lambda x: (2.0 * x[0], 2.0 * (x[1] - 1.0) + 1.0),
        lambda x: (-2.0 * x[0], -2.0 * (x[1] - 1.0) + 1.0),
    ]
    return _make_max_objective("crescent", branches, grads, "Kiwiel (1985), Crescent")


def _mifflin2() -> ScalarObjective:
    def _w(x):
        return x[0] ** 2 + x[1] ** 2 - 1.0

    def value(x):
        w = _w(x)
        return -x[0] + 2.0 * w + 1.75 * abs(w)

    def subgrad(x):
        w = _w(x)
        factor = 2.0 + 1.75 * _sign(w)
        return np.array([-1.0 + factor * 2.0 * x[0], factor * 2.0 * x[1]])

    def margin(x):
        return abs(_w(x))

    return ScalarObjective("mifflin2", value, subgrad, margin, "Mifflin (1977), function 2")


def _wf() -> ScalarObjective:
    # the rational term has a pole on the line x1 = -0.1; the margin treats a
    # band around it as unsafe for finite differences
    def _t(x1):
        return 10.0 * x1 / (x1 + 0.1)

    branches = [
        lambda x: 0.5 * (x[0] + _t(x[0]) + 2.0 * x[1] ** 2),
        lambda x: 0.5 * (-x[0] + _t(x[0]) + 2.0 * x[1] ** 2),
        lambda x: 0.5 * (x[0] - _t(x[0]) + 2.0 * x[1] ** 2),
    ]

    def _tp(x1):
        return 1.0 / (x1 + 0.1) ** 2

    grads = [
        lambda x: (0.5 * (1.0 + _tp(x[0])), 2.0 * x[1]),
        lambda x: (0.5 * (-1.0 + _tp(x[0])), 2.0 * x[1]),
        lambda x: (0.5 * (1.0 - _tp(x[0])), 2.0 * x[1]),
    ]

    def pole_margin(x):
        return max(0.0, abs(float(x[0]) + 0.1) - 0.05)

    return _make_max_objective(
        "wf", branches, grads,
        "Womersley & Fletcher (1986), as listed in Lukšan & Vlček (2000), problem WF",
        extra_margin=pole_margin,
    )


def _spiral() -> ScalarObjective:
    def _parts(x):
        x1, x2 = float(x[0]), float(x[1])
        r = math.hypot(x1, x2)
        return x1, x2, r

    def b1(x):
        x1, x2, r = _parts(x)
        return (x1 - r * math.cos(r)) ** 2 + 0.005 * r * r

    def b2(x):
        x1, x2, r = _parts(x)
        return (x2 - r * math.sin(r)) ** 2 + 0.005 * r * r

    def value(x):
        return max(b1(x), b2(x))

    def subgrad(x):
        x1, x2, r = _parts(x)
        if r == 0.0:
            return np.zeros(2)  # the origin is the global minimum
        u = np.array([x1, x2]) / r
        if b1(x) >= b2(x):  # first active branch on ties
            inner = x1 - r * math.cos(r)
            d_inner = np.array([1.0, 0.0]) - (math.cos(r) - r * math.sin(r)) * u
        else:
            inner = x2 - r * math.sin(r)
            d_inner = np.array([0.0, 1.0]) - (math.sin(r) + r * math.cos(r)) * u
        return 2.0 * inner * d_inner + 0.01 * np.array([x1, x2])

    def margin(x):
        _, _, r = _parts(x)
        return min(abs(b1(x) - b2(x)), r)

    return ScalarObjective(
        "spiral", value, subgrad, margin,
        "Kuntsevich & Kappel (SolvOpt test set), as listed in Lukšan & Vlček (2000), problem SPIRAL",
    )


# ---------------------------------------------------------------------------
# demonstration objectives

def _shifted_quadratic() -> ScalarObjective:
    return ScalarObjective(
        "shifted-quad",
        lambda x: (x[0] - 1.0) ** 2 + (x[1] - 1.0) ** 2,
        lambda x: np.array([2.0 * (x[0] - 1.0), 2.0 * (x[1] - 1.0)]),
        lambda x: math.inf,
        "smooth reference quadratic",
    )


def _quad_abs_component() -> ScalarObjective:
    # x1^2 + |x2|; at x2 = 0 the oracle picks the midpoint (2 x1, 0) of the
    # subdifferential {2 x1} x [-1, 1]
    return ScalarObjective(
        "quad-abs",
        lambda x: x[0] ** 2 + abs(x[1]),
        lambda x: np.array([2.0 * x[0], _sign(x[1])]),
        lambda x: abs(float(x[1])),
        "parabola plus absolute value",
    )


def _steep_valley_component(a: float, b: float) -> ScalarObjective:
    # |x2 - a |x1|| + b x2, nondifferentiable on {x1 = 0} and on x2 = a |x1|
    def value(x):
        return abs(x[1] - a * abs(x[0])) + b * x[1]

    def subgrad(x):
        u = x[1] - a * abs(x[0])
        su = _sign(u)
        return np.array([-su * a * _sign(x[0]), su + b])

    def margin(x):
        valley = abs(x[1] - a * abs(x[0])) / math.sqrt(1.0 + a * a)
        return min(abs(float(x[0])), valley)

    return ScalarObjective("steep-valley", value, subgrad, margin,
                           "V-shaped valley with tilt")


def _pair_problem(name, first, second, box=None) -> Problem:
    return Problem(
        name=name,
        objectives=[first.oracle(), second.oracle()],
        dimension=2,
        benchmark_box=box,
    )


def quad_abs() -> Problem:
    """Two objectives: a shifted quadratic and ``x1^2 + |x2|``."""
    return _pair_problem("quad-abs", _shifted_quadratic(), _quad_abs_component())


def steep_valley(a: float = 10.0, b: float = 0.5) -> Problem:
    """Shifted quadratic paired with ``|x2 - a |x1|| + b x2`` (a, b nonzero).

    For large ``a`` the region above the valley graph is a thin wedge, which
    makes the subdifferential near the origin hard to sample."""
    if a == 0.0 or b == 0.0:
        raise ValueError("a and b must be nonzero")
    return _pair_problem("steep-valley", _shifted_quadratic(), _steep_valley_component(a, b))


def crescent_mifflin2() -> Problem:
    """The Crescent / Mifflin 2 pairing over the box [-0.5, 1.5]^2.

    Its nondifferentiable set is the unit circle together with the unit
    circle shifted up by one."""
    return _pair_problem(
        "crescent-mifflin2", _crescent(), _mifflin2(),
        box=(np.array([-0.5, -0.5]), np.array([1.5, 1.5])),
    )


# ---------------------------------------------------------------------------
# benchmark catalog

@dataclass(frozen=True)
class CatalogEntry:
    """A numbered benchmark problem with its starting-point box."""

    number: int
    name: str
    components: tuple[ScalarObjective, ScalarObjective]
    box: tuple[np.ndarray, np.ndarray]

    def make_problem(self) -> Problem:
        """Fresh problem instance with zeroed counters."""
        return _pair_problem(self.name, *self.components, box=self.box)

    def grid(self, points_per_axis: int = 10) -> np.ndarray:
        """Inclusive uniform lattice over the box, row-major ordering."""
        lower, upper = self.box
        axes = [np.linspace(lower[i], upper[i], points_per_axis) for i in range(len(lower))]
        pts = [(a, b) for a in axes[0] for b in axes[1]]
        return np.array(pts)

    @property
    def sources(self) -> tuple[str, str]:
        return (self.components[0].source, self.components[1].source)


def _box(x_lo, x_hi, y_lo=None, y_hi=None):
    if y_lo is None:
        y_lo, y_hi = x_lo, x_hi
    return (np.array([x_lo, y_lo], dtype=float), np.array([x_hi, y_hi], dtype=float))


def catalog() -> list[CatalogEntry]:
    """The 18 benchmark pairings with their starting boxes."""
    cb3, dem, ql, lq = _cb3(), _dem(), _ql(), _lq()
    mif1, wolfe = _mifflin1(), _wolfe()
    crescent, mif2, wf, spiral = _crescent(), _mifflin2(), _wf(), _spiral()
    big = _box(-3.0, 3.0)
    pairings = [
        (1, cb3, dem, big),
        (2, cb3, ql, big),
        (3, cb3, lq, _box(0.5, 1.5)),
        (4, cb3, mif1, big),
        (5, cb3, wolfe, big),
        (6, dem, ql, big),
        (7, dem, lq, big),
        (8, dem, mif1, big),
        (9, dem, wolfe, big),
        (10, ql, lq, big),
        (11, ql, mif1, big),
        (12, ql, wolfe, big),
        (13, lq, mif1, (np.array([0.5, -0.5]), np.array([1.5, 1.0]))),
        (14, lq, wolfe, big),
        (15, mif1, wolfe, big),
        (16, crescent, mif2, _box(-0.5, 1.5)),
        (17, mif2, wf, big),
        (18, mif2, spiral, big),
    ]
    return [
        CatalogEntry(number=n, name=f"{a.name}-{b.name}", components=(a, b), box=box)
        for n, a, b, box in pairings
    ]


def demo_problems() -> dict[str, Callable[[], Problem]]:
    """Named demonstration problems available alongside the numbered catalog."""
    return {
        "quad-abs": quad_abs,
        "steep-valley": steep_valley,
        "crescent-mifflin2": crescent_mifflin2,
    }


def find_problem(selector: str) -> Problem:
    """Fresh problem by catalog number ('1'..'18') or by name."""
    selector = selector.strip().lower()
    demos = demo_problems()
    if selector in demos:
        return demos[selector]()
    entries = {str(e.number): e for e in catalog()}
    entries.update({e.name: e for e in catalog()})
    if selector in entries:
        return entries[selector].make_problem()
    raise KeyError(f"unknown problem selector {selector!r}")
