import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locbench import generate
from locbench.instances import PlanarDemandSet
from locbench.planar import (AtDemandPoint, bounding_box, contour_grid, covering_radius,
                             distsum, distsum_gradient, select_foci, weiszfeld)

SQUARE = PlanarDemandSet.unit([[0, 0], [1, 0], [0, 1], [1, 1]])


def brute_distsum(points, weights, x):
    return sum(w * math.hypot(px - x[0], py - x[1]) for (px, py), w in zip(points, weights))


def test_distsum_examples():
    one = PlanarDemandSet([[1.0, 1.0]], [2.0])
    assert distsum(one, [4.0, 1.0]) == 6.0
    assert distsum(one, [1.0, 1.0]) == 0.0
    assert distsum(SQUARE, [0.5, 0.5]) == pytest.approx(2 * math.sqrt(2), abs=1e-15)


def test_gradient_symmetric_midpoint():
    pair = PlanarDemandSet.unit([[0, 0], [2, 0]])
    assert np.allclose(distsum_gradient(pair, [1, 0]), 0.0, atol=1e-15)


def test_gradient_at_demand_point_raises():
    with pytest.raises(AtDemandPoint):
        distsum_gradient(SQUARE, [1.0, 0.0])


def test_gradient_finite_differences():
    rng = np.random.default_rng(0)
    d = generate("planar", seed=1, k=8)
    h = 1e-6
    for _ in range(20):
        x = rng.uniform(-2, 12, 2)
        g = distsum_gradient(d, x)
        fd = [(distsum(d, x + h * e) - distsum(d, x - h * e)) / (2 * h) for e in np.eye(2)]
        assert np.max(np.abs(g - fd)) <= 1e-5


def test_weiszfeld_single_point():
    res = weiszfeld(PlanarDemandSet([[3.0, -1.0]], [4.0]))
    assert res.x.tolist() == [3.0, -1.0] and res.objective == 0.0


def test_weiszfeld_unit_square():
    res = weiszfeld(SQUARE)
    assert np.max(np.abs(res.x - 0.5)) <= 1e-6


def test_weiszfeld_dominant_demand_point():
    # one heavy point pulls the optimum onto itself
    d = PlanarDemandSet([[0, 0], [1, 0], [0, 1]], [5.0, 1.0, 1.0])
    res = weiszfeld(d, x0=[0.0, 0.0])
    assert res.reason == "demand-point-optimal"
    assert res.x.tolist() == [0.0, 0.0]


def test_weiszfeld_steps_off_non_optimal_demand_point():
    d = PlanarDemandSet.unit([[0, 0], [4, 0], [0, 4], [4, 4]])
    res = weiszfeld(d, x0=[0.0, 0.0])
    assert np.allclose(res.x, [2, 2], atol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_weiszfeld_invariants(seed):
    d = generate("planar", seed=seed, k=12)
    res = weiszfeld(d)
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    for u in d.points:
        assert res.objective <= distsum(d, u) + 1e-12
    assert res.objective == distsum(d, res.x)


def test_weiszfeld_translation_rotation():
    d = generate("planar", seed=3, k=9)
    base = weiszfeld(d).x
    shift = np.array([3.5, -7.25])
    moved = weiszfeld(PlanarDemandSet(d.points + shift, d.weights)).x
    assert np.allclose(moved, base + shift, atol=1e-6)
    t = 0.7
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    turned = weiszfeld(PlanarDemandSet(d.points @ rot.T, d.weights)).x
    assert np.allclose(turned, rot @ base, atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(a=st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
       b=st.tuples(st.floats(-10, 10), st.floats(-10, 10)), lam=st.floats(0, 1))
def test_distsum_convex(a, b, lam):
    d = generate("planar", seed=0, k=6)
    a, b = np.array(a), np.array(b)
    mid = lam * a + (1 - lam) * b
    assert distsum(d, mid) <= lam * distsum(d, a) + (1 - lam) * distsum(d, b) + 1e-9


def test_single_focus_is_circle():
    d = generate("planar", seed=4, k=15)
    focus = PlanarDemandSet.unit(d.points[:1])
    cov = covering_radius(focus, d)
    fx, fy = d.points[0]
    assert cov.radius == max(math.sqrt((x - fx) ** 2 + (y - fy) ** 2) for x, y in d.points)


def test_demand_equals_foci():
    d = generate("planar", seed=5, k=7)
    cov = covering_radius(d, d)
    assert cov.radius == pytest.approx(max(distsum(d, u) for u in d.points), abs=1e-12)


def test_three_foci_regression():
    d = generate("planar", seed=6, k=20)
    foci = PlanarDemandSet(d.points[[2, 9, 15]], [1.0, 2.0, 0.5])
    cov = covering_radius(foci, d)
    ref = [brute_distsum(foci.points, foci.weights, u) for u in d.points]
    assert cov.radius == pytest.approx(max(ref), abs=1e-12)
    assert ref[cov.attaining] == pytest.approx(cov.radius, abs=1e-12)


def test_covering_monotone():
    d = generate("planar", seed=7, k=10)
    foci = PlanarDemandSet(d.points[:3], [1.0, 1.0, 1.0])
    r = covering_radius(foci, d).radius
    more = PlanarDemandSet(np.vstack([d.points, [[40.0, 40.0]]]), np.append(d.weights, 1.0))
    assert covering_radius(foci, more).radius >= r
    heavier = PlanarDemandSet(foci.points, [1.0, 1.5, 1.0])
    assert covering_radius(heavier, d).radius >= r


def test_select_all_points():
    d = generate("planar", seed=8, k=5)
    cov = select_foci(d, 5)
    assert cov.foci_index == (0, 1, 2, 3, 4)
    u = PlanarDemandSet.unit(d.points)
    assert cov.radius == pytest.approx(max(distsum(u, a) for a in d.points), abs=1e-12)


def test_select_one_is_discrete_center():
    d = generate("planar", seed=9, k=11)
    cov = select_foci(d, 1)
    far = [max(math.hypot(*(a - b)) for b in d.points) for a in d.points]
    assert cov.radius == pytest.approx(min(far), abs=1e-12)


def test_select_swap_never_beats_exact():
    d = generate("planar", seed=10, k=12)
    ex, sw = select_foci(d, 3, "exact"), select_foci(d, 3, "swap")
    assert sw.radius >= ex.radius - 1e-12
    brute = min(max(sum(math.hypot(*(a - d.points[j])) for j in sub) for a in d.points)
                for sub in combinations(range(12), 3))
    assert ex.radius == pytest.approx(brute, abs=1e-12)


def test_contour_single_point_corners():
    d = PlanarDemandSet([[0.0, 0.0]], [2.0])
    g = contour_grid(d, (0, 3, 0, 4), 2, 2)
    assert g.values.tolist() == [[0.0, 6.0], [8.0, 10.0]]
    assert len(list(g.rows())) == 4


def test_contour_min_above_optimum_and_symmetric():
    g = contour_grid(SQUARE, (-0.5, 1.5, -0.5, 1.5), 41, 41)
    assert g.values.min() >= weiszfeld(SQUARE).objective - 1e-12
    assert np.allclose(g.values, g.values[::-1, :], atol=1e-12)
    assert np.allclose(g.values, g.values[:, ::-1], atol=1e-12)


def test_contour_rejects_bad_grid():
    with pytest.raises(ValueError):
        contour_grid(SQUARE, bounding_box(SQUARE), 1, 5)
    with pytest.raises(ValueError):
        contour_grid(SQUARE, (0, 0, 0, 1), 5, 5)
