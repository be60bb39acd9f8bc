import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locbench import generate
from locbench.instances import IntervalTransportInstance, TransportInstance
from locbench.transport import (InfeasibleBalance, SizeCapExceeded, itp_bisection, itp_oracle,
                                region_vertices, solve_tp, tp_value)

from oracles import tp_integer_enum


def check_solution(inst, sol):
    # column sums exact, rows within capacity, duality gap closed
    assert np.allclose(sol.flows.sum(axis=0), inst.demands, atol=1e-9, rtol=0)
    assert np.all(sol.flows.sum(axis=1) <= inst.supplies + 1e-9)
    assert np.all(sol.flows >= 0)
    assert sol.objective == pytest.approx(float(np.sum(sol.flows * inst.costs)), abs=1e-9)
    assert abs(sol.objective - sol.dual_value(inst.supplies, inst.demands)) < 1e-7
    assert np.all(sol.supply_duals <= 1e-9)


def test_single_lane():
    inst = TransportInstance([5], [5], [[3]])
    sol = solve_tp(inst)
    assert sol.objective == 15
    assert sol.flows.tolist() == [[5.0]]


def test_dominant_diagonal():
    inst = TransportInstance([4, 4], [3, 3], [[1, 9], [9, 1]])
    sol = solve_tp(inst)
    assert sol.objective == 6
    assert sol.flows.tolist() == [[3, 0], [0, 3]]
    check_solution(inst, sol)


@pytest.mark.parametrize("seed", range(10))
def test_random_3x4_matches_integer_enumeration(seed):
    inst = generate("tp", seed=seed, n=3, m=4, max_demand=4)
    sol = solve_tp(inst)
    check_solution(inst, sol)
    assert sol.objective == tp_integer_enum(inst.supplies, inst.demands, inst.costs)


def test_infeasible_balance_raises():
    with pytest.raises(InfeasibleBalance):
        solve_tp(TransportInstance([1], [2], [[1]]))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(1, 5), m=st.integers(1, 5))
def test_feasibility_and_duality(seed, n, m):
    inst = generate("tp", seed=seed, n=n, m=m)
    check_solution(inst, solve_tp(inst))


def test_degenerate_intervals_collapse():
    base = generate("tp", seed=4, n=2, m=3)
    itp = IntervalTransportInstance(base.costs, base.demands, base.demands,
                                    base.supplies, base.supplies)
    z = solve_tp(base).objective
    assert tp_value(base.costs, base.demands, base.supplies) == z
    assert itp_oracle(itp).value == z
    res = itp_bisection(itp)
    assert res.value == z and res.iterations == 0 and res.evaluated == 1


def test_monotone_in_demand_and_capacity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        inst = generate("tp", seed=int(rng.integers(1 << 30)), n=3, m=3)
        z = solve_tp(inst).objective
        q = np.asarray(inst.supplies, float) + 0
        d = np.asarray(inst.demands, float) + 0
        q[rng.integers(3)] += 2
        assert tp_value(inst.costs, d, q) <= z + 1e-9
        slack = q.sum() - d.sum()
        d[rng.integers(3)] += min(1.0, slack)
        assert tp_value(inst.costs, d, q) >= tp_value(inst.costs, inst.demands, q) - 1e-9


def test_oracle_1x1():
    inst = IntervalTransportInstance([[5.0]], [1.0], [2.0], [2.0], [3.0])
    res = itp_oracle(inst)
    assert res.value == 10 and res.d.tolist() == [2.0] and res.certified


def test_oracle_result_recomputes():
    inst = generate("itp", seed=11, n=3, m=2)
    res = itp_oracle(inst)
    assert np.all(res.d >= inst.demand_lo) and np.all(res.d <= inst.demand_hi)
    assert np.all(res.q >= inst.cap_lo) and np.all(res.q <= inst.cap_hi)
    assert res.q.sum() >= res.d.sum() - 1e-9
    assert res.value == tp_value(inst.costs, res.d, res.q)
    assert set(res.to_dict()) == {"value", "d", "q", "method", "iterations", "certified"}


def test_vertices_lie_in_region():
    inst = generate("itp", seed=3, n=3, m=3)
    for v in region_vertices(inst):
        d, q = np.array(v[:3]), np.array(v[3:])
        assert np.all(inst.demand_lo - 1e-9 <= d) and np.all(d <= inst.demand_hi + 1e-9)
        assert np.all(inst.cap_lo - 1e-9 <= q) and np.all(q <= inst.cap_hi + 1e-9)
        assert q.sum() >= d.sum() - 1e-9


def test_oracle_beats_random_points():
    # any sampled feasible point is dominated by the vertex maximum
    rng = np.random.default_rng(5)
    inst = generate("itp", seed=9, n=2, m=3)
    best = itp_oracle(inst).value
    for _ in range(200):
        d = rng.uniform(inst.demand_lo, inst.demand_hi)
        q = rng.uniform(inst.cap_lo, inst.cap_hi)
        if q.sum() >= d.sum():
            assert tp_value(inst.costs, d, q) <= best + 1e-9


@pytest.mark.parametrize("variant", ["A", "B"])
def test_bisection_dominated_by_oracle(variant):
    for seed in range(20):
        inst = generate("itp", seed=seed, n=2, m=2)
        res = itp_bisection(inst, variant)
        assert res.value <= itp_oracle(inst).value + 1e-9
        assert res.value == tp_value(inst.costs, res.d, res.q)
        assert res.method == f"bisection-{variant}" and not res.certified


def test_bisection_bad_variant():
    with pytest.raises(ValueError):
        itp_bisection(generate("itp", seed=0), "C")


def test_oracle_size_cap():
    with pytest.raises(SizeCapExceeded):
        itp_oracle(generate("itp", seed=0, n=2, m=2), cap=3)


def test_oracle_permutation_invariant():
    rng = np.random.default_rng(1)
    inst = generate("itp", seed=2, n=3, m=3)
    rp, cp = rng.permutation(3), rng.permutation(3)
    shuffled = IntervalTransportInstance(inst.costs[rp][:, cp], inst.demand_lo[cp],
                                         inst.demand_hi[cp], inst.cap_lo[rp], inst.cap_hi[rp])
    assert itp_oracle(shuffled).value == pytest.approx(itp_oracle(inst).value, abs=1e-9)
