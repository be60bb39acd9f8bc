import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locbench import instances as I


def test_infeasible_balance_reported():
    rep = I.validate(I.TransportInstance([1, 1], [2, 3], [[1, 1], [1, 1]]))
    assert not rep.ok
    assert any("infeasible balance" in m for _, m in rep.issues)


def test_inverted_interval_reported():
    inst = I.IntervalTransportInstance([[1.0]], [3.0], [2.0], [5.0], [6.0])
    rep = I.validate(inst)
    assert ("payload.demand_lo[0]", "inverted interval") in rep.issues


def test_well_formed_tp_passes():
    rep = I.validate(I.TransportInstance([4, 4], [3, 3], [[1, 9], [9, 1]]))
    assert rep.ok and str(rep) == "pass"


def test_spcp_generation_is_valid():
    inst = I.generate("spcp", seed=7, n=8, m=10, strata=3, p=3)
    assert isinstance(inst, I.SpcpInstance)
    assert (inst.n, inst.m, len(inst.strata), inst.p) == (8, 10, 3, 3)
    assert I.validate(inst).ok


@pytest.mark.parametrize("kind", I.KINDS)
def test_generation_deterministic(kind):
    assert I.generate(kind, seed=1) == I.generate(kind, seed=1)


def test_tp_generation_deterministic_3x3():
    a = I.generate("tp", seed=1, n=3, m=3)
    b = I.generate("tp", seed=1, n=3, m=3)
    assert a == b and a.shape == (3, 3)


def test_itp_generation_feasible():
    inst = I.generate("itp", seed=5, n=2, m=2)
    assert inst.cap_hi.sum() >= inst.demand_lo.sum()
    assert inst.region_nonempty()


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(I.KINDS), seed=st.integers(0, 2 ** 32))
def test_generated_instances_validate(kind, seed):
    assert I.validate(I.generate(kind, seed=seed)).ok


@pytest.mark.parametrize("kind", I.KINDS)
def test_roundtrip(kind, tmp_path):
    inst = I.generate(kind, seed=3)
    path = tmp_path / f"{kind}.json"
    I.write_instance(inst, path)
    back = I.read_instance(path)
    assert back == inst
    # written bytes are stable too
    I.write_instance(back, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_missing_costs_is_schema_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"type": "tp", "payload": {"supplies": [1], "demands": [1]}}))
    with pytest.raises(I.SchemaError, match="costs"):
        I.read_instance(path)


def test_nan_coordinate_is_invariant_error(tmp_path):
    path = tmp_path / "nan.json"
    path.write_text('{"type": "planar", "payload": {"points": [[0, NaN]], "weights": [1]}}')
    with pytest.raises(I.InvariantError) as err:
        I.read_instance(path)
    assert "non-finite" in str(err.value)


def test_parse_error_has_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"type": "tp",\n "payload": }')
    with pytest.raises(I.ParseError, match="line 2"):
        I.read_instance(path)


def test_integer_literals_read_as_reals(tmp_path):
    path = tmp_path / "ints.json"
    path.write_text(json.dumps({"type": "planar", "payload": {"points": [[0, 1], [2, 3]],
                                                              "weights": [1, 2]}}))
    inst = I.read_instance(path)
    assert inst.points.dtype == float and inst.weights.dtype == float


def test_arrays_read_only():
    inst = I.generate("tp", seed=0)
    with pytest.raises(ValueError):
        inst.costs[0, 0] = 1.0


def test_medianplex_weights_normalise():
    inst = I.generate("medianplex", seed=2, n=7)
    assert abs(inst.normalized_weights.sum() - 1) <= 1e-12
    assert np.all(np.diag(inst.dist) == 0)


def test_ev_model_periods():
    m = I.EvModel.with_reference_constants(F=2.0, P=5.0, R=0.3)
    assert m.T == 20
    assert m.J == pytest.approx(m.Tr ** 2 / (m.M * m.R ** 2))
    bad = I.EvModel.with_reference_constants(F=0.25, P=1.0, R=0.3, delta=0.1)
    assert not I.validate(bad).ok


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        I.generate("nope")
