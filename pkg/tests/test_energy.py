import math
import pickle

import pytest
from hypothesis import given, strategies as st

from afrelay.channel import NodePowers
from afrelay.energy import (
    UNBOUNDED,
    AllocationFactors,
    bit_energy,
    bit_time,
    energy_factor,
    evaluate_point,
    mean_bit_time,
    power_budget_ok,
    total_energy,
)

EQ = AllocationFactors(1 / 3, 1 / 3, 1 / 3)


def test_allocation_validation():
    with pytest.raises(ValueError):
        AllocationFactors(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        AllocationFactors(-0.1, 0.5, 0.5)
    assert AllocationFactors.equal_split() == EQ


def test_bit_energy_examples():
    assert bit_energy(EQ, 1, 1, 2) == pytest.approx((2, 2), rel=1e-12)
    assert bit_energy(AllocationFactors(0, 0, 0), 1, 1, 2) == (0, 0)
    e_a, _ = bit_energy(AllocationFactors(0.5, 0.25, 0.25), 2, 1, 1)
    assert e_a == pytest.approx(5.25, rel=1e-12)
    assert total_energy(EQ, 1, 1, 2) == pytest.approx(4)


def test_energy_factor_rejects_nonpositive():
    with pytest.raises(ValueError):
        energy_factor(0)
    assert energy_factor(math.inf) == pytest.approx(2 * math.log(2))


def test_bit_time_examples():
    assert bit_time(EQ, 1, 1, 9) == pytest.approx((2, 2), rel=1e-12)
    assert bit_time(AllocationFactors(0.5, 0.5, 0), 1, 1, 9) == (UNBOUNDED, UNBOUNDED)
    assert bit_time(EQ, 0, 1, 9) == (UNBOUNDED, UNBOUNDED)
    q_a, q_b = bit_time(AllocationFactors(0.2, 0.2, 0.5), 3, 3, 2)
    assert q_a == q_b
    assert mean_bit_time(AllocationFactors(0.5, 0.5, 0), 1, 1, 9) is UNBOUNDED


def test_q_models_agree():
    a = AllocationFactors(0.1, 0.3, 0.4)
    assert bit_time(a, 2.0, 0.3, 1.5, "as-printed") == pytest.approx(bit_time(a, 2.0, 0.3, 1.5, "symmetric"), rel=1e-12)
    with pytest.raises(ValueError):
        bit_time(a, 1, 1, 1, "other")


def test_unbounded_marker():
    assert pickle.loads(pickle.dumps(UNBOUNDED)) is UNBOUNDED
    assert str(UNBOUNDED) == "unbounded"


def test_evaluate_point_defaults_to_mean_bit_time():
    p = evaluate_point(EQ, 1, 1, 9)
    assert p.e_total == pytest.approx(4)
    assert (p.q_a, p.q_b) == pytest.approx((2, 2))


def test_power_budget():
    P = 2.0
    assert power_budget_ok([NodePowers(0, 0, 0)], P)
    assert power_budget_ok([NodePowers(0.5, 0.5, 1.0)], P)
    assert not power_budget_ok([NodePowers(0.4, 0.4, 0.4)] * 2, P)


alloc = st.builds(lambda a, b, r: AllocationFactors(a / 3, b / 3, r / 3),
                  st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.01, 1))
pos = st.floats(1e-2, 1e2)


@given(a=alloc, H=pos, G=pos, q=st.floats(0.05, 50), lam=st.floats(0.05, 1.0))
def test_energy_properties(a, H, G, q, lam):
    e_a, e_b = bit_energy(a, H, G, q)
    assert e_a > 0 and e_b > 0
    scaled = AllocationFactors(lam * a.alpha_a, lam * a.alpha_b, lam * a.alpha_r)
    assert bit_energy(scaled, H, G, q)[0] == pytest.approx(lam * e_a, rel=1e-12)
    sw = AllocationFactors(a.alpha_b, a.alpha_a, a.alpha_r)
    assert bit_energy(sw, G, H, q) == pytest.approx((e_b, e_a), rel=1e-12)


@given(a=alloc, H=pos, G=pos, P=st.floats(0.01, 10))
def test_bit_time_decreases_in_power(a, H, G, P):
    q1 = bit_time(a, H, G, P, "symmetric")
    q2 = bit_time(a, H, G, 1.5 * P, "symmetric")
    assert q2[0] < q1[0] and q2[1] < q1[1]
    sw = bit_time(AllocationFactors(a.alpha_b, a.alpha_a, a.alpha_r), G, H, P, "symmetric")
    assert sw == pytest.approx((q1[1], q1[0]), rel=1e-12)
