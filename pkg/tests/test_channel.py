import math

import pytest
from hypothesis import given, strategies as st

from afrelay.channel import (
    ChannelParams,
    NodePowers,
    SnrPair,
    algorithm1_snr_pipeline,
    amplification_factor,
    capacity,
    causality_check,
    effective_gains,
    rate,
    snr_exact_los,
    snr_exact_nlos,
    snr_high,
    snr_high_from_gains,
    sum_rate,
)
from afrelay.energy import AllocationFactors
from afrelay.geometry import LinkGeometry, PolarPosition

UNIT = LinkGeometry(1.0, 1.0, 1.0)


@pytest.mark.parametrize("kw, geo, expected", [
    (dict(), UNIT, (1.0, 1.0)),
    (dict(), LinkGeometry(10, 10, 1), (0.01, 1.0)),
    (dict(gamma_a=4, path_loss_exp=3), LinkGeometry(2, 2, 1), (0.5, 1.0)),
])
def test_effective_gains(kw, geo, expected):
    assert effective_gains(ChannelParams(**kw), geo) == pytest.approx(expected, rel=1e-12)


def test_params_validation():
    for kw in (dict(path_loss_exp=1.5), dict(noise_var=0), dict(total_power=0),
               dict(rate_efficiency=0), dict(gamma_a=-1)):
        with pytest.raises(ValueError):
            ChannelParams(**kw)


def test_amplification_examples():
    c = ChannelParams()
    assert amplification_factor(c, UNIT, NodePowers(1, 1, 0)) == 0
    assert amplification_factor(c, UNIT, NodePowers(0, 0, 4)) == pytest.approx(2)
    assert amplification_factor(c, UNIT, NodePowers(1, 1, 3)) == pytest.approx(1)


def test_nlos_examples():
    c = ChannelParams()
    assert snr_exact_nlos(c, UNIT, NodePowers(1, 1, 1)).snr_b == pytest.approx(0.25)
    assert snr_exact_nlos(c, UNIT, NodePowers(0, 1, 1)).snr_b == 0


def test_los_examples():
    c = ChannelParams(gamma_ab=0)
    p = NodePowers(1, 1, 1)
    assert snr_exact_los(c, UNIT, p) == snr_exact_nlos(c, UNIT, p)
    assert snr_exact_los(c, UNIT, p).snr_b == pytest.approx(0.25)
    c2 = ChannelParams(gamma_ab=0.5)
    direct = snr_exact_los(c2, UNIT, p).snr_a - snr_exact_nlos(c2, UNIT, p).snr_a
    assert direct == pytest.approx(0.5)
    assert snr_exact_los(c2, UNIT, NodePowers(1, 1, 0)) == (0.0, 0.0)


def test_nlos_approaches_high_form_when_noise_negligible():
    c = ChannelParams(total_power=3e6)
    a = AllocationFactors(1 / 3, 1 / 3, 1 / 3)
    exact = snr_exact_nlos(c, UNIT, NodePowers.from_allocation(a, c.total_power))
    high = snr_high(c, UNIT, a)
    assert exact.snr_a == pytest.approx(high.snr_a, rel=1e-5)


def test_snr_high_examples():
    a = AllocationFactors(1 / 3, 1 / 3, 1 / 3)
    assert snr_high_from_gains(a, 1, 1, 9) == pytest.approx((1.0, 1.0), rel=1e-12)
    assert snr_high_from_gains(AllocationFactors(0.5, 0.5, 0), 1, 1, 9) == (0, 0)
    assert snr_high_from_gains(AllocationFactors(0, 0, 0), 1, 1, 9) == (0, 0)
    s = snr_high_from_gains(AllocationFactors(0.2, 0.2, 0.6), 3, 3, 2)
    assert s.snr_a == s.snr_b


alloc = st.builds(lambda a, b, r: AllocationFactors(a / 3, b / 3, r / 3),
                  st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.01, 1))


@given(a=alloc, H=st.floats(1e-3, 1e3), G=st.floats(1e-3, 1e3), P=st.floats(1e-2, 1e2))
def test_snr_properties(a, H, G, P):
    c = ChannelParams(total_power=P)
    s = snr_high_from_gains(a, H, G, P)
    s2 = snr_high_from_gains(a, H, G, 2 * P)
    assert s2.snr_a == pytest.approx(2 * s.snr_a, rel=1e-12)
    swapped = snr_high_from_gains(AllocationFactors(a.alpha_b, a.alpha_a, a.alpha_r), G, H, P)
    assert swapped.snr_a == pytest.approx(s.snr_b, rel=1e-12)
    # exact NLOS stays below the high-SNR form
    geo = LinkGeometry(1.0, H ** -0.5, G ** -0.5)
    exact = snr_exact_nlos(c, geo, NodePowers.from_allocation(a, P))
    high = snr_high(c, geo, a)
    assert exact.snr_a < high.snr_a and exact.snr_b < high.snr_b
    phi = 1 + s.snr_a + s.snr_b + s.snr_a * s.snr_b
    assert capacity(s) == pytest.approx(0.5 * math.log2(1 + (1 + s.snr_a) * (1 + s.snr_b)), rel=1e-12)
    assert capacity(s) == pytest.approx(0.5 * math.log2(1 + phi), rel=1e-12)


def test_rate_examples():
    assert sum_rate(SnrPair(0, 0)) == 0
    assert sum_rate(SnrPair(1, 1)) == pytest.approx(1.0)
    assert sum_rate(SnrPair(3, 1)) == pytest.approx(1.5)
    assert rate(SnrPair(1, 1), 0.5) == pytest.approx(0.5 * capacity(SnrPair(1, 1)))
    with pytest.raises(ValueError):
        rate(SnrPair(1, 1), 0)


def test_causality():
    assert causality_check([2, 2, 2, 2])
    assert not causality_check([1, 2, 3])
    assert causality_check([1, 1, 0.5])
    with pytest.raises(ValueError):
        causality_check([1])


def test_algorithm1_pipeline():
    c = ChannelParams(total_power=9)
    a = AllocationFactors(1 / 3, 1 / 3, 1 / 3)
    out = algorithm1_snr_pipeline(1.0, [PolarPosition(0, 0, 0)] * 3, c, a)
    assert [s.slot for s in out] == [1, 2, 3]
    assert out[0].snr == pytest.approx((1.0, 1.0))
    assert out[0].powers.total == pytest.approx(9)
    with pytest.raises(ValueError):
        algorithm1_snr_pipeline(1.0, [PolarPosition(0, 0, 0)] * 2, c, [a])
