import math

import numpy as np
import pytest

from afrelay.ber import optimal_ber, single_hop_rayleigh_ber
from afrelay.channel import ChannelParams
from afrelay.energy import AllocationFactors
from afrelay.geometry import LinkGeometry
from afrelay.kernels import available_backends
from afrelay.montecarlo import (
    TrialConfig,
    binomial_ci,
    draw_channels,
    empirical_vs_analytic,
    loglog_slope,
    simulate_single_hop,
    simulate_two_hop,
)

UNIT = LinkGeometry(1.0, 1.0, 1.0)
EQ = AllocationFactors(1 / 3, 1 / 3, 1 / 3)


def test_trial_config_validation():
    for kw in (dict(samples=0), dict(seed=-1), dict(mode="x"), dict(modulation="QPSK")):
        with pytest.raises(ValueError):
            TrialConfig(**kw)


def test_channel_draws_are_unit_and_uncorrelated():
    h, g = draw_channels(7, 200_000)
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1, abs=0.02)
    assert np.mean(np.abs(g) ** 2) == pytest.approx(1, abs=0.02)
    assert abs(np.corrcoef(np.abs(h), np.abs(g))[0, 1]) < 0.02
    # the stream is addressed by sample index
    tail = draw_channels(7, 10, first=199_990)
    np.testing.assert_array_equal(tail[0], h[-10:])


def test_noise_free_link_has_no_errors():
    r = simulate_two_hop(TrialConfig(20_000, 1), EQ, UNIT, ChannelParams(), noise_var=0.0)
    assert r.errors_a == 0 and r.errors_b == 0


def test_zero_power_is_a_coin_flip():
    r = simulate_two_hop(TrialConfig(100_000, 2), AllocationFactors(0, 0, 0), UNIT, ChannelParams())
    assert abs(r.ber_a - 0.5) <= r.ci_halfwidth
    assert abs(r.ber_b - 0.5) <= r.ci_halfwidth


def test_single_hop_matches_closed_form():
    r = simulate_single_hop(TrialConfig(100_000, 3), 1.0)
    assert single_hop_rayleigh_ber(1.0) == pytest.approx(0.14645, abs=1e-5)
    assert r.ber_a == pytest.approx(0.14645, abs=0.005)


def test_thread_count_does_not_change_results():
    tc = TrialConfig(3 * 32768 + 17, 5)
    a = simulate_two_hop(tc, EQ, UNIT, ChannelParams(total_power=50.0), threads=1)
    b = simulate_two_hop(tc, EQ, UNIT, ChannelParams(total_power=50.0), threads=4)
    assert a == b


@pytest.mark.skipif("compiled" not in available_backends(), reason="extension not built")
def test_backends_agree_on_error_counts():
    tc = TrialConfig(40_000, 9)
    p = ChannelParams(total_power=20.0)
    a = simulate_two_hop(tc, EQ, UNIT, p, backend="python")
    b = simulate_two_hop(tc, EQ, UNIT, p, backend="compiled")
    assert (a.errors_a, a.errors_b) == (b.errors_a, b.errors_b)
    assert a.mean_snr_a == pytest.approx(b.mean_snr_a, rel=1e-12)


def test_ci_shrinks_with_samples():
    p = ChannelParams(total_power=10.0)
    small = simulate_two_hop(TrialConfig(1_000, 4), EQ, UNIT, p)
    big = simulate_two_hop(TrialConfig(100_000, 4), EQ, UNIT, p)
    assert big.ci_halfwidth < small.ci_halfwidth / 5
    assert binomial_ci(0.0, 10) == 0.0


def test_nlos_mean_snr_matches_per_sample_high_snr_form():
    P = 1e4
    a = AllocationFactors(0.25, 0.25, 0.5)
    tc = TrialConfig(50_000, 11)
    r = simulate_two_hop(tc, a, UNIT, ChannelParams(total_power=P))
    h, g = draw_channels(tc.seed, tc.samples)
    H, G = np.abs(h) ** 2, np.abs(g) ** 2
    s_a = P * H * G * a.alpha_r * a.alpha_b / ((a.alpha_r + a.alpha_a) * H + a.alpha_b * G)
    # noise terms lower the exact SNR slightly
    assert r.mean_snr_a == pytest.approx(np.mean(s_a), rel=0.01)
    assert r.mean_snr_a < np.mean(s_a)


def test_los_direct_path_helps():
    p = ChannelParams(total_power=5.0, gamma_ab=1.0)
    tc = TrialConfig(40_000, 6)
    nlos = simulate_two_hop(tc, EQ, LinkGeometry(1.0, 1.0, 1.0), p)
    los = simulate_two_hop(TrialConfig(40_000, 6, mode="LOS"), EQ, LinkGeometry(1.0, 1.0, 1.0), p)
    assert los.ber_a < nlos.ber_a and los.ber_b < nlos.ber_b


def test_ber_falls_with_power_at_fixed_allocation():
    a = AllocationFactors(0.25, 0.25, 0.5)
    powers = [100.0, 300.0, 1000.0]
    bers = []
    for P in powers:
        r = simulate_two_hop(TrialConfig(200_000, 8), a, UNIT, ChannelParams(total_power=P))
        bers.append(0.5 * (r.ber_a + r.ber_b))
    assert loglog_slope(powers, bers) == pytest.approx(-1, abs=0.1)
    assert loglog_slope([1, 10, 100], [1, 0.1, 0.01]) == pytest.approx(-1)


def test_comparison_flags_regime():
    r = simulate_two_hop(TrialConfig(20_000, 2), EQ, UNIT, ChannelParams(total_power=9.0))
    (c,) = empirical_vs_analytic([("p", EQ, 1.0, 1.0, 9.0, r)])
    assert c.ber_analytic == pytest.approx(optimal_ber(EQ, 1, 1, 9))
    assert not c.valid  # gamma* = 4.5 is below the high-SNR threshold
    assert math.isfinite(c.rel_error)


def test_nlos_mean_snr_within_three_sigma_of_quadrature():
    from scipy import integrate

    from afrelay.channel import NodePowers, snr_exact_nlos

    P = 10.0
    a = AllocationFactors(0.25, 0.25, 0.5)
    c = ChannelParams(total_power=P)
    powers = NodePowers.from_allocation(a, P)

    def snr(x, y):
        # unit gamma and exponent 2: hop gain x means distance x^(-1/2)
        return snr_exact_nlos(c, LinkGeometry(1.0, x ** -0.5, y ** -0.5), powers).snr_a

    def moment(k):
        f = lambda y, x: snr(x, y) ** k * math.exp(-x - y)
        return integrate.dblquad(f, 1e-12, 60, 1e-12, 60, epsabs=1e-10, epsrel=1e-8)[0]

    m1, m2 = moment(1), moment(2)
    n = 100_000
    sigma = math.sqrt((m2 - m1 * m1) / n)
    r = simulate_two_hop(TrialConfig(n, 21), a, UNIT, c)
    assert abs(r.mean_snr_a - m1) <= 3 * sigma
