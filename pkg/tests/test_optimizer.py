import math

import numpy as np
import pytest

from afrelay.energy import UNBOUNDED, AllocationFactors, bit_energy, bit_time
from afrelay.objective import objective_values
from afrelay.optimizer import (
    BoundaryPointError,
    WeightVector,
    bordered_hessian,
    bordered_hessian_psd,
    closed_form_allocation,
    default_weight_grid,
    gradient,
    grid_best,
    hessian,
    numerical_allocation,
    optimal_delay,
    optimal_delay_from,
    optimal_energy,
    optimal_energy_from,
    pareto_mask,
    printed_closed_form_candidates,
    printed_gradient,
    scalarized_objective,
    second_derivatives,
    stationarity_residual,
    trajectory_objective,
    tradeoff_sweep,
)

EQ = AllocationFactors(1 / 3, 1 / 3, 1 / 3)
W3 = WeightVector(1 / 3, 1 / 3, 1 / 3)


def _fd_grad(x, w, H, G, P, q, h=1e-6):
    out = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h * x[i]
        out[i] = (objective_values(*(x + e), w, H, G, P, q) - objective_values(*(x - e), w, H, G, P, q)) / (2 * e[i])
    return out


def test_weight_validation():
    with pytest.raises(ValueError):
        WeightVector(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        WeightVector(0, 0.5, 0.5)
    grid = default_weight_grid()
    assert len(grid) == 18
    assert grid[0].w_r == pytest.approx(0.05) and grid[-1].w_r == pytest.approx(0.9)


def test_objective_example():
    assert scalarized_objective(EQ, W3, 1, 1, 9, 2) == pytest.approx(8 / 3, rel=1e-12)


def test_objective_unbounded_without_relay():
    assert scalarized_objective(AllocationFactors(0.5, 0.5, 0), W3, 1, 1, 9, 2) is UNBOUNDED


def test_trajectory_objective_skips_first_slot():
    gains = [(5.0, 5.0), (1.0, 1.0), (1.0, 1.0)]
    total = trajectory_objective([EQ] * 3, W3, gains, 9, 2)
    assert total == pytest.approx(2 * 8 / 3)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(50):
        x = rng.uniform(0.05, 0.3, 3)
        w = WeightVector(*rng.dirichlet(np.ones(3)) * 0.999)
        H, G = rng.uniform(0.01, 10, 2)
        P, q = rng.uniform(0.1, 2), rng.uniform(0.2, 4)
        g = gradient(x, w, H, G, P, q)
        assert not g.one_sided
        np.testing.assert_allclose(g.as_array(), _fd_grad(x, w, H, G, P, q), rtol=1e-6)


def test_gradient_symmetry_and_energy_limit():
    g = gradient([0.2, 0.2, 0.4], W3, 2.0, 2.0, 1.0, 1.0)
    assert g.d_alpha_a == pytest.approx(g.d_alpha_b, rel=1e-12)
    g0 = gradient([0.2, 0.3, 0.4], (0.5, 0.5, 0.0), 2.0, 3.0, 1.0, 1.0)
    k = 1.0 * (2 ** 2 - 1)
    # energy gradient: K * (w_a u_a + w_b u_b)
    assert g0.as_array() == pytest.approx(k * (0.5 * np.array([2, 3, 2]) + 0.5 * np.array([2, 3, 3])))


def test_gradient_boundary_flag():
    assert gradient([0.0, 0.3, 0.4], W3, 1, 1, 1, 1).one_sided


def test_printed_gradient_is_not_the_derivative():
    x = np.array([0.2, 0.25, 0.3])
    fd = _fd_grad(x, W3, 2.0, 0.7, 1.2, 1.5)
    assert not np.allclose(printed_gradient(x, W3, 2.0, 0.7, 1.2, 1.5), fd, rtol=1e-3)


def test_hessian_and_mixed_partials():
    x = np.array([0.15, 0.25, 0.35])
    args = (W3, 1.7, 0.4, 1.3, 0.9)
    hess = hessian(x, *args)
    h = 1e-5
    fd = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd[:, i] = (gradient(x + e, *args).as_array() - gradient(x - e, *args).as_array()) / (2 * h)
    np.testing.assert_allclose(hess, fd, rtol=1e-5, atol=1e-9 * np.abs(hess).max())
    mixed = second_derivatives(x, *args)
    assert mixed.shape == (3, 2)
    assert mixed.sum(axis=1) == pytest.approx([hess[0, 1], hess[1, 2], hess[2, 0]], rel=1e-12)


def test_mixed_partials_symmetric_point():
    m = second_derivatives([0.2, 0.2, 0.4], W3, 1.5, 1.5, 1.0, 1.0)
    # (b, r) on the S_a path mirrors (r, a) on the S_b path
    assert m[1, 0] == pytest.approx(m[2, 1], rel=1e-12)


def test_second_order_rejects_boundary():
    for fn in (hessian, second_derivatives, bordered_hessian):
        with pytest.raises(BoundaryPointError):
            fn([0.0, 0.2, 0.3], W3, 1, 1, 1, 1)


def test_bordered_hessian_structure_and_zero_vector():
    hb = bordered_hessian([0.2, 0.2, 0.3], W3, 1, 2, 1, 1)
    assert hb[0, 0] == 0 and np.allclose(hb, hb.T)
    z = np.zeros(4)
    assert z @ hb @ z >= -1e-9 * np.linalg.norm(hb, 2) * (z @ z)


def test_psd_at_interior_optimum():
    w = WeightVector(0.4, 0.4, 0.2)
    oa = closed_form_allocation(w, 1.0, 1.0, 50.0)
    x = oa.alloc.as_array()
    assert x.sum() < 1 - 1e-6
    assert bordered_hessian_psd(x, w, 1.0, 1.0, 50.0, oa.q_pin, trials=2000)


def test_gradient_border_indefinite_away_from_stationarity():
    # with a nonzero border vector the 4x4 matrix has a negative eigenvalue
    hb = bordered_hessian([0.2, 0.2, 0.3], W3, 1, 2, 1, 1)
    assert np.linalg.eigvalsh(hb).min() < 0
    assert not bordered_hessian_psd([0.2, 0.2, 0.3], W3, 1, 2, 1, 1, trials=2000)


@pytest.mark.parametrize("seed", range(6))
def test_closed_form_beats_grid(seed):
    rng = np.random.default_rng(100 + seed)
    H, G = rng.uniform(0.01, 10, 2)
    P = rng.uniform(0.1, 2)
    w = WeightVector(*(rng.dirichlet(np.ones(3)) * 0.999 + 1e-4))
    oa = closed_form_allocation(w, H, G, P)
    fg, _ = grid_best(w, H, G, P, oa.q_pin)
    assert oa.f_value <= fg + 1e-3 * abs(fg)
    assert oa.converged
    assert oa.f_value == pytest.approx(scalarized_objective(oa.alloc, w, H, G, P, oa.q_pin), rel=1e-9)
    assert stationarity_residual(oa.alloc.as_array(), w, H, G, P, oa.q_pin) < 1e-6


def test_fixed_point_is_self_consistent():
    oa = closed_form_allocation(WeightVector(0.3, 0.3, 0.4), 2.0, 0.5, 1.0)
    q_a, q_b = bit_time(oa.alloc, 2.0, 0.5, 1.0)
    assert oa.q_pin == pytest.approx(0.5 * (q_a + q_b), rel=1e-8)


def test_symmetric_config():
    oa = closed_form_allocation(WeightVector(0.3, 0.3, 0.4), 1.5, 1.5, 1.0)
    assert oa.alloc.alpha_a == pytest.approx(oa.alloc.alpha_b, rel=1e-9)
    assert printed_closed_form_candidates(W3, 1.5, 1.5, 1.0, 1.0) == []


def test_numerical_allocation_deterministic_and_agrees():
    w = WeightVector(0.2, 0.5, 0.3)
    a = numerical_allocation(w, 3.0, 0.2, 1.5, q=1.0)
    b = numerical_allocation(w, 3.0, 0.2, 1.5, q=1.0)
    assert a == b
    fg, _ = grid_best(w, 3.0, 0.2, 1.5, 1.0)
    assert a.f_value <= fg + 1e-3 * abs(fg)
    c = closed_form_allocation(w, 3.0, 0.2, 1.5)
    d = numerical_allocation(w, 3.0, 0.2, 1.5)
    assert c.f_value == pytest.approx(d.f_value, rel=1e-3)


def test_delay_dominant_weights_reach_max_rate_face():
    w = WeightVector(0.005, 0.005, 0.99)
    oa = numerical_allocation(w, 0.5, 0.5, 0.5, q=2.0)
    fg, xg = grid_best(w, 0.5, 0.5, 0.5, 2.0)
    assert oa.alloc.total == pytest.approx(1.0, abs=1e-9)
    assert oa.f_value <= fg


def test_optimal_delay_examples():
    q = optimal_delay_from(EQ, 1, 1, 9)
    assert q == pytest.approx(2 / (1 + math.log2(6)), rel=1e-12)
    assert optimal_delay_from(AllocationFactors(0.5, 0.5, 0.0), 1, 1, 9) == pytest.approx(2 / (1 + math.log2(2)))
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.dirichlet(np.ones(4))[:3]
        a = AllocationFactors.from_array(x)
        H, G, P = rng.uniform(0.1, 5, 3)
        assert optimal_delay_from(a, H, G, P) <= max(bit_time(a, H, G, P))


def test_optimal_energy_examples():
    assert optimal_energy_from(EQ, 1, 1, 2) == pytest.approx(4, rel=1e-12)
    assert optimal_energy_from(AllocationFactors(0, 0, 0), 1, 1, 2) == 0
    a = AllocationFactors(0.1, 0.3, 0.4)
    assert optimal_energy_from(a, 2.0, 0.7, 0.9) == pytest.approx(sum(bit_energy(a, 2.0, 0.7, 0.9)), rel=1e-12)


def test_optimal_accessors_on_result():
    oa = closed_form_allocation(W3, 1.0, 2.0, 1.0)
    assert optimal_delay(oa, 1.0, 2.0, 1.0) == oa.q_star
    assert optimal_energy(oa, 1.0, 2.0) == pytest.approx(oa.e_star)


def test_scale_covariance_of_q_star():
    w = WeightVector(0.3, 0.3, 0.4)
    qs = [closed_form_allocation(w, 1.0, 0.5, P).q_star for P in (0.5, 1.0, 2.0, 4.0)]
    assert all(b <= a + 1e-12 for a, b in zip(qs, qs[1:]))


def test_pareto_mask():
    m = pareto_mask([1, 2, 3, 2], [3, 2, 1, 3])
    assert m.tolist() == [True, True, True, False]


def test_tradeoff_sweep_cardinality_and_front():
    grid = [WeightVector((1 - r) / 2, (1 - r) / 2, r) for r in (0.1, 0.3, 0.5, 0.7, 0.9)]
    pts = tradeoff_sweep(grid, 1.0, 1.0, 20.0)
    assert len(pts) == len(grid)
    front = sorted((p for p in pts if p.pareto), key=lambda p: p.q_star)
    assert all(b.e_star <= a.e_star for a, b in zip(front, front[1:]))
    with pytest.raises(ValueError):
        tradeoff_sweep([], 1, 1, 1)
