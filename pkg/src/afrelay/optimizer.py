"""Weighted-sum minimisation of (E_a, E_b, q_a + q_b) over the allocation simplex.

The per-bit energy terms need a per-bit time ``q`` while ``q`` itself is an
output of the allocation.  Every solver here minimises the objective with
``q`` pinned and resolves the circularity with a damped fixed point
``q <- q + (mean(q_a, q_b) - q) / 2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .energy import (
    UNBOUNDED,
    AllocationFactors,
    bit_time_array,
    energy_factor,
    from_float,
)
from .objective import LN2, derivatives, objective_values, weights_tuple

log = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-9
FIXED_POINT_MAX_ITER = 1000
DAMPING = 0.5
_LOWER = 1e-12


class BoundaryPointError(ValueError):
    """Second-order quantities requested at a point with a zero allocation."""


@dataclass(frozen=True)
class WeightVector:
    w_a: float
    w_b: float
    w_r: float

    def __post_init__(self):
        for name in ("w_a", "w_b", "w_r"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name}={v} outside (0, 1]")
        if self.w_a + self.w_b + self.w_r > 1.0 + 1e-12:
            raise ValueError("weights must sum to at most 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w_a, self.w_b, self.w_r)


def default_weight_grid() -> list[WeightVector]:
    """w_r = 0.05, 0.10, ..., 0.90 with the remainder split evenly."""
    out = []
    for i in range(1, 19):
        wr = round(0.05 * i, 10)
        rest = (1.0 - wr) / 2.0
        out.append(WeightVector(rest, rest, wr))
    return out


@dataclass(frozen=True)
class OptimalAllocation:
    alloc: AllocationFactors
    q_star: float
    e_star: float
    f_value: float
    root_branch: str
    converged: bool
    iterations: int
    q_pin: float = math.nan
    details: dict = field(default_factory=dict, compare=False, repr=False)


class Gradient(NamedTuple):
    d_alpha_a: float
    d_alpha_b: float
    d_alpha_r: float
    one_sided: bool

    def as_array(self) -> np.ndarray:
        return np.array([self.d_alpha_a, self.d_alpha_b, self.d_alpha_r])


def _x(a) -> np.ndarray:
    if isinstance(a, AllocationFactors):
        return a.as_array()
    return np.asarray(a, dtype=float)


def _is_interior(x) -> bool:
    return bool(np.all(x > 0))


# --------------------------------------------------------------------------
# objective and derivatives


def scalarized_objective(a, w, H, G, P, q, q_model: str = "as-printed"):
    """w_a E_a + w_b E_b + w_r (q_a + q_b) at pinned per-bit time q.

    Returns ``UNBOUNDED`` when either delay is infinite.
    """
    x = _x(a)
    wa, wb, wr = weights_tuple(w)
    k = energy_factor(q)
    e_a = k * ((x[2] + x[0]) * H + x[1] * G)
    e_b = k * (x[0] * H + (x[2] + x[1]) * G)
    q_a, q_b = bit_time_array(x[0], x[1], x[2], H, G, P, q_model)
    f = wa * e_a + wb * e_b + wr * (float(q_a) + float(q_b))
    return from_float(f)


def trajectory_objective(allocs: Sequence, w, gains: Sequence[tuple[float, float]], P, q,
                         q_model: str = "as-printed"):
    """Objective summed over the forwarding slots n = 2..N."""
    if len(allocs) != len(gains):
        raise ValueError("one allocation per slot is required")
    total = 0.0
    for a, (H, G) in list(zip(allocs, gains))[1:]:
        f = scalarized_objective(a, w, H, G, P, q, q_model)
        if f is UNBOUNDED:
            return UNBOUNDED
        total += f
    return total


def gradient(a, w, H, G, P, q) -> Gradient:
    """Exact partial derivatives of the objective at pinned q."""
    x = _x(a)
    interior = _is_interior(x)
    if not interior:
        # one-sided: evaluate just inside the feasible set
        x = np.maximum(x, 1e-12)
    g, _, _ = derivatives(x, w, H, G, P, q)
    return Gradient(float(g[0]), float(g[1]), float(g[2]), not interior)


def hessian(a, w, H, G, P, q) -> np.ndarray:
    x = _x(a)
    if not _is_interior(x):
        raise BoundaryPointError("Hessian needs all allocation factors > 0")
    _, hess, _ = derivatives(x, w, H, G, P, q)
    return hess


def second_derivatives(a, w, H, G, P, q) -> np.ndarray:
    """Mixed partials (ab, br, ra) split by the S_a path and the S_b path.

    Row i holds the contribution of the S_a delay term (column 0) and the
    S_b delay term (column 1) to one mixed partial; the energy terms are
    linear and contribute nothing.
    """
    x = _x(a)
    if not _is_interior(x):
        raise BoundaryPointError("second derivatives need all allocation factors > 0")
    _, _, pieces = derivatives(x, w, H, G, P, q)
    pairs = ((0, 1), (1, 2), (2, 0))
    return np.array([[p[i, j] for p in pieces] for i, j in pairs])


def printed_gradient(a, w, H, G, P, q) -> np.ndarray:
    """The published first-order expressions, kept for comparison only.

    The delay parts there differentiate the SNRs rather than the delays,
    so this does not match the objective's finite differences.
    """
    xa, xb, xr = _x(a)
    wa, wb, wr = weights_tuple(w)
    k = energy_factor(q)
    da = xb * G + H * xr + H * xa
    db = xb * G + G * xr + H * xa
    d_a = k * H * (wa + wb) - wr * G * P * (xb * H * H * xr / da**2 + G * H * xr * (xb + xr) / db**2)
    d_b = k * G * (wa + wb) + wr * G * P * (H * H * xr * (xa + xr) / da**2 - xa * G * H * xr / db**2)
    d_r = k * H * (H * wa + G * wb) + wr * G * P * (
        xb * H * (xa * H + xb * G) / da**2 + xa * H * (xa * H + xb * G) / db**2)
    return np.array([d_a, d_b, d_r])


def bordered_hessian(a, w, H, G, P, q, border: str = "gradient") -> np.ndarray:
    """4x4 bordered matrix [[0, b^T], [b, Hess F]].

    ``border="gradient"`` uses grad F (the quasi-convexity arrangement);
    ``border="constraint"`` uses the budget constraint normal (1, 1, 1).
    """
    x = _x(a)
    if not _is_interior(x):
        raise BoundaryPointError("bordered Hessian needs an interior point")
    g, hess, _ = derivatives(x, w, H, G, P, q)
    if border == "gradient":
        b = g
    elif border == "constraint":
        b = np.ones(3)
    else:
        raise ValueError(f"unknown border {border!r}")
    out = np.zeros((4, 4))
    out[0, 1:] = b
    out[1:, 0] = b
    out[1:, 1:] = hess
    return out


def bordered_hessian_psd(a, w, H, G, P, q, trials: int = 10_000, seed: int = 0,
                         border: str = "gradient", tangent: bool = False) -> bool:
    """Check z^T H_b z >= -tol for random z, tol = 1e-9 * ||H_b|| * ||z||^2.

    With ``tangent=True`` directions are drawn from the null space of the
    border row (first component zero, rest orthogonal to the border vector),
    the classical bordered-Hessian second-order test.
    """
    hb = bordered_hessian(a, w, H, G, P, q, border)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((trials, 4))
    if tangent:
        b = hb[0, 1:]
        nb = np.linalg.norm(b)
        z[:, 0] = 0.0
        if nb > 0:
            u = b / nb
            z[:, 1:] -= np.outer(z[:, 1:] @ u, u)
    scale = np.linalg.norm(hb, 2)
    forms = np.einsum("ti,ij,tj->t", z, hb, z)
    tol = 1e-9 * scale * np.einsum("ti,ti->t", z, z)
    return bool(np.all(forms >= -tol))


# --------------------------------------------------------------------------
# projected-gradient and Newton solvers at pinned q


def _project(x: np.ndarray, lo: float = _LOWER) -> np.ndarray:
    """Euclidean projection onto {x >= lo, sum(x) <= 1}."""
    y = np.maximum(x, lo)
    if y.sum() <= 1.0:
        return y
    # project x - lo onto the simplex of radius 1 - 3 lo
    v = x - lo
    radius = 1.0 - lo * x.size
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - radius
    idx = np.arange(1, x.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0) + lo


def _f(x, w, H, G, P, q) -> float:
    return float(objective_values(x[0], x[1], x[2], w, H, G, P, q))


def _pgd(x0, w, H, G, P, q, max_iter=60, tol=1e-12):
    x = _project(np.asarray(x0, dtype=float))
    fx = _f(x, w, H, G, P, q)
    step = 1.0
    for _ in range(max_iter):
        g, _, _ = derivatives(x, w, H, G, P, q)
        gn = np.linalg.norm(g)
        if gn == 0 or not np.isfinite(gn):
            break
        t = step / gn
        while True:
            xn = _project(x - t * g)
            fn = _f(xn, w, H, G, P, q)
            if fn <= fx - 1e-4 * (g @ (x - xn)):
                break
            t *= 0.5
            if t * gn < 1e-16:
                return x, fx
        moved = np.linalg.norm(xn - x)
        step = min(2.0 * t * gn, 1.0)
        x, f_old, fx = xn, fx, fn
        if moved < 1e-13 or abs(f_old - fx) <= tol * max(1.0, abs(fx)):
            break
    return x, fx


def _modified_newton_step(g, hess):
    vals, vecs = np.linalg.eigh(hess)
    floor = 1e-10 * max(np.max(np.abs(vals)), 1e-300)
    vals = np.maximum(np.abs(vals), floor)
    return -vecs @ ((vecs.T @ g) / vals)


def _newton_interior(x0, w, H, G, P, q, max_iter=100):
    """Newton on the open region; returns None if it leaves sum(x) < 1."""
    x = np.array(x0, dtype=float)
    fx = _f(x, w, H, G, P, q)
    for _ in range(max_iter):
        g, hess, _ = derivatives(x, w, H, G, P, q)
        d = _modified_newton_step(g, hess)
        # fraction to the boundary of the positive orthant
        t = 1.0
        neg = d < 0
        if np.any(neg):
            t = min(1.0, 0.95 * float(np.min(-x[neg] / d[neg])))
        while t > 1e-14:
            xn = x + t * d
            fn = _f(xn, w, H, G, P, q)
            if fn <= fx + 1e-4 * t * (g @ d) or abs(fn - fx) <= 1e-15 * abs(fx):
                break
            t *= 0.5
        else:
            break
        if xn.sum() >= 1.0:
            return None
        done = np.max(np.abs(xn - x)) <= 1e-15 * max(1.0, np.max(np.abs(x)))
        x, fx = xn, fn
        if done:
            break
        if np.linalg.norm(g) <= 1e-13 * max(1.0, abs(fx)):
            break
    return x, fx


_FACE = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])


def _newton_face(x0, w, H, G, P, q, max_iter=100):
    """Newton on the face sum(x) = 1 in coordinates (alpha_a, alpha_b)."""
    y = np.array(x0[:2], dtype=float)
    s = y.sum()
    if s >= 1.0 or np.any(y <= 0):
        y = np.array([1 / 3, 1 / 3])

    def full(v):
        return np.array([v[0], v[1], 1.0 - v[0] - v[1]])

    fx = _f(full(y), w, H, G, P, q)
    for _ in range(max_iter):
        g3, h3, _ = derivatives(full(y), w, H, G, P, q)
        g = _FACE.T @ g3
        hess = _FACE.T @ h3 @ _FACE
        d = _modified_newton_step(g, hess)
        # keep alpha_a, alpha_b, alpha_r > 0
        t = 1.0
        rates = np.array([d[0], d[1], -d[0] - d[1]])
        vals = full(y)
        neg = rates < 0
        if np.any(neg):
            t = min(1.0, 0.95 * float(np.min(-vals[neg] / rates[neg])))
        while t > 1e-14:
            yn = y + t * d
            fn = _f(full(yn), w, H, G, P, q)
            if fn <= fx + 1e-4 * t * (g @ d) or abs(fn - fx) <= 1e-15 * abs(fx):
                break
            t *= 0.5
        else:
            break
        done = np.max(np.abs(yn - y)) <= 1e-15
        y, fx = yn, fn
        if done or np.linalg.norm(g) <= 1e-13 * max(1.0, abs(fx)):
            break
    return full(y), fx


def _polish(x0, w, H, G, P, q):
    """Best KKT point reachable from x0: face solution or interior solution."""
    face_x, face_f = _newton_face(x0, w, H, G, P, q)
    g, _, _ = derivatives(face_x, w, H, G, P, q)
    # the budget is binding only if spending more lowers the objective
    multiplier = -float(np.mean(g))
    best = (face_x, face_f)
    if multiplier < 0 or x0.sum() < 1.0 - 1e-9:
        start = x0 if x0.sum() < 1.0 - 1e-9 else 0.9 * face_x
        res = _newton_interior(start, w, H, G, P, q)
        if res is not None and res[1] < best[1]:
            best = res
    return best


def _starts() -> list[np.ndarray]:
    pts = []
    for i in range(1, 5):
        for j in range(1, 6 - i):
            k = 6 - i - j
            pts.append(np.array([i, j, k]) / 6.0)
    pts += [0.5 * p for p in pts[:6]]
    return pts[:16]


def _grid_incumbent(w, H, G, P, q, n=50):
    f, i, j, k = kernels.get().grid_min(weights_tuple(w), H, G, P, q, n)
    return np.array([i, j, k], dtype=float) / n, f


def minimize_pinned(w, H, G, P, q, x0=None):
    """Global minimiser of the objective at pinned q.

    Without ``x0`` this is the multistart search (16 fixed starts plus the
    coarse-lattice incumbent); with ``x0`` only a local polish from x0.
    """
    if x0 is not None:
        return _polish(np.asarray(x0, dtype=float), w, H, G, P, q)
    inc, _ = _grid_incumbent(w, H, G, P, q)
    best = (None, math.inf)
    for s in _starts() + [inc]:
        x, fx = _pgd(s, w, H, G, P, q)
        x, fx = _polish(x, w, H, G, P, q)
        if fx < best[1]:
            best = (x, fx)
    return best


# --------------------------------------------------------------------------
# closed form and the fixed point in q


def printed_closed_form_candidates(w, H, G, P, q) -> list[tuple[str, np.ndarray]]:
    """Both +/- roots of the published stationary-point expressions.

    Returns an empty list where the expressions are undefined (negative
    radicands, H = G).
    """
    wa, wb, wr = weights_tuple(w)
    k = energy_factor(q)
    if H == G:
        return []
    rad = k * (H - G) * (1.0 - wr) / (2.0 * H * G * P * wr)
    if rad < 0:
        return []
    root = math.sqrt(rad)
    psi_a = 2.0 * (G - H) * (1.0 - (k * (H - G) * wb / (2.0 * H * G * P * wr) - 1.0 / G) * (G - H))
    psi_b = (H - G) * root + 2.0 * G
    psi_c = G * root - G
    disc = psi_b * psi_b + 2.0 * psi_a * psi_c
    if disc < 0 or psi_a == 0:
        return []
    out = []
    for branch, sign in (("+", 1.0), ("-", -1.0)):
        xa = (psi_b + sign * math.sqrt(disc)) / psi_a
        xb = (xa * (H / G - 1.0) + 1.0) * root
        out.append((branch, np.array([xa, xb, 1.0 - xa - xb])))
    return out


def _feasible(x) -> bool:
    return bool(np.all(x > 0) and x.sum() <= 1.0 + 1e-12)


def stationarity_residual(x, w, H, G, P, q) -> float:
    """Relative KKT residual of the pinned-q problem at x."""
    g, _, _ = derivatives(np.asarray(x, dtype=float), w, H, G, P, q)
    if x.sum() >= 1.0 - 1e-9:
        # budget active: only tangential components must vanish
        mult = -float(np.mean(g))
        r = g + mult
        if mult < 0:
            r = g
    else:
        r = g
    scale = max(np.linalg.norm(g), _f(x, w, H, G, P, q), 1e-300)
    return float(np.linalg.norm(r) / scale)


def _pinned_step(w, H, G, P, q, x_prev):
    """One inner solve at pinned q: printed roots if they certify, else numerics."""
    cands = [(b, x) for b, x in printed_closed_form_candidates(w, H, G, P, q) if _feasible(x)]
    if x_prev is None:
        x_num, f_num = minimize_pinned(w, H, G, P, q)
    else:
        x_num, f_num = minimize_pinned(w, H, G, P, q, x0=x_prev)
    best_branch = None
    if cands:
        branch, x = min(cands, key=lambda c: _f(c[1], w, H, G, P, q))
        fx = _f(x, w, H, G, P, q)
        # a printed root is accepted only when it is as good as the numerical optimum
        if fx <= f_num + 1e-9 * abs(f_num) and stationarity_residual(x, w, H, G, P, q) < 1e-6:
            return x, branch, len(cands)
        best_branch = branch
    return x_num, ("fallback" if best_branch is None else f"fallback({best_branch})"), len(cands)


def _mean_q(x, H, G, P, q_model):
    q_a, q_b = bit_time_array(x[0], x[1], x[2], H, G, P, q_model)
    return 0.5 * (float(q_a) + float(q_b))


def _fixed_point(w, H, G, P, q_init, q_model, symmetric=False):
    q = float(q_init)
    x = None
    branch = "fallback"
    n_feasible = 0
    converged = False
    it = 0
    if not symmetric:
        # cheap warm start; the global multistart runs once q has settled
        x, _ = _grid_incumbent(w, H, G, P, q)
        x, _ = _polish(x, w, H, G, P, q)
    for it in range(1, FIXED_POINT_MAX_ITER + 1):
        x, branch, n_feasible = _pinned_step(w, H, G, P, q, x)
        if symmetric:
            m = 0.5 * (x[0] + x[1])
            x = np.array([m, m, x[2]])
            branch = "symmetric"
        q_new = _mean_q(x, H, G, P, q_model)
        if not math.isfinite(q_new):
            break
        delta = q_new - q
        q = q + DAMPING * delta
        if abs(delta) < FIXED_POINT_TOL * max(1.0, abs(q)):
            converged = True
            break
    if converged and not symmetric:
        # the warm-started polish is local; confirm globally at the final q
        x_glob, f_glob = minimize_pinned(w, H, G, P, q)
        if f_glob < _f(x, w, H, G, P, q) * (1.0 - 1e-9):
            log.info("multistart improved the warm-started fixed point; restarting from it")
            return _fixed_point_from(w, H, G, P, q, q_model, x_glob, it)
    return x, q, branch, converged, it, n_feasible


def _fixed_point_from(w, H, G, P, q, q_model, x, it0):
    converged = False
    it = it0
    branch = "fallback"
    n_feasible = 0
    while it < FIXED_POINT_MAX_ITER:
        it += 1
        x, branch, n_feasible = _pinned_step(w, H, G, P, q, x)
        q_new = _mean_q(x, H, G, P, q_model)
        delta = q_new - q
        q = q + DAMPING * delta
        if abs(delta) < FIXED_POINT_TOL * max(1.0, abs(q)):
            converged = True
            break
    return x, q, branch, converged, it, n_feasible


def _finish(x, q_pin, w, H, G, P, branch, converged, it, extra) -> OptimalAllocation:
    x = np.clip(x, 0.0, 1.0)
    if x.sum() > 1.0:
        x = x / x.sum()
    alloc = AllocationFactors.from_array(x)
    f = _f(x, w, H, G, P, q_pin)
    q_star = optimal_delay_from(alloc, H, G, P)
    e_star = optimal_energy_from(alloc, H, G, q_star)
    return OptimalAllocation(alloc, q_star, e_star, f, branch, converged, it, q_pin, extra)


def closed_form_allocation(w, H, G, P, q_init: float = 2.0, q_model: str = "as-printed") -> OptimalAllocation:
    """Stationary allocation from the published roots, with numerical fallback.

    Each fixed-point step evaluates both roots at the current q and keeps
    the feasible one with lower objective, provided it certifies as a
    stationary point; otherwise the step uses the numerical minimiser.
    H = G (where the roots degenerate) uses the symmetric limit
    alpha_a = alpha_b when the weights are symmetric too.
    """
    w = w if isinstance(w, WeightVector) else WeightVector(*w)
    symmetric = H == G and w.w_a == w.w_b
    x, q, branch, converged, it, n_feasible = _fixed_point(w, H, G, P, q_init, q_model, symmetric)
    extra = {"printed_roots_feasible": n_feasible}
    if not converged:
        log.warning("q fixed point did not converge after %d iterations", it)
    return _finish(x, q, w, H, G, P, branch, converged, it, extra)


def numerical_allocation(w, H, G, P, q: float | None = None, q_init: float = 2.0,
                         q_model: str = "as-printed") -> OptimalAllocation:
    """Independent numerical optimum: projected-gradient multistart.

    With ``q`` given the per-bit time is held there; otherwise the same
    damped fixed point as the closed form resolves it.
    """
    w = w if isinstance(w, WeightVector) else WeightVector(*w)
    if q is not None:
        x, _ = minimize_pinned(w, H, G, P, q)
        return _finish(x, q, w, H, G, P, "numerical", True, 1, {})
    qv = float(q_init)
    x = None
    converged = False
    it = 0
    for it in range(1, FIXED_POINT_MAX_ITER + 1):
        x, _ = minimize_pinned(w, H, G, P, qv, x0=x)
        q_new = _mean_q(x, H, G, P, q_model)
        if not math.isfinite(q_new):
            break
        delta = q_new - qv
        qv += DAMPING * delta
        if abs(delta) < FIXED_POINT_TOL * max(1.0, abs(qv)):
            converged = True
            break
    x, _ = minimize_pinned(w, H, G, P, qv)
    return _finish(x, qv, w, H, G, P, "numerical", converged, it, {})


# --------------------------------------------------------------------------
# optimal delay and energy


def _phi(alloc: AllocationFactors, H, G, P) -> float:
    xa, xb, xr = alloc.alpha_a, alloc.alpha_b, alloc.alpha_r
    with np.errstate(divide="ignore", invalid="ignore"):
        s1 = G * P * xr * xb / (xr + xa + xb * G / H)
        s2 = G * P * xr * xa / (xa + (xr + xb) * G / H)
    la = math.log2(1.0 + s1)
    lb = math.log2(1.0 + s2)
    return 1.0 + la + la * (1.0 + s2) + lb


def optimal_delay_from(alloc: AllocationFactors, H, G, P) -> float:
    phi = _phi(alloc, H, G, P)
    if not math.isfinite(phi):
        raise ValueError("non-finite Phi")
    return 2.0 / (1.0 + math.log2(1.0 + phi))


def optimal_delay(oa: OptimalAllocation, H, G, P) -> float:
    """q* = 2 / (1 + log2(1 + Phi)) at the optimal allocation."""
    return optimal_delay_from(oa.alloc, H, G, P)


def optimal_energy_from(alloc: AllocationFactors, H, G, q_star: float) -> float:
    k = energy_factor(q_star)
    return k * ((alloc.alpha_r + 2.0 * alloc.alpha_a) * H + (alloc.alpha_r + 2.0 * alloc.alpha_b) * G)


def optimal_energy(oa: OptimalAllocation, H, G) -> float:
    return optimal_energy_from(oa.alloc, H, G, oa.q_star)


# --------------------------------------------------------------------------
# trade-off sweep


@dataclass(frozen=True)
class TradeoffPoint:
    weight: WeightVector
    alloc: AllocationFactors
    e_a: float
    e_b: float
    q_a: object
    q_b: object
    f_value: float
    q_star: float
    e_star: float
    snr_star: float
    ber: float
    root_branch: str
    converged: bool
    pareto: bool = False


def pareto_mask(q: Sequence[float], e: Sequence[float]) -> np.ndarray:
    """True for points not dominated in (q, E), both minimised."""
    q = np.asarray(q, dtype=float)
    e = np.asarray(e, dtype=float)
    n = q.size
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        dominated = (q <= q[i]) & (e <= e[i]) & ((q < q[i]) | (e < e[i]))
        if np.any(dominated):
            mask[i] = False
    return mask


def tradeoff_sweep(weights: Sequence[WeightVector], H, G, P, q_model: str = "as-printed",
                   solver=None) -> list[TradeoffPoint]:
    """One trade-off point per weight vector; Pareto membership as a flag."""
    from .ber import optimal_ber, optimal_snr
    from .energy import bit_energy, bit_time

    if not weights:
        raise ValueError("weight grid is empty")
    solver = solver or closed_form_allocation
    rows = []
    for w in weights:
        oa = solver(w, H, G, P, q_model=q_model)
        e_a, e_b = bit_energy(oa.alloc, H, G, oa.q_pin)
        q_a, q_b = bit_time(oa.alloc, H, G, P, q_model)
        rows.append(TradeoffPoint(w, oa.alloc, e_a, e_b, q_a, q_b, oa.f_value, oa.q_star,
                                  oa.e_star, optimal_snr(oa, H, G, P), optimal_ber(oa, H, G, P),
                                  oa.root_branch, oa.converged))
    mask = pareto_mask([r.q_star for r in rows], [r.e_star for r in rows])
    return [TradeoffPoint(**{**r.__dict__, "pareto": bool(m)}) for r, m in zip(rows, mask)]


def grid_best(w, H, G, P, q, step: float = 0.005, backend: str | None = None):
    """Exhaustive lattice oracle: (F, allocation) at the best lattice point."""
    n = int(round(1.0 / step))
    f, i, j, k = kernels.get(backend).grid_min(weights_tuple(w), H, G, P, q, n)
    return f, np.array([i, j, k], dtype=float) / n


__all__ = [
    "UNBOUNDED",
    "WeightVector",
    "OptimalAllocation",
    "TradeoffPoint",
    "scalarized_objective",
    "trajectory_objective",
    "gradient",
    "hessian",
    "second_derivatives",
    "printed_gradient",
    "bordered_hessian",
    "bordered_hessian_psd",
    "printed_closed_form_candidates",
    "closed_form_allocation",
    "numerical_allocation",
    "optimal_delay",
    "optimal_energy",
    "tradeoff_sweep",
    "pareto_mask",
    "grid_best",
    "default_weight_grid",
    "LN2",
]
