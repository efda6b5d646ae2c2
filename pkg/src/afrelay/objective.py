"""Scalarised energy/delay objective with exact first and second derivatives.

The objective at a pinned per-bit time ``q`` is

    F(x) = K(q) * (w_a * D_a(x) + w_b * D_b(x)) + w_r * (Q(S_a(x)) + Q(S_b(x)))

with x = (alpha_a, alpha_b, alpha_r), K(q) = q(2^(2/q) - 1),
D_a = (alpha_r + alpha_a) H + alpha_b G, D_b = alpha_a H + (alpha_r + alpha_b) G,
S_a = P H G alpha_r alpha_b / D_a, S_b = P H G alpha_r alpha_a / D_b and
Q(S) = 2 / log2(1 + S).
"""

from __future__ import annotations

import math

import numpy as np

from .energy import energy_factor

LN2 = math.log(2.0)

# Hessians of the bilinear numerators alpha_b*alpha_r and alpha_a*alpha_r
_HESS_NA = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
_HESS_NB = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])


def weights_tuple(w) -> tuple[float, float, float]:
    if hasattr(w, "w_a"):
        return float(w.w_a), float(w.w_b), float(w.w_r)
    wa, wb, wr = w
    return float(wa), float(wb), float(wr)


def objective_values(xa, xb, xr, w, H, G, P, q):
    """Vectorised objective; inf wherever a delay is unbounded."""
    wa, wb, wr = weights_tuple(w)
    k = energy_factor(q)
    c = P * H * G
    da = H * (xr + xa) + G * xb
    db = H * xa + G * (xr + xb)
    with np.errstate(divide="ignore", invalid="ignore"):
        sa = np.where(da > 0, c * xb * xr / da, 0.0)
        sb = np.where(db > 0, c * xa * xr / db, 0.0)
        delay = 2.0 * LN2 * (1.0 / np.log1p(sa) + 1.0 / np.log1p(sb))
    return k * (wa * da + wb * db) + wr * delay


def _paths(x, H, G, P):
    """(S, grad S, hess S, u) for the S_a and S_b paths."""
    xa, xb, xr = x
    c = P * H * G
    ua = np.array([H, G, H])
    ub = np.array([H, G, G])
    out = []
    for num, gnum, hnum, u in (
        (xb * xr, np.array([0.0, xr, xb]), _HESS_NA, ua),
        (xa * xr, np.array([xr, 0.0, xa]), _HESS_NB, ub),
    ):
        den = float(u @ x)
        s = c * num / den
        gs = c * (gnum * den - num * u) / den**2
        hs = c * (hnum / den - (np.outer(gnum, u) + np.outer(u, gnum)) / den**2
                  + 2.0 * num * np.outer(u, u) / den**3)
        out.append((s, gs, hs, u))
    return out


def _delay_derivs(s):
    lg = math.log1p(s)
    d1 = -2.0 * LN2 / ((1.0 + s) * lg * lg)
    d2 = 2.0 * LN2 * (lg + 2.0) / ((1.0 + s) ** 2 * lg**3)
    return d1, d2


def derivatives(x, w, H, G, P, q):
    """Gradient (3,), Hessian (3, 3) and the per-path Hessian pieces.

    Only valid for x strictly inside the positive orthant.
    """
    x = np.asarray(x, dtype=float)
    wa, wb, wr = weights_tuple(w)
    k = energy_factor(q)
    paths = _paths(x, H, G, P)
    grad = k * (wa * paths[0][3] + wb * paths[1][3])
    pieces = []
    for s, gs, hs, _ in paths:
        d1, d2 = _delay_derivs(s)
        grad = grad + wr * d1 * gs
        pieces.append(wr * (d2 * np.outer(gs, gs) + d1 * hs))
    return grad, pieces[0] + pieces[1], pieces
