"""Optimal SNR and BPSK bit error rate of the optimised two-hop link.

The end-to-end SNR of the cascade behaves like the harmonic mean of the two
hop SNRs.  For Rayleigh hops its density has a Bessel form; at small
arguments it collapses to an exponential with rate 1/gamma_hp + 1/gamma_gp,
which is what the BER estimate integrates against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate, special

from .energy import AllocationFactors

LOW_SNR_THRESHOLD = 10.0


@dataclass(frozen=True)
class CascadeStats:
    gamma_hp: float
    gamma_gp: float

    def __post_init__(self):
        if not (self.gamma_hp > 0 and self.gamma_gp > 0):
            raise ValueError("hop SNRs must be positive")

    @property
    def rate(self) -> float:
        return 1.0 / self.gamma_hp + 1.0 / self.gamma_gp

    @classmethod
    def from_allocation(cls, a: AllocationFactors, H: float, G: float, P: float) -> "CascadeStats":
        """Per-hop means after allocation: alpha_r H P and alpha_r alpha_b G P / (alpha_r + alpha_a)."""
        if a.alpha_r + a.alpha_a <= 0:
            raise ValueError("zero allocation")
        return cls(a.alpha_r * H * P, a.alpha_r * a.alpha_b * G * P / (a.alpha_r + a.alpha_a))


class BerEstimate(NamedTuple):
    ber: float
    gamma_star: float
    low_snr: bool


def _alloc(oa) -> AllocationFactors:
    return oa.alloc if hasattr(oa, "alloc") else oa


def optimal_snr(oa, H: float, G: float, P: float) -> float:
    """Harmonic combination of the two weighted hop SNRs; 0.0 for a zero allocation."""
    a = _alloc(oa)
    t_a = (a.alpha_r + 2.0 * a.alpha_a) * H * P
    t_b = (a.alpha_r + 2.0 * a.alpha_b) * G * P
    if t_a <= 0 or t_b <= 0:
        return 0.0
    return 1.0 / (1.0 / t_a + 1.0 / t_b)


def hop_pdfs(cs: CascadeStats, eta):
    """Exponential densities of the two hop SNRs."""
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("eta must be non-negative")
    return (np.exp(-eta / cs.gamma_hp) / cs.gamma_hp, np.exp(-eta / cs.gamma_gp) / cs.gamma_gp)


def cascade_pdf(cs: CascadeStats, eta, simplified: bool = False):
    """Density of the harmonic-mean SNR.

    Full form:
        2 eta exp(-eta r) [ 2/(g1 g2) K0(z) + (g1+g2)/(g1 g2)^{3/2} K1(z) ],
        z = 2 eta / sqrt(g1 g2), r = 1/g1 + 1/g2.
    ``simplified`` uses r exp(-eta r).  eta = 0 in the full form returns the
    left limit, which is the simplified value r.
    """
    eta_arr = np.asarray(eta, dtype=float)
    if np.any(eta_arr < 0):
        raise ValueError("eta must be non-negative")
    r = cs.rate
    if simplified:
        return r * np.exp(-eta_arr * r)
    g1, g2 = cs.gamma_hp, cs.gamma_gp
    prod = g1 * g2
    out = np.empty_like(eta_arr)
    zero = eta_arr == 0
    out[zero] = r
    e = eta_arr[~zero]
    z = 2.0 * e / math.sqrt(prod)
    # scaled Bessel functions keep exp(-eta r) * K(z) finite for large eta
    damp = np.exp(-e * r - z)
    out[~zero] = 2.0 * e * damp * (2.0 / prod * special.k0e(z) + (g1 + g2) / prod**1.5 * special.k1e(z))
    return out if out.ndim else float(out)


def cascade_cdf(cs: CascadeStats, eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("eta must be non-negative")
    return -np.expm1(-eta * cs.rate)


def cdf_first_order(cs: CascadeStats, eta):
    """Linear term of the CDF for small eta."""
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("eta must be non-negative")
    return eta * cs.rate


def optimal_ber(oa, H: float, G: float, P: float) -> float:
    """Closed-form BER at the optimal allocation.

    (Gamma(3/2) / (alpha_r P sqrt(pi))) * (1/((alpha_r + 2 alpha_a) H) + 1/((alpha_r + 2 alpha_b) G)),
    where Gamma(3/2)/sqrt(pi) = 1/2.  A high-SNR estimate; see ``optimal_ber_flagged``.
    """
    a = _alloc(oa)
    t_a = (a.alpha_r + 2.0 * a.alpha_a) * H
    t_b = (a.alpha_r + 2.0 * a.alpha_b) * G
    if a.alpha_r <= 0 or t_a <= 0 or t_b <= 0 or P <= 0:
        raise ValueError("zero allocation")
    prefactor = math.gamma(1.5) / math.sqrt(math.pi)
    return prefactor / (a.alpha_r * P) * (1.0 / t_a + 1.0 / t_b)


def optimal_ber_flagged(oa, H: float, G: float, P: float) -> BerEstimate:
    g = optimal_snr(oa, H, G, P)
    return BerEstimate(optimal_ber(oa, H, G, P), g, g < LOW_SNR_THRESHOLD)


def ber_from_cdf(cdf, upper: float = math.inf) -> float:
    """BPSK BER by the Q-function integral: int_0^inf e^{-x}/(2 sqrt(pi x)) F(x) dx."""

    def integrand(t):
        # x = t^2 removes the 1/sqrt(x) singularity
        x = t * t
        return math.exp(-x) / math.sqrt(math.pi) * float(cdf(x))

    val, _ = integrate.quad(integrand, 0.0, math.sqrt(upper) if math.isfinite(upper) else math.inf,
                            epsabs=1e-14, epsrel=1e-11, limit=200)
    return val


def cascade_ber(cs: CascadeStats, first_order: bool = True) -> float:
    """BER of BPSK over the cascade, via the first-order or the full CDF."""
    if first_order:
        return ber_from_cdf(lambda x: cdf_first_order(cs, x))
    return ber_from_cdf(lambda x: cascade_cdf(cs, x))


class Algorithm3Row(NamedTuple):
    weight: object
    gamma_star: float
    cascade: CascadeStats
    ber_pipeline: float
    ber_closed: float
    low_snr: bool


def algorithm3_pipeline(allocations: Sequence, H: float, G: float, P: float) -> list[Algorithm3Row]:
    """Per weight: optimal SNR, hop statistics, first-order CDF, then BER.

    ``allocations`` holds optimiser results (anything with ``alloc`` and
    optionally ``weight``).  Both the integrated pipeline value and the
    closed-form value are reported.
    """
    rows = []
    for oa in allocations:
        a = _alloc(oa)
        g = optimal_snr(a, H, G, P)
        cs = CascadeStats.from_allocation(a, H, G, P)
        rows.append(Algorithm3Row(getattr(oa, "weight", None), g, cs, cascade_ber(cs),
                                  optimal_ber(a, H, G, P), g < LOW_SNR_THRESHOLD))
    return rows


def single_hop_rayleigh_ber(snr: float) -> float:
    """Exact BPSK BER over one Rayleigh hop: (1 - sqrt(s / (1 + s))) / 2."""
    return 0.5 * (1.0 - math.sqrt(snr / (1.0 + snr)))
