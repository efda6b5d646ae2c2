"""SNR, capacity and rate models for the two-way amplify-and-forward link."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .energy import AllocationFactors
from .geometry import LinkGeometry, PolarPosition, hop_distances


@dataclass(frozen=True)
class ChannelParams:
    """Mean gains are per unit noise: gamma_a = E|h|^2 / noise_var."""

    gamma_a: float = 1.0
    gamma_b: float = 1.0
    gamma_ab: float = 0.0
    path_loss_exp: float = 2.0
    noise_var: float = 1.0
    total_power: float = 2.0
    rate_efficiency: float = 1.0

    def __post_init__(self):
        if not 2.0 <= self.path_loss_exp <= 4.0:
            raise ValueError(f"path-loss exponent {self.path_loss_exp} outside [2, 4]")
        if not self.noise_var > 0:
            raise ValueError("noise variance must be positive")
        if not self.total_power > 0:
            raise ValueError("total power budget must be positive")
        if not 0.0 < self.rate_efficiency <= 1.0:
            raise ValueError("rate efficiency must lie in (0, 1]")
        if min(self.gamma_a, self.gamma_b, self.gamma_ab) < 0:
            raise ValueError("channel gains must be non-negative")


@dataclass(frozen=True)
class NodePowers:
    p_a: float
    p_b: float
    p_R: float

    def __post_init__(self):
        if min(self.p_a, self.p_b, self.p_R) < 0:
            raise ValueError("node powers must be non-negative")

    @classmethod
    def from_allocation(cls, a: AllocationFactors, total_power: float) -> "NodePowers":
        return cls(total_power * a.alpha_a, total_power * a.alpha_b, total_power * a.alpha_r)

    @property
    def total(self) -> float:
        return self.p_a + self.p_b + self.p_R


class SnrPair(NamedTuple):
    snr_a: float
    snr_b: float


def effective_gains(c: ChannelParams, g: LinkGeometry) -> tuple[float, float]:
    """(H, G): mean per-noise gain times path loss on each hop."""
    H = c.gamma_a * g.d_a ** (-c.path_loss_exp)
    G = c.gamma_b * g.d_b ** (-c.path_loss_exp)
    return H, G


def amplification_factor(c: ChannelParams, g: LinkGeometry, p: NodePowers) -> float:
    ple = c.path_loss_exp
    h2 = c.gamma_a * c.noise_var
    g2 = c.gamma_b * c.noise_var
    den = h2 * g.d_a ** -ple * p.p_a + g2 * g.d_b ** -ple * p.p_b + c.noise_var
    if not den > 0:
        raise ValueError("relay input power must be positive")
    return math.sqrt(p.p_R / den)


def _relayed_snrs(c: ChannelParams, g: LinkGeometry, p: NodePowers) -> SnrPair:
    la = c.gamma_a * g.d_a ** -c.path_loss_exp
    lb = c.gamma_b * g.d_b ** -c.path_loss_exp
    num = p.p_R * la * lb
    snr_a = num * p.p_b / ((p.p_R + p.p_a) * la + p.p_b * lb + 1.0)
    snr_b = num * p.p_a / (p.p_a * la + (p.p_R + p.p_b) * lb + 1.0)
    return SnrPair(snr_a, snr_b)


def snr_exact_nlos(c: ChannelParams, g: LinkGeometry, p: NodePowers) -> SnrPair:
    """Exact relayed-only SNRs at S_a and S_b (direct link blocked)."""
    return _relayed_snrs(c, g, p)


def snr_exact_los(c: ChannelParams, g: LinkGeometry, p: NodePowers) -> SnrPair:
    """Relayed SNR plus the additive direct-link term.

    The direct term scales with p_R as in the published expression, so it
    vanishes together with the relayed term when the relay is silent.
    """
    base = _relayed_snrs(c, g, p)
    if c.gamma_ab == 0:
        return base
    ple = c.path_loss_exp
    direct_a = p.p_R * p.p_b * c.gamma_ab * g.d_b ** -ple
    direct_b = p.p_R * p.p_a * c.gamma_ab * g.d_a ** -ple
    return SnrPair(base.snr_a + direct_a, base.snr_b + direct_b)


def snr_high_from_gains(a: AllocationFactors, H: float, G: float, P: float) -> SnrPair:
    num = P * a.alpha_r * H * G
    den_a = (a.alpha_r + a.alpha_a) * H + a.alpha_b * G
    den_b = a.alpha_a * H + (a.alpha_r + a.alpha_b) * G
    snr_a = num * a.alpha_b / den_a if den_a > 0 else 0.0
    snr_b = num * a.alpha_a / den_b if den_b > 0 else 0.0
    return SnrPair(snr_a, snr_b)


def snr_high(c: ChannelParams, g: LinkGeometry, a: AllocationFactors) -> SnrPair:
    """High-SNR form: the +1 noise term in the denominators is dropped."""
    H, G = effective_gains(c, g)
    return snr_high_from_gains(a, H, G, c.total_power)


def capacity(snr: SnrPair) -> float:
    """Two-way capacity 0.5*log2(1 + phi) with phi = (1 + snr_a)(1 + snr_b)."""
    phi = 1.0 + snr.snr_a + snr.snr_b + snr.snr_a * snr.snr_b
    return 0.5 * math.log2(1.0 + phi)


def sum_rate(snr: SnrPair) -> float:
    """Total two-way rate 0.5*(log2(1 + snr_a) + log2(1 + snr_b))."""
    return 0.5 * (math.log2(1.0 + snr.snr_a) + math.log2(1.0 + snr.snr_b))


def rate(snr: SnrPair, efficiency: float = 1.0) -> float:
    if not 0.0 < efficiency <= 1.0:
        raise ValueError("rate efficiency must lie in (0, 1]")
    return efficiency * capacity(snr)


def causality_check(per_slot_rates: Sequence[float]) -> bool:
    """Information causality: what is forwarded up to slot n was received by n-1."""
    rates = list(per_slot_rates)
    if len(rates) < 2:
        raise ValueError("causality needs at least two slots")
    forwarded = 0.0
    received = 0.0
    for n in range(1, len(rates)):
        forwarded += rates[n]
        received += rates[n - 1]
        if forwarded > received:
            return False
    return True


class SlotSnr(NamedTuple):
    slot: int
    geometry: LinkGeometry
    powers: NodePowers
    snr: SnrPair


def algorithm1_snr_pipeline(d: float, positions: Sequence[PolarPosition], c: ChannelParams,
                            allocations: AllocationFactors | Sequence[AllocationFactors]) -> list[SlotSnr]:
    """Per-slot SNR: hop distances, then power split, then the high-SNR form."""
    if isinstance(allocations, AllocationFactors):
        allocations = [allocations] * len(positions)
    if len(allocations) != len(positions):
        raise ValueError("one allocation per slot position is required")
    out = []
    for n, (pos, alloc) in enumerate(zip(positions, allocations), start=1):
        geo = hop_distances(d, pos)
        powers = NodePowers.from_allocation(alloc, c.total_power)
        out.append(SlotSnr(n, geo, powers, snr_high(c, geo, alloc)))
    return out
