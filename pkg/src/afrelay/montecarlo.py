"""Sample-level simulation of the two-way AF link with BPSK symbols.

Every sample consumes a fixed block of a counter-based random stream keyed
by (seed, sample index), and samples are processed in fixed-size chunks
whose integer error counts are merged in chunk order.  Results are therefore
bit-identical for any thread count.  The two kernel backends give the same
error counts; their SNR sums can differ in the last bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from ._fallback import _gauss_pair, uniforms
from .ber import optimal_ber, optimal_snr
from .channel import ChannelParams, NodePowers
from .energy import AllocationFactors
from .geometry import LinkGeometry

CHUNK = 1 << 15
Z95 = 1.959963984540054


@dataclass(frozen=True)
class TrialConfig:
    samples: int = 100_000
    seed: int = 0
    mode: str = "NLOS"
    modulation: str = "BPSK"

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.mode not in ("LOS", "NLOS"):
            raise ValueError(f"mode must be LOS or NLOS, got {self.mode!r}")
        if self.modulation != "BPSK":
            raise ValueError("only BPSK is simulated")


@dataclass(frozen=True)
class EmpiricalResult:
    ber_a: float
    ber_b: float
    mean_snr_a: float
    mean_snr_b: float
    ci_halfwidth: float
    samples: int
    errors_a: int
    errors_b: int


def binomial_ci(p: float, n: int) -> float:
    """95% normal-approximation half-width."""
    return Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def draw_channels(seed: int, count: int, first: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Unit mean-square CN(0, 1) coefficients (h, g), same stream as the simulator."""
    u = uniforms(seed, first, count)
    hr, hi = _gauss_pair(u[:, 0], u[:, 1])
    gr, gi = _gauss_pair(u[:, 2], u[:, 3])
    s = math.sqrt(0.5)
    return (hr + 1j * hi) * s, (gr + 1j * gi) * s


def _chunks(n: int):
    return [(i, min(CHUNK, n - i)) for i in range(0, n, CHUNK)]


def _run(fn, blocks, threads):
    if threads <= 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map preserves block order
        return list(pool.map(fn, blocks))


def simulate_two_hop(tc: TrialConfig, alloc: AllocationFactors, geometry: LinkGeometry,
                     params: ChannelParams, noise_var: float | None = None,
                     threads: int = 1, backend: str | None = None) -> EmpiricalResult:
    """Empirical BER and mean SNR at both end nodes.

    Powers are alpha * total_power.  ``noise_var`` overrides the channel
    noise variance (0 gives the noise-free limit).
    """
    k = kernels.get(backend)
    nv = params.noise_var if noise_var is None else float(noise_var)
    if nv < 0:
        raise ValueError("noise variance must be non-negative")
    powers = NodePowers.from_allocation(alloc, params.total_power)
    ple = params.path_loss_exp
    amp_a = geometry.d_a ** (-ple / 2.0)
    amp_b = geometry.d_b ** (-ple / 2.0)
    # fading variance gamma * sigma^2 keeps the mean gain per unit noise at gamma
    ref = params.noise_var
    sig_h = math.sqrt(params.gamma_a * ref / 2.0)
    sig_g = math.sqrt(params.gamma_b * ref / 2.0)
    los = tc.mode == "LOS"
    direct = math.sqrt(params.gamma_ab) * geometry.d ** (-ple / 2.0) if los else 0.0
    noise_std = math.sqrt(nv / 2.0)

    def block(b):
        first, count = b
        return k.twoway_af_counts(tc.seed, first, count, amp_a, amp_b, sig_h, sig_g,
                                  powers.p_a, powers.p_b, powers.p_R, noise_std, los, direct, direct)

    parts = _run(block, _chunks(tc.samples), threads)
    ea = sum(p[0] for p in parts)
    eb = sum(p[1] for p in parts)
    sa = math.fsum(p[2] for p in parts)
    sb = math.fsum(p[3] for p in parts)
    n = tc.samples
    ba, bb = ea / n, eb / n
    return EmpiricalResult(ba, bb, sa / n, sb / n, max(binomial_ci(ba, n), binomial_ci(bb, n)), n, ea, eb)


def simulate_single_hop(tc: TrialConfig, mean_snr: float, threads: int = 1,
                        backend: str | None = None) -> EmpiricalResult:
    """Rayleigh BPSK over a single hop (relay bypassed)."""
    k = kernels.get(backend)
    parts = _run(lambda b: k.single_hop_counts(tc.seed, b[0], b[1], mean_snr), _chunks(tc.samples), threads)
    e = sum(parts)
    p = e / tc.samples
    return EmpiricalResult(p, p, mean_snr, mean_snr, binomial_ci(p, tc.samples), tc.samples, e, e)


class Comparison(NamedTuple):
    label: object
    ber_analytic: float
    ber_mc: float
    mc_ci: float
    rel_error: float
    gamma_star: float
    valid: bool


def empirical_vs_analytic(points: Sequence[tuple], low_ber: float = 1e-4,
                          low_snr: float = 10.0) -> list[Comparison]:
    """Pair analytic and empirical BER.

    Each point is (label, allocation, H, G, P, EmpiricalResult).  The
    empirical figure is the mean of the two end nodes.  ``valid`` is False
    where the analytic law is outside its regime (BER below ``low_ber`` or
    optimal SNR below ``low_snr``).
    """
    out = []
    for label, oa, H, G, P, res in points:
        ana = optimal_ber(oa, H, G, P)
        g = optimal_snr(oa, H, G, P)
        mc = 0.5 * (res.ber_a + res.ber_b)
        rel = abs(ana - mc) / mc if mc > 0 else math.inf
        out.append(Comparison(label, ana, mc, res.ci_halfwidth, rel, g, ana >= low_ber and g >= low_snr))
    return out


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    lx = np.log10(np.asarray(x, dtype=float))
    ly = np.log10(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
