"""NumPy implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them loop by loop.
Both use the same counter-based random stream so a given seed produces the
same draws under either backend.
"""

from __future__ import annotations

import math

import numpy as np

from .objective import objective_values

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

# random values consumed per Monte Carlo sample
STREAMS = 12


def splitmix64(x: np.ndarray) -> np.ndarray:
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, first: int, count: int) -> np.ndarray:
    """(count, STREAMS) uniforms in (0, 1) for samples first..first+count-1."""
    idx = np.arange(first, first + count, dtype=np.uint64)[:, None] * np.uint64(STREAMS)
    ctr = idx + np.arange(STREAMS, dtype=np.uint64)[None, :]
    key = splitmix64(np.full(1, seed, dtype=np.uint64))[0]
    bits = splitmix64(ctr ^ key)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


def _gauss_pair(u1, u2):
    # Box-Muller; unit variance per component
    rad = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * math.pi * u2
    return rad * np.cos(ang), rad * np.sin(ang)


def twoway_af_counts(seed, first, count, amp_a, amp_b, sig_h, sig_g, p_a, p_b, p_r,
                     noise_std, los, direct_a, direct_b):
    """Error counts and SNR sums for a block of two-way AF samples.

    ``amp_a``/``amp_b`` are the path amplitudes d^(-ple/2); ``sig_h``/``sig_g``
    the per-component std of the fading coefficients; ``noise_std`` the
    per-component noise std; ``direct_*`` the direct-path amplitudes used in
    LOS mode. Returns (errors_a, errors_b, snr_sum_a, snr_sum_b).
    """
    u = uniforms(seed, first, count)
    hr, hi = _gauss_pair(u[:, 0], u[:, 1])
    gr, gi = _gauss_pair(u[:, 2], u[:, 3])
    nrr, nri = _gauss_pair(u[:, 4], u[:, 5])
    nar, nai = _gauss_pair(u[:, 6], u[:, 7])
    nbr, nbi = _gauss_pair(u[:, 8], u[:, 9])
    xa = np.where(u[:, 10] < 0.5, -1.0, 1.0)
    xb = np.where(u[:, 11] < 0.5, -1.0, 1.0)

    h = (hr + 1j * hi) * sig_h
    g = (gr + 1j * gi) * sig_g
    n_r = (nrr + 1j * nri) * noise_std
    n_a = (nar + 1j * nai) * noise_std
    n_b = (nbr + 1j * nbi) * noise_std
    noise_var = 2.0 * noise_std * noise_std

    ha = h * amp_a
    gb = g * amp_b
    sa = math.sqrt(p_a)
    sb = math.sqrt(p_b)
    y_r = sa * xa * ha + sb * xb * gb + n_r
    den = np.abs(ha) ** 2 * p_a + np.abs(gb) ** 2 * p_b + noise_var
    beta = np.sqrt(np.divide(p_r, den, out=np.zeros_like(den), where=den > 0))

    # each user removes its own echo through the relay
    y_a = ha * beta * y_r - ha * beta * ha * sa * xa + n_a
    y_b = gb * beta * y_r - gb * beta * gb * sb * xb + n_b
    coef_a = ha * beta * gb * sb
    coef_b = gb * beta * ha * sa
    if los:
        gh = g * h
        y_a = y_a + sb * xb * gb + 2.0 * sb * xb * gh * direct_a
        y_b = y_b + sa * xa * ha + 2.0 * sa * xa * gh * direct_b
        coef_a = coef_a + sb * gb + 2.0 * sb * gh * direct_a
        coef_b = coef_b + sa * ha + 2.0 * sa * gh * direct_b

    dec_a = np.where(np.real(np.conj(coef_a) * y_a) >= 0.0, 1.0, -1.0)
    dec_b = np.where(np.real(np.conj(coef_b) * y_b) >= 0.0, 1.0, -1.0)
    err_a = int(np.count_nonzero(dec_a != xb))
    err_b = int(np.count_nonzero(dec_b != xa))

    noise_a = (np.abs(ha * beta) ** 2 + 1.0) * noise_var
    noise_b = (np.abs(gb * beta) ** 2 + 1.0) * noise_var
    if noise_var > 0:
        snr_a = float(np.sum(np.abs(coef_a) ** 2 / noise_a))
        snr_b = float(np.sum(np.abs(coef_b) ** 2 / noise_b))
    else:
        snr_a = snr_b = math.inf
    return err_a, err_b, snr_a, snr_b


def single_hop_counts(seed, first, count, snr):
    """Errors of coherent BPSK over one Rayleigh hop at mean SNR ``snr``."""
    u = uniforms(seed, first, count)
    hr, hi = _gauss_pair(u[:, 0], u[:, 1])
    nr, ni = _gauss_pair(u[:, 2], u[:, 3])
    x = np.where(u[:, 4] < 0.5, -1.0, 1.0)
    h = (hr + 1j * hi) * math.sqrt(0.5 * snr)
    n = (nr + 1j * ni) * math.sqrt(0.5)
    y = h * x + n
    dec = np.where(np.real(np.conj(h) * y) >= 0.0, 1.0, -1.0)
    return int(np.count_nonzero(dec != x))


def grid_min(w, H, G, P, q, n):
    """Best objective over the lattice alpha = (i, j, k)/n with i + j + k <= n.

    Returns (f_min, i, j, k); lattice points on the boundary give inf.
    """
    best = (math.inf, 0, 0, 0)
    step = 1.0 / n
    for i in range(1, n + 1):
        # j, k >= 1 and i + j + k <= n
        jmax = n - i - 1
        if jmax < 1:
            break
        j, k = np.meshgrid(np.arange(1, jmax + 1), np.arange(1, jmax + 1), indexing="ij")
        mask = (j + k) <= (n - i)
        jj = j[mask]
        kk = k[mask]
        vals = objective_values(i * step, jj * step, kk * step, w, H, G, P, q)
        t = int(np.argmin(vals))
        if vals[t] < best[0]:
            best = (float(vals[t]), i, int(jj[t]), int(kk[t]))
    return best
