# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Monte Carlo link simulation and lattice objective search.

Loop-for-loop twins of the NumPy versions in ``_fallback.py``; same random
stream, same decision rule.
"""

from libc.math cimport log, log1p, expm1, sqrt, cos, sin, INFINITY, M_PI
from libc.stdint cimport uint64_t

cdef int STREAMS = 12
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t splitmix64(uint64_t x) nogil:
    cdef uint64_t z = x + <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double uniform(uint64_t key, uint64_t ctr) nogil:
    return (<double>(splitmix64(ctr ^ key) >> 11) + 0.5) * INV53


cdef inline void gauss_pair(double u1, double u2, double* a, double* b) nogil:
    cdef double rad = sqrt(-2.0 * log(u1))
    cdef double ang = 2.0 * M_PI * u2
    a[0] = rad * cos(ang)
    b[0] = rad * sin(ang)


def twoway_af_counts(unsigned long long seed, long long first, long long count,
                     double amp_a, double amp_b, double sig_h, double sig_g,
                     double p_a, double p_b, double p_r, double noise_std,
                     bint los, double direct_a, double direct_b):
    cdef uint64_t key = splitmix64(<uint64_t>seed)
    cdef long long i
    cdef uint64_t base
    cdef double u[12]
    cdef int s
    cdef double hr, hi, gr, gi, nrr, nri, nar, nai, nbr, nbi, xa, xb
    cdef double har, hai, gbr, gbi, sa = sqrt(p_a), sb = sqrt(p_b)
    cdef double yrr, yri, den, beta, noise_var = 2.0 * noise_std * noise_std
    cdef double kr, ki, yar, yai, ybr, ybi, car, cai, cbr, cbi, ghr, ghi
    cdef double stat, t
    cdef long long err_a = 0, err_b = 0
    cdef double snr_a = 0.0, snr_b = 0.0, na, nb
    with nogil:
        for i in range(first, first + count):
            base = <uint64_t>i * <uint64_t>STREAMS
            for s in range(12):
                u[s] = uniform(key, base + <uint64_t>s)
            gauss_pair(u[0], u[1], &hr, &hi)
            gauss_pair(u[2], u[3], &gr, &gi)
            gauss_pair(u[4], u[5], &nrr, &nri)
            gauss_pair(u[6], u[7], &nar, &nai)
            gauss_pair(u[8], u[9], &nbr, &nbi)
            xa = -1.0 if u[10] < 0.5 else 1.0
            xb = -1.0 if u[11] < 0.5 else 1.0
            hr = hr * sig_h
            hi = hi * sig_h
            gr = gr * sig_g
            gi = gi * sig_g
            har = hr * amp_a
            hai = hi * amp_a
            gbr = gr * amp_b
            gbi = gi * amp_b

            yrr = sa * xa * har + sb * xb * gbr + nrr * noise_std
            yri = sa * xa * hai + sb * xb * gbi + nri * noise_std
            den = (har * har + hai * hai) * p_a + (gbr * gbr + gbi * gbi) * p_b + noise_var
            beta = sqrt(p_r / den) if den > 0 else 0.0

            # S_a: ha*beta*(y_r - sa*xa*ha) + n_a
            kr = yrr - sa * xa * har
            ki = yri - sa * xa * hai
            yar = beta * (har * kr - hai * ki) + nar * noise_std
            yai = beta * (har * ki + hai * kr) + nai * noise_std
            car = beta * sb * (har * gbr - hai * gbi)
            cai = beta * sb * (har * gbi + hai * gbr)
            # S_b: gb*beta*(y_r - sb*xb*gb) + n_b
            kr = yrr - sb * xb * gbr
            ki = yri - sb * xb * gbi
            ybr = beta * (gbr * kr - gbi * ki) + nbr * noise_std
            ybi = beta * (gbr * ki + gbi * kr) + nbi * noise_std
            cbr = beta * sa * (gbr * har - gbi * hai)
            cbi = beta * sa * (gbr * hai + gbi * har)
            if los:
                ghr = gr * hr - gi * hi
                ghi = gr * hi + gi * hr
                yar = yar + sb * xb * gbr + 2.0 * sb * xb * ghr * direct_a
                yai = yai + sb * xb * gbi + 2.0 * sb * xb * ghi * direct_a
                car = car + sb * gbr + 2.0 * sb * ghr * direct_a
                cai = cai + sb * gbi + 2.0 * sb * ghi * direct_a
                ybr = ybr + sa * xa * har + 2.0 * sa * xa * ghr * direct_b
                ybi = ybi + sa * xa * hai + 2.0 * sa * xa * ghi * direct_b
                cbr = cbr + sa * har + 2.0 * sa * ghr * direct_b
                cbi = cbi + sa * hai + 2.0 * sa * ghi * direct_b

            stat = car * yar + cai * yai
            t = 1.0 if stat >= 0.0 else -1.0
            if t != xb:
                err_a += 1
            stat = cbr * ybr + cbi * ybi
            t = 1.0 if stat >= 0.0 else -1.0
            if t != xa:
                err_b += 1

            if noise_var > 0:
                na = (beta * beta * (har * har + hai * hai) + 1.0) * noise_var
                nb = (beta * beta * (gbr * gbr + gbi * gbi) + 1.0) * noise_var
                snr_a += (car * car + cai * cai) / na
                snr_b += (cbr * cbr + cbi * cbi) / nb
    if noise_var <= 0:
        snr_a = INFINITY
        snr_b = INFINITY
    return err_a, err_b, snr_a, snr_b


def single_hop_counts(unsigned long long seed, long long first, long long count, double snr):
    cdef uint64_t key = splitmix64(<uint64_t>seed)
    cdef long long i, errors = 0
    cdef uint64_t base
    cdef double hr, hi, nr, ni, x, yr, yi, stat
    cdef double amp = sqrt(0.5 * snr), nstd = sqrt(0.5)
    with nogil:
        for i in range(first, first + count):
            base = <uint64_t>i * <uint64_t>STREAMS
            gauss_pair(uniform(key, base), uniform(key, base + 1), &hr, &hi)
            gauss_pair(uniform(key, base + 2), uniform(key, base + 3), &nr, &ni)
            x = -1.0 if uniform(key, base + 4) < 0.5 else 1.0
            hr = hr * amp
            hi = hi * amp
            yr = hr * x + nr * nstd
            yi = hi * x + ni * nstd
            stat = hr * yr + hi * yi
            if (1.0 if stat >= 0.0 else -1.0) != x:
                errors += 1
    return errors


def grid_min(w, double H, double G, double P, double q, int n):
    cdef double wa = w[0], wb = w[1], wr = w[2]
    cdef double k = q * expm1(2.0 / q * log(2.0))
    cdef double c = P * H * G, step = 1.0 / n, ln2x2 = 2.0 * log(2.0)
    cdef double best = INFINITY, xa, xb, xr, da, db, f
    cdef int i, j, m, bi = 0, bj = 0, bk = 0
    with nogil:
        for i in range(1, n + 1):
            xa = i * step
            for j in range(1, n - i):
                xb = j * step
                for m in range(1, n - i - j + 1):
                    xr = m * step
                    da = H * (xr + xa) + G * xb
                    db = H * xa + G * (xr + xb)
                    f = k * (wa * da + wb * db) + wr * (ln2x2 * (
                        1.0 / log1p(c * xb * xr / da) + 1.0 / log1p(c * xa * xr / db)))
                    if f < best:
                        best = f
                        bi = i
                        bj = j
                        bk = m
    return best, bi, bj, bk
