"""Accelerated search kernel (numba, int64/uint64).

Line-for-line transliteration of _kernel_ref onto preallocated arrays;
trial outcomes must stay bit-identical to the reference kernel (tests
compare them).  nogil lets chunk workers run as real parallel threads.

Overflow safety: all intermediates are below 2^63 provided p < 2^20
(the orchestrator enforces the bound before selecting this kernel).
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

_U = np.uint64


@njit(uint64(uint64), cache=True, nogil=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


@njit(uint64(uint64, uint64, uint64), cache=True, nogil=True, inline="always")
def _trial_base(seed, stream, counter):
    h = _mix(seed + _U(0x9E3779B97F4A7C15))
    h = _mix(h ^ (stream * _U(0xD1342543DE82EF95)))
    h = _mix(h ^ (counter * _U(0xDA942042E4DD58B5)))
    return h


@njit(int64(uint64, int64, int64), cache=True, nogil=True, inline="always")
def _residue(base, index, p):
    d = _mix(base + _U(index + 1) * _U(0x9E3779B97F4A7C15))
    return int64(d % _U(p))


@njit(cache=True, nogil=True)
def _scan(c, p, want_j, cap, conv_n2, inv, f1, f2, g, f):
    """first-nonzero scan (want_j = 0) or s_{want_j} value extraction."""
    if want_j > 0:
        cap = want_j
    f1[0] = 1
    f1[1] = 0
    f1[2] = 1
    have_f2 = False
    for k in range(3, 2 * cap + 3):
        for b in range(k + 1):
            g[b] = 0
        n = k - 1
        for i in range(n):
            dx = (n - i) * f1[i] % p
            dy = (i + 1) * f1[i + 1] % p
            g[i] += dx * c[0] - dy * c[7]
            g[i + 1] += dx * c[1] - dy * c[8]
            g[i + 2] += dx * c[2] - dy * c[9]
        if have_f2:
            n = k - 2
            for i in range(n):
                dx = (n - i) * f2[i] % p
                dy = (i + 1) * f2[i + 1] % p
                g[i] += dx * c[3] - dy * c[10]
                g[i + 1] += dx * c[4] - dy * c[11]
                g[i + 2] += dx * c[5] - dy * c[12]
                g[i + 3] += dx * c[6] - dy * c[13]
        for b in range(k + 1):
            g[b] = g[b] % p
            if g[b] < 0:
                g[b] += p
        if k & 1:
            f[1] = g[0]
            for b in range(2, k, 2):
                f[b + 1] = ((k - b + 1) * f[b - 1] + g[b]) * inv[b + 1] % p
            f[k - 1] = (p - g[k]) % p
            for b in range(k - 2, 0, -2):
                f[b - 1] = ((b + 1) * f[b + 1] + (p - g[b])) * inv[k - b + 1] % p
        else:
            prev = g[0]
            for b in range(2, k - 1, 2):
                prev = ((k - b + 1) * prev + g[b]) * inv[b + 1] % p
            s = (prev + g[k]) * inv[2] % p
            j = (k - 2) // 2
            if j == want_j or (want_j == 0 and s != 0):
                return j, s
            if k == 2 * cap + 2:
                break
            f[1] = (g[0] + p - s) % p
            for b in range(2, k - 1, 2):
                f[b + 1] = ((k - b + 1) * f[b - 1] + g[b]) * inv[b + 1] % p
            if conv_n2 != 0:
                f[0] = 0
                for b in range(1, k, 2):
                    f[b + 1] = ((k - b + 1) * f[b - 1] + g[b]) * inv[b + 1] % p
            else:
                f[k] = 0
                for b in range(k - 1, 0, -2):
                    f[b - 1] = ((b + 1) * f[b + 1] + (p - g[b])) * inv[k - b + 1] % p
        tmp = f2
        f2 = f1
        f1 = f
        f = tmp
        have_f2 = True
    return 0, 0


@njit(cache=True, nogil=True)
def run_chunk(seed, stream, ctr0, n_trials, p, cap, target, strategy, conv_n2,
              coord1, coord2, b1inv, beta, c2q, inv, sqrt_tab, hist, hit_buf):
    """Mirror of _kernel_ref.run_chunk; returns (processed, accepted, n_hits)."""
    size = 2 * cap + 3
    f1 = np.zeros(size, dtype=np.int64)
    f2 = np.zeros(size, dtype=np.int64)
    g = np.zeros(size, dtype=np.int64)
    f = np.zeros(size, dtype=np.int64)
    c = np.zeros(14, dtype=np.int64)
    max_hits = hit_buf.shape[0]
    processed = 0
    accepted = 0
    n_hits = 0
    for t in range(n_trials):
        counter = ctr0 + t
        base = _trial_base(seed, stream, _U(counter))
        ok = True
        if strategy == 0:
            for i in range(14):
                c[i] = _residue(base, i, p)
        else:
            idx = 0
            for slot in range(14):
                if slot != coord1 and slot != coord2:
                    c[slot] = _residue(base, idx, p)
                    idx += 1
                else:
                    c[slot] = 0
            _, a_val = _scan(c, p, 1, cap, conv_n2, inv, f1, f2, g, f)
            alpha = (p - a_val) * b1inv % p
            c[coord1] = alpha
            _, v0 = _scan(c, p, 2, cap, conv_n2, inv, f1, f2, g, f)
            c[coord1] = (alpha + beta) % p
            c[coord2] = 1
            _, v1 = _scan(c, p, 2, cap, conv_n2, inv, f1, f2, g, f)
            c0 = v0
            c1 = (v1 - v0 - c2q) % p
            if c1 < 0:
                c1 += p
            troot = int64(0)
            if c2q == 0:
                if c1 == 0:
                    if c0 != 0:
                        ok = False
                    else:
                        troot = _residue(base, 12, p)
                else:
                    troot = (p - c0) * inv[c1] % p
            else:
                disc = (c1 * c1 - 4 * c2q * c0) % p
                if disc < 0:
                    disc += p
                r = sqrt_tab[disc]
                if r < 0:
                    ok = False
                else:
                    inv2a = inv[2 * c2q % p]
                    if r == 0:
                        troot = (p - c1) * inv2a % p
                    elif _residue(base, 13, 2) == 0:
                        troot = (p - c1 + r) * inv2a % p
                    else:
                        troot = (2 * p - c1 - r) * inv2a % p
            if ok:
                c[coord2] = troot
                c[coord1] = (alpha + beta * troot) % p
        if ok:
            j, s = _scan(c, p, 0, cap, conv_n2, inv, f1, f2, g, f)
            depth = cap if j == 0 else j - 1
            if depth >= target:
                if n_hits >= max_hits:
                    return processed, accepted, n_hits
                hit_buf[n_hits, 0] = counter
                hit_buf[n_hits, 1] = depth
                hit_buf[n_hits, 2] = s if j != 0 else 0
                for i in range(14):
                    hit_buf[n_hits, 3 + i] = c[i]
                n_hits += 1
            accepted += 1
            hist[depth] += 1
        processed += 1
    return processed, accepted, n_hits
