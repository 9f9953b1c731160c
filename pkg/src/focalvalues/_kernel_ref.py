"""Reference search kernel: pure-Python trial pipeline.

This module defines the trial semantics: given (seed, stream, counter)
and a search setup, what system is sampled, how the parametrized
construction solves the first two focal values, and what (depth, next
value) the trial reports.  The numba kernel in _kernel_nb is a
transliteration of this file onto int64 arrays and must produce
bit-identical outcomes (enforced by tests).  Keep the two in lockstep.

Only the cubic 14-coefficient layout is handled here; the generic
engine covers everything else.
"""

from __future__ import annotations

from .prng import residue, trial_base

STRATEGY_REJECTION = 0
STRATEGY_PARAMETRIZED = 1

# trial status codes
REJECTED = 0
ACCEPTED = 1


def scan_focal(c, p, want_j, cap, conv_n2, inv):
    """Run the cubic recursion over F_p on coefficient vector c.

    want_j = 0: return (j, s_j) for the least j <= cap with s_j != 0,
    or (0, 0) if the whole prefix vanishes.  want_j = j > 0: return
    (j, s_j) unconditionally (value mode, runs to degree 2j+2).

    inv: inverse table of 1..p-1 (index 0 unused).  Divisions by chain
    integers only; requires p > 2*cap+2.
    """
    q20, q11, q02, q30, q21, q12, q03, p20, p11, p02, p30, p21, p12, p03 = c
    if want_j:
        cap = want_j
    f1 = [1, 0, 1]  # f_{k-1} going into degree k = 3
    f2 = None       # f_{k-2}
    for k in range(3, 2 * cap + 3):
        g = [0] * (k + 1)
        n = k - 1
        for i in range(n):
            dx = (n - i) * f1[i] % p
            dy = (i + 1) * f1[i + 1] % p
            g[i] += dx * q20 - dy * p20
            g[i + 1] += dx * q11 - dy * p11
            g[i + 2] += dx * q02 - dy * p02
        if f2 is not None:
            n = k - 2
            for i in range(n):
                dx = (n - i) * f2[i] % p
                dy = (i + 1) * f2[i + 1] % p
                g[i] += dx * q30 - dy * p30
                g[i + 1] += dx * q21 - dy * p21
                g[i + 2] += dx * q12 - dy * p12
                g[i + 3] += dx * q03 - dy * p03
        for b in range(k + 1):
            g[b] %= p
        # solve R(f) = -g, odd k; R(f) = -g + s*(x^k+y^k), even k
        f = [0] * (k + 1)
        if k & 1:
            f[1] = g[0]
            for b in range(2, k, 2):
                f[b + 1] = ((k - b + 1) * f[b - 1] + g[b]) * inv[b + 1] % p
            f[k - 1] = (p - g[k]) % p
            for b in range(k - 2, 0, -2):
                f[b - 1] = ((b + 1) * f[b + 1] + (p - g[b])) * inv[k - b + 1] % p
        else:
            # one march with s = 0 pins s via the terminal row
            prev = g[0]
            for b in range(2, k - 1, 2):
                prev = ((k - b + 1) * prev + g[b]) * inv[b + 1] % p
            s = (prev + g[k]) * inv[2] % p
            j = (k - 2) // 2
            if j == want_j or (want_j == 0 and s != 0):
                return j, s
            if k == 2 * cap + 2:
                break
            f[1] = (g[0] + p - s) % p  # c_1 = g_0 - s
            for b in range(2, k - 1, 2):
                f[b + 1] = ((k - b + 1) * f[b - 1] + g[b]) * inv[b + 1] % p
            if conv_n2:
                for b in range(1, k, 2):
                    f[b + 1] = ((k - b + 1) * f[b - 1] + g[b]) * inv[b + 1] % p
            else:
                for b in range(k - 1, 0, -2):
                    f[b - 1] = ((b + 1) * f[b + 1] + (p - g[b])) * inv[k - b + 1] % p
        f2 = f1
        f1 = f
    return 0, 0


def run_trial(seed, stream, counter, setup):
    """Evaluate one trial.  Returns (status, depth, next_value, coeffs).

    For a rejected parametrized attempt: (REJECTED, -1, 0, None).
    """
    (p, cap, strategy, conv_n2, coord1, coord2, b1inv, beta, c2q,
     inv, sqrt_tab) = setup
    base = trial_base(seed, stream, counter)
    if strategy == STRATEGY_REJECTION:
        c = [residue(base, i, p) for i in range(14)]
    else:
        c = [0] * 14
        idx = 0
        for slot in range(14):
            if slot != coord1 and slot != coord2:
                c[slot] = residue(base, idx, p)
                idx += 1
        # s_1 is linear in the designated cubic coordinates with constant
        # leading coefficients, so one evaluation pins the whole line
        # coord1 = alpha + beta*t, coord2 = t on which s_1 = 0.
        _, a_val = scan_focal(c, p, 1, cap, conv_n2, inv)
        alpha = (p - a_val) * b1inv % p
        # s_2 restricted to that line is a quadratic in t whose leading
        # coefficient c2q is draw-independent (precomputed).
        c[coord1] = alpha
        _, v0 = scan_focal(c, p, 2, cap, conv_n2, inv)
        c[coord1] = (alpha + beta) % p
        c[coord2] = 1
        _, v1 = scan_focal(c, p, 2, cap, conv_n2, inv)
        c0 = v0
        c1 = (v1 - v0 - c2q) % p
        if c2q == 0:
            if c1 == 0:
                if c0 != 0:
                    return REJECTED, -1, 0, None
                t = residue(base, 12, p)  # identically zero: t is free
            else:
                t = (p - c0) * inv[c1] % p
        else:
            disc = (c1 * c1 - 4 * c2q * c0) % p
            r = sqrt_tab[disc]
            if r < 0:
                return REJECTED, -1, 0, None
            inv2a = inv[2 * c2q % p]
            if r == 0:
                t = (p - c1) * inv2a % p
            else:
                if residue(base, 13, 2) == 0:
                    t = (p - c1 + r) * inv2a % p
                else:
                    t = (2 * p - c1 - r) * inv2a % p
        c[coord2] = t
        c[coord1] = (alpha + beta * t) % p
    j, s = scan_focal(c, p, 0, cap, conv_n2, inv)
    depth = cap if j == 0 else j - 1
    return ACCEPTED, depth, (s if j else 0), c


def run_chunk(seed, stream, ctr0, n_trials, setup, target, max_hits):
    """Evaluate trials ctr0 .. ctr0+n_trials-1.

    Returns (processed, accepted, hist, hits); hits are
    (counter, depth, next_value, coeffs) with depth >= target, in
    counter order.  Stops early (processed < n_trials) only when the
    hit buffer fills, leaving the remaining counters untouched.
    """
    cap = setup[1]
    hist = [0] * (cap + 1)
    hits = []
    processed = 0
    accepted = 0
    for t in range(n_trials):
        counter = ctr0 + t
        status, depth, nxt, c = run_trial(seed, stream, counter, setup)
        if status == ACCEPTED:
            if depth >= target and len(hits) >= max_hits:
                return processed, accepted, hist, hits
            accepted += 1
            hist[depth] += 1
            if depth >= target:
                hits.append((counter, depth, nxt, tuple(c)))
        processed += 1
    return processed, accepted, hist, hits
