"""Counter-based pseudo-random draws for the search.

Every random quantity is a pure function of (seed, stream, counter,
draw index): no mutable generator state.  This is what makes trials
independent of worker count and lets a hit record regenerate its trial
from three integers.  The construction is a splitmix64-style finalizer
over a Weyl sequence; the accelerated kernel reimplements it on uint64
and is cross-checked bit for bit against this module.

Draw layout per trial (fixed, part of the on-disk provenance contract):
  rejection strategy:     draws 0..13  -> the 14 coefficients
  parametrized strategy:  draws 0..11  -> the 12 free coefficients
                          draw 12      -> free value when the quadratic
                                          is identically zero
                          draw 13      -> root choice among two roots
"""

from __future__ import annotations

_M64 = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15
STREAM_MULT = 0xD1342543DE82EF95
COUNTER_MULT = 0xDA942042E4DD58B5


def mix64(z: int) -> int:
    """splitmix64 finalizer (z already in [0, 2^64))."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def trial_base(seed: int, stream: int, counter: int) -> int:
    """Mix (seed, stream, counter) into the per-trial base state."""
    h = mix64((seed + GOLDEN) & _M64)
    h = mix64(h ^ ((stream * STREAM_MULT) & _M64))
    h = mix64(h ^ ((counter * COUNTER_MULT) & _M64))
    return h


def draw(base: int, index: int) -> int:
    """index-th 64-bit draw of a trial."""
    return mix64((base + (index + 1) * GOLDEN) & _M64)


def residue(base: int, index: int, p: int) -> int:
    """index-th draw reduced to a uniform residue in [0, p).

    The modulo bias is at most p/2^64 and irrelevant for the moduli in
    scope (p < 2^20).
    """
    return draw(base, index) % p
