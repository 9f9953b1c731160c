"""Focal values of plane systems  xdot = y + q(x,y),  ydot = -(x + p(x,y)).

Degree by degree this builds the truncated first integral
F = x^2 + y^2 + f_3 + ... and extracts the focal values s_j from the
even degrees, so that exactly

    F_x*(y+q) - F_y*(x+p) = sum_j s_j * (x^(2j+2) + y^(2j+2))

through the truncation order.  The degree-k step forms the convection
term

    g_k = sum_m [ diff_x(f_{k+1-m})*q_m - diff_y(f_{k+1-m})*p_m ]

and solves R(f_k) = -g_k, picking up s_j = (k-2)/2-th focal value in
even degrees k = 2j+2.  All arithmetic is exact in the system's ring.

The coefficient layout is fixed once for the cubic case and shared by
the file format, Jacobian columns, and hit logs:

    (q20,q11,q02, q30,q21,q12,q03, p20,p11,p02, p30,p21,p12,p03)

with weight 1 on quadratic and 2 on cubic coefficients; s_j is
weighted-homogeneous of degree 2j.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .homog import (
    CONVENTIONS,
    HomogPoly,
    MotionSeries,
    integer_inverses,
    diff_x,
    diff_y,
    multiply,
    power_sum,
    rotation_apply,
    rotation_solve,
)
from .rings import PrimeField, SparsePolyRing

__all__ = [
    "COEFFICIENT_NAMES",
    "COEFFICIENT_WEIGHTS",
    "PolySystem",
    "FocalSequence",
    "TermLimitExceeded",
    "coefficient_names",
    "coefficient_weights",
    "focal_values",
    "first_nonzero",
    "verify_identity",
    "symbolic_focal_values",
    "evaluate_sequence_mod",
    "evaluate_sequence_rational",
]


def coefficient_names(d: int) -> tuple[str, ...]:
    """Canonical coefficient order for degree-d systems: q parts then
    p parts, degrees ascending, monomials x^m..y^m within a part."""
    names = []
    for prefix in ("q", "p"):
        for m in range(2, d + 1):
            for a in range(m + 1):
                names.append(f"{prefix}{m - a}{a}")
    return tuple(names)


def coefficient_weights(d: int) -> tuple[int, ...]:
    """Weight m-1 for a coefficient in a degree-m part."""
    weights = []
    for _ in ("q", "p"):
        for m in range(2, d + 1):
            weights.extend([m - 1] * (m + 1))
    return tuple(weights)


COEFFICIENT_NAMES = coefficient_names(3)
COEFFICIENT_WEIGHTS = coefficient_weights(3)


class TermLimitExceeded(RuntimeError):
    """Symbolic run aborted: intermediate polynomials grew past the ceiling."""


class PolySystem:
    """Coefficient data of xdot = y + q, ydot = -(x + p).

    q and p start at quadratic terms; the linear parts are implicit.
    Parts are HomogPoly values of matching ring, index m for degree m.
    """

    __slots__ = ("ring", "degree", "q_parts", "p_parts")

    def __init__(self, ring, q_parts: list[HomogPoly], p_parts: list[HomogPoly]):
        if len(q_parts) != len(p_parts) or not q_parts:
            raise ValueError("q and p need the same number of parts, at least one")
        for i, part in enumerate(list(q_parts) + list(p_parts)):
            m = 2 + (i % len(q_parts))
            if part.degree != m:
                raise ValueError(f"part of index {m} has degree {part.degree}")
            if part.ring is not ring:
                raise ValueError("part ring mismatch")
        self.ring = ring
        self.degree = len(q_parts) + 1
        self.q_parts = list(q_parts)
        self.p_parts = list(p_parts)

    @classmethod
    def from_coefficients(cls, ring, values, d: int = 3) -> "PolySystem":
        """Build from the canonical flat coefficient order (ring elements)."""
        values = list(values)
        expected = 2 * sum(m + 1 for m in range(2, d + 1))
        if len(values) != expected:
            raise ValueError(f"degree {d} takes {expected} coefficients, got {len(values)}")
        half = expected // 2
        parts = []
        for chunk in (values[:half], values[half:]):
            out, at = [], 0
            for m in range(2, d + 1):
                out.append(HomogPoly(ring, m, chunk[at:at + m + 1]))
                at += m + 1
            parts.append(out)
        return cls(ring, parts[0], parts[1])

    @classmethod
    def cubic(cls, ring, ints) -> "PolySystem":
        """The privileged 14-coefficient cubic layout, from integers."""
        return cls.from_coefficients(ring, [ring.from_int(n) for n in ints], d=3)

    def coefficient_vector(self) -> list:
        out = []
        for parts in (self.q_parts, self.p_parts):
            for part in parts:
                out.extend(part.coeffs)
        return out


@dataclass
class FocalSequence:
    """Computed focal values s_1..s_N with their provenance."""

    values: list
    convention: str
    ring_name: str
    first_nonzero: Optional[int]


def _require_modulus(ring, n: int):
    base = getattr(ring, "base", None)
    p = getattr(ring, "p", None) or (getattr(base, "p", None) if base else None)
    if p is not None and p < 2 * n + 5:
        raise ValueError(
            f"p = {p} is too small for N = {n} focal values: need p >= 2N+5 = {2 * n + 5}"
        )


def _convection(ring, k: int, sys: PolySystem, window: dict) -> HomogPoly:
    g = HomogPoly.zero(ring, k)
    for m in range(2, min(sys.degree, k - 1) + 1):
        f = window[k + 1 - m]
        g = g.add(multiply(diff_x(f), sys.q_parts[m - 2]))
        g = g.sub(multiply(diff_y(f), sys.p_parts[m - 2]))
    return g


def _run(sys: PolySystem, n: int, convention: str, keep_motion: bool,
         early_exit: bool, term_limit: Optional[int] = None):
    """Shared recursion core.

    Returns (values, first_nonzero, parts) where values holds the s_j
    computed before stopping and parts the retained MotionSeries parts.
    """
    if n < 1:
        raise ValueError(f"need N >= 1, got {n}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    ring = sys.ring
    _require_modulus(ring, n)
    kmax = 2 * n + 2
    int_invs = integer_inverses(ring, max(kmax, 2))
    f2 = HomogPoly(ring, 2, [ring.one, ring.zero, ring.one])
    window: dict[int, HomogPoly] = {2: f2}
    parts = [f2]
    keep_from = sys.degree - 1  # convection looks back d-1 degrees
    values: list = []
    first = None
    sparse = isinstance(ring, SparsePolyRing)
    for k in range(3, kmax + 1):
        g = _convection(ring, k, sys, window)
        f_k, s_solver = rotation_solve(g.neg(), convention, int_invs)
        window[k] = f_k
        window.pop(k - keep_from, None)
        if keep_motion:
            parts.append(f_k)
        if k % 2 == 0:
            s_j = ring.neg(s_solver)
            values.append(s_j)
            if first is None and not ring.is_zero(s_j):
                first = len(values)
                if early_exit:
                    break
        if term_limit is not None and sparse:
            load = sum(ring.term_count(c) for f in window.values() for c in f.coeffs)
            if load > term_limit:
                raise TermLimitExceeded(
                    f"degree {k}: {load} working terms exceed the ceiling {term_limit}"
                )
    return values, first, (parts if keep_motion else None)


def focal_values(
    sys: PolySystem,
    n: int,
    convention: str = "N1",
    keep_motion: bool = False,
) -> tuple[FocalSequence, Optional[MotionSeries]]:
    """Compute s_1..s_n; optionally retain the full truncated integral."""
    values, first, parts = _run(sys, n, convention, keep_motion, early_exit=False)
    seq = FocalSequence(values, convention, sys.ring.name, first)
    motion = MotionSeries(sys.ring, parts) if parts is not None else None
    return seq, motion


def first_nonzero(sys: PolySystem, n_max: int, convention: str = "N1") -> Optional[int]:
    """Least j <= n_max with s_j != 0, stopping at the first hit; None if
    the whole prefix vanishes."""
    _, first, _ = _run(sys, n_max, convention, keep_motion=False, early_exit=True)
    return first


def verify_identity(
    sys: PolySystem, motion: MotionSeries, seq: FocalSequence, K: int
) -> bool:
    """Re-expand F_x*Q - F_y*P degree by degree through K and compare
    against sum_j s_j (x^(2j+2) + y^(2j+2)).  Exact check, independent
    of the chain solver."""
    if motion.max_degree < K:
        raise ValueError(f"motion series truncated below K = {K}")
    if K > 2 * len(seq.values) + 2:
        raise ValueError(f"only {len(seq.values)} focal values available for K = {K}")
    ring = sys.ring
    window = {k: motion.part(k) for k in range(2, K + 1)}
    for k in range(2, K + 1):
        d_k = rotation_apply(motion.part(k)).add(_convection(ring, k, sys, window))
        if k % 2 == 0 and k >= 4:
            expected = power_sum(ring, k).scale(seq.values[(k - 2) // 2 - 1])
            d_k = d_k.sub(expected)
        if not d_k.is_zero():
            return False
    return True


def symbolic_focal_values(
    d: int,
    n: int,
    convention: str = "N1",
    term_limit: Optional[int] = 5_000_000,
) -> tuple[FocalSequence, SparsePolyRing]:
    """Run the recursion with all system coefficients as indeterminates.

    Returns the focal values as sparse polynomials over Q together with
    the polynomial ring (variables in canonical coefficient order).
    Each s_j is weighted-homogeneous of degree 2j under weight m-1 on
    the degree-m coefficients.
    """
    ring = SparsePolyRing(coefficient_names(d))
    values = [ring.variable(i) for i in range(ring.nvars)]
    sys = PolySystem.from_coefficients(ring, values, d=d)
    vals, first, _ = _run(sys, n, convention, keep_motion=False,
                          early_exit=False, term_limit=term_limit)
    return FocalSequence(vals, convention, ring.name, first), ring


def evaluate_sequence_mod(
    seq: FocalSequence, ring: SparsePolyRing, point: list[int], field: PrimeField
) -> list[int]:
    """Specialize symbolic focal values at integer residues mod p."""
    return [ring.evaluate_mod(v, point, field) for v in seq.values]


def evaluate_sequence_rational(
    seq: FocalSequence, ring: SparsePolyRing, point: list[Fraction]
) -> list[Fraction]:
    """Specialize symbolic focal values at an exact rational point."""
    return [ring.evaluate(v, point) for v in seq.values]
