"""Dense homogeneous bivariate polynomials and the rotation operator.

A degree-k polynomial is a coefficient vector c_0..c_k where c_a
multiplies x^(k-a) * y^a.  Degree is structural: the zero polynomial of
degree k is the all-zeros vector of length k+1.

The rotation operator R(f) = y*f_x - x*f_y is the linear part of the
recursion that builds the formal first integral.  It is invertible in
odd degree; in even degree k it has the one-dimensional kernel
(x^2+y^2)^(k/2) and cokernel spanned by x^k + y^k, so solving
R(f) + s*(x^k+y^k) = g needs a normalization convention for f:

    N1 (default): the y^k coefficient of f is 0
    N2:           the x^k coefficient of f is 0

Both are transversal to the kernel.  The solver walks the two parity
chains of the bidiagonal system directly (O(k), divisions only by
integers 1..k) instead of doing generic elimination.
"""

from __future__ import annotations

from typing import Optional

__all__ = [
    "HomogPoly",
    "MotionSeries",
    "CONVENTIONS",
    "multiply",
    "diff_x",
    "diff_y",
    "rotation_apply",
    "rotation_solve",
    "power_sum",
    "integer_inverses",
]

CONVENTIONS = ("N1", "N2")


class HomogPoly:
    """Homogeneous bivariate polynomial of fixed degree over a ring."""

    __slots__ = ("ring", "degree", "coeffs")

    def __init__(self, ring, degree: int, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) != degree + 1:
            raise ValueError(
                f"degree {degree} needs {degree + 1} coefficients, got {len(coeffs)}"
            )
        self.ring = ring
        self.degree = degree
        self.coeffs = coeffs

    @classmethod
    def zero(cls, ring, degree: int) -> "HomogPoly":
        return cls(ring, degree, [ring.zero] * (degree + 1))

    @classmethod
    def from_ints(cls, ring, degree: int, ints) -> "HomogPoly":
        return cls(ring, degree, [ring.from_int(n) for n in ints])

    def is_zero(self) -> bool:
        rz = self.ring.is_zero
        return all(rz(c) for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HomogPoly)
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"HomogPoly(deg={self.degree}, {self.coeffs})"

    def scale(self, c) -> "HomogPoly":
        mul = self.ring.mul
        return HomogPoly(self.ring, self.degree, [mul(c, a) for a in self.coeffs])

    def add(self, other: "HomogPoly") -> "HomogPoly":
        _check_same(self, other)
        add = self.ring.add
        return HomogPoly(
            self.ring, self.degree,
            [add(a, b) for a, b in zip(self.coeffs, other.coeffs)],
        )

    def sub(self, other: "HomogPoly") -> "HomogPoly":
        _check_same(self, other)
        sub = self.ring.sub
        return HomogPoly(
            self.ring, self.degree,
            [sub(a, b) for a, b in zip(self.coeffs, other.coeffs)],
        )

    def neg(self) -> "HomogPoly":
        neg = self.ring.neg
        return HomogPoly(self.ring, self.degree, [neg(a) for a in self.coeffs])


def _check_same(f: HomogPoly, g: HomogPoly, same_degree: bool = True):
    if f.ring is not g.ring:
        raise ValueError("ring mismatch")
    if same_degree and f.degree != g.degree:
        raise ValueError(f"degree mismatch: {f.degree} vs {g.degree}")


def power_sum(ring, k: int) -> HomogPoly:
    """x^k + y^k."""
    c = [ring.zero] * (k + 1)
    c[0] = ring.one
    c[k] = ring.add(c[k], ring.one)  # k = 0 gives the constant 2
    return HomogPoly(ring, k, c)


def multiply(f: HomogPoly, g: HomogPoly) -> HomogPoly:
    """Exact convolution; degrees add."""
    _check_same(f, g, same_degree=False)
    ring = f.ring
    add, mul, zero = ring.add, ring.mul, ring.zero
    out = [zero] * (f.degree + g.degree + 1)
    for i, a in enumerate(f.coeffs):
        if ring.is_zero(a):
            continue
        for j, b in enumerate(g.coeffs):
            out[i + j] = add(out[i + j], mul(a, b))
    return HomogPoly(ring, f.degree + g.degree, out)


def diff_x(f: HomogPoly) -> HomogPoly:
    """d/dx; degree drops by one (degree 0 gives the structural zero)."""
    ring = f.ring
    k = f.degree
    if k == 0:
        return HomogPoly.zero(ring, 0)
    mul, from_int = ring.mul, ring.from_int
    return HomogPoly(
        ring, k - 1,
        [mul(from_int(k - a), f.coeffs[a]) for a in range(k)],
    )


def diff_y(f: HomogPoly) -> HomogPoly:
    """d/dy; degree drops by one."""
    ring = f.ring
    k = f.degree
    if k == 0:
        return HomogPoly.zero(ring, 0)
    mul, from_int = ring.mul, ring.from_int
    return HomogPoly(
        ring, k - 1,
        [mul(from_int(a + 1), f.coeffs[a + 1]) for a in range(k)],
    )


def rotation_apply(f: HomogPoly) -> HomogPoly:
    """R(f) = y*f_x - x*f_y; output coefficient b is
    (k-b+1)*c_{b-1} - (b+1)*c_{b+1} with out-of-range reads as 0."""
    ring = f.ring
    k = f.degree
    c = f.coeffs
    sub, mul, from_int, zero = ring.sub, ring.mul, ring.from_int, ring.zero
    out = []
    for b in range(k + 1):
        lo = mul(from_int(k - b + 1), c[b - 1]) if b >= 1 else zero
        hi = mul(from_int(b + 1), c[b + 1]) if b + 1 <= k else zero
        out.append(sub(lo, hi))
    return HomogPoly(ring, k, out)


def rotation_solve(
    g: HomogPoly,
    convention: str = "N1",
    int_invs: Optional[list] = None,
) -> tuple[HomogPoly, Optional[object]]:
    """Solve R(f) = g (odd degree) or R(f) + s*(x^k+y^k) = g (even).

    Returns (f, s); s is None for odd k.  For even k the kernel
    component of f is fixed by the convention.  Requires the integer
    divisors 1..k (and 2) to be invertible in the ring; over F_p that
    means p > k.

    int_invs, when given, must contain ring inverses of 0..k (index 0
    unused) and is a pure performance hook for the engine's inner loop.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    ring = g.ring
    k = g.degree
    if int_invs is None:
        int_invs = integer_inverses(ring, max(k, 2))
    gc = g.coeffs
    add, sub, mul, neg = ring.add, ring.sub, ring.mul, ring.neg
    from_int, zero = ring.from_int, ring.zero
    f = [zero] * (k + 1)

    if k % 2 == 1:
        # even-output chain determines odd-indexed coefficients, upward:
        # [Rf]_0 = -c_1, then c_{b+1} = ((k-b+1) c_{b-1} - g_b) / (b+1)
        f[1] = neg(gc[0])
        for b in range(2, k, 2):
            t = sub(mul(from_int(k - b + 1), f[b - 1]), gc[b])
            f[b + 1] = mul(t, int_invs[b + 1])
        # odd-output chain determines even-indexed ones, downward:
        # [Rf]_k = c_{k-1}, then c_{b-1} = (g_b + (b+1) c_{b+1}) / (k-b+1)
        f[k - 1] = gc[k]
        for b in range(k - 2, 0, -2):
            t = add(gc[b], mul(from_int(b + 1), f[b + 1]))
            f[b - 1] = mul(t, int_invs[k - b + 1])
        return HomogPoly(ring, k, f), None

    if k == 0:
        # R vanishes on constants: g = s*(x^0+y^0) = 2s
        s = mul(gc[0], int_invs[2] if len(int_invs) > 2 else ring.invert(from_int(2)))
        return HomogPoly.zero(ring, 0), s

    # Even k.  Odd-indexed coefficients and s come from the even-output
    # chain; the ends carry the s term: [Rf]_0 = g_0 - s, [Rf]_k = g_k - s.
    # March once with s = 0; the true chain is linear in s with unit
    # leading coefficient, so the terminal row fixes s (division by 2).
    alpha = neg(gc[0])  # c_1 candidate for s = 0
    prev = alpha
    for b in range(2, k - 1, 2):
        prev = mul(sub(mul(from_int(k - b + 1), prev), gc[b]), int_invs[b + 1])
    s = mul(sub(gc[k], prev), int_invs[2])
    # second pass with s known: c_1 = s - g_0
    f[1] = sub(s, gc[0])
    for b in range(2, k - 1, 2):
        f[b + 1] = mul(sub(mul(from_int(k - b + 1), f[b - 1]), gc[b]), int_invs[b + 1])
    # Even-indexed coefficients from the odd-output chain, anchored by
    # the convention.
    if convention == "N1":
        f[k] = zero
        for b in range(k - 1, 0, -2):
            t = add(gc[b], mul(from_int(b + 1), f[b + 1]))
            f[b - 1] = mul(t, int_invs[k - b + 1])
    else:
        f[0] = zero
        for b in range(1, k, 2):
            t = sub(mul(from_int(k - b + 1), f[b - 1]), gc[b])
            f[b + 1] = mul(t, int_invs[b + 1])
    return HomogPoly(ring, k, f), s


def integer_inverses(ring, bound: int) -> list:
    table = [None] * (bound + 1)
    for i in range(1, bound + 1):
        table[i] = ring.invert(ring.from_int(i))
    return table


class MotionSeries:
    """Truncated formal first integral: parts f_2, f_3, ..., f_K.

    f_2 is always x^2 + y^2.
    """

    __slots__ = ("ring", "parts")

    def __init__(self, ring, parts: list[HomogPoly]):
        if not parts or parts[0].degree != 2:
            raise ValueError("motion series must start at degree 2")
        for i, f in enumerate(parts):
            if f.degree != i + 2:
                raise ValueError(f"part {i} has degree {f.degree}, expected {i + 2}")
        self.ring = ring
        self.parts = parts

    @property
    def max_degree(self) -> int:
        return self.parts[-1].degree

    def part(self, k: int) -> HomogPoly:
        """The degree-k part (zero below degree 2)."""
        if k < 2:
            return HomogPoly.zero(self.ring, max(k, 0))
        return self.parts[k - 2]
