"""Coefficient rings for the focal-value recursion.

All rings follow the same duck-typed interface: a ring object holds the
arithmetic, elements are plain Python values (int residues for prime
fields, Fraction for rationals, (value, gradient) tuples for dual
numbers, exponent-dict for sparse polynomials).  Elements are immutable
and operations are pure, so any ring value can be shared freely between
threads or worker processes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

__all__ = [
    "NonInvertibleError",
    "PrimeField",
    "RationalField",
    "DualRing",
    "SparsePolyRing",
    "is_prime",
    "mod_invert",
    "mod_sqrt",
]


class NonInvertibleError(ZeroDivisionError):
    """Raised when inverting a non-unit of a ring."""


_M64 = (1 << 64) - 1


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n < 3_215_031_751 (> 2^31)."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field F_p for a machine-word prime p < 2^31.

    Elements are canonical int residues in [0, p).
    """

    def __init__(self, p: int):
        if not (2 <= p < 2**31):
            raise ValueError(f"modulus must satisfy 2 <= p < 2^31, got {p}")
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p
        self.zero = 0
        self.one = 1 % p

    def __repr__(self):
        return f"PrimeField({self.p})"

    @property
    def name(self) -> str:
        return f"F_{self.p}"

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def invert(self, a: int) -> int:
        """Multiplicative inverse; raises on the non-invertible element 0."""
        a %= self.p
        if a == 0:
            raise NonInvertibleError(f"0 is not invertible mod {self.p}")
        return pow(a, self.p - 2, self.p)

    # generic-ring alias
    inv = invert

    def is_zero(self, a: int) -> bool:
        return a % self.p == 0

    def legendre(self, a: int) -> int:
        """Legendre symbol as 1 / -1 / 0."""
        a %= self.p
        if a == 0:
            return 0
        t = pow(a, (self.p - 1) // 2, self.p)
        return -1 if t == self.p - 1 else t

    def sqrt(self, a: int) -> tuple[int, ...]:
        """All square roots of a, smaller canonical residue first.

        Returns () when a is a non-residue, (0,) for a = 0, and the two
        roots (r, p-r) otherwise.  Tonelli-Shanks for p = 1 mod 4.
        """
        p = self.p
        a %= p
        if a == 0:
            return (0,)
        if p == 2:
            return (a,)
        if self.legendre(a) != 1:
            return ()
        if p % 4 == 3:
            r = pow(a, (p + 1) // 4, p)
        else:
            r = self._tonelli(a)
        r2 = p - r
        return (r, r2) if r < r2 else (r2, r)

    def _tonelli(self, a: int) -> int:
        p = self.p
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while self.legendre(z) != -1:
            z += 1
        m, c = s, pow(z, q, p)
        t, r = pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t * t % p, 1
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r

    def invert_range(self, bound: int) -> list[int]:
        """Inverses of 1..bound as a lookup table (index 0 unused)."""
        if bound >= self.p:
            raise NonInvertibleError(
                f"cannot invert {self.p} or larger mod {self.p}"
            )
        table = [0] * (bound + 1)
        if bound >= 1:
            table[1] = 1 % self.p
        for i in range(2, bound + 1):
            table[i] = -(self.p // i) * table[self.p % i] % self.p
        return table


def mod_invert(a: int, field: PrimeField) -> int:
    return field.invert(a)


def mod_sqrt(a: int, field: PrimeField) -> tuple[int, ...]:
    return field.sqrt(a)


class RationalField:
    """Exact rationals, backed by fractions.Fraction.

    Fraction already guarantees the representation invariants (lowest
    terms, positive denominator, canonical 0/1).
    """

    zero = Fraction(0)
    one = Fraction(1)
    name = "Q"

    def __repr__(self):
        return "RationalField()"

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def sub(self, a: Fraction, b: Fraction) -> Fraction:
        return a - b

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def invert(self, a: Fraction) -> Fraction:
        if a == 0:
            raise NonInvertibleError("0 is not invertible in Q")
        return 1 / a

    inv = invert

    def is_zero(self, a: Fraction) -> bool:
        return a == 0


class DualRing:
    """Dual numbers base[eps]/(eps^2) with a vector infinitesimal part.

    Elements are (value, gradient) with gradient a tuple of `width` base
    elements; (a+eps*u)(b+eps*v) = ab + eps(av+bu) exactly.  One engine
    pass over this ring yields a full width-column Jacobian row per
    focal value.
    """

    def __init__(self, base, width: int):
        self.base = base
        self.width = width
        bz = base.zero
        self._zgrad = (bz,) * width
        self.zero = (bz, self._zgrad)
        self.one = (base.one, self._zgrad)

    def __repr__(self):
        return f"DualRing({self.base!r}, width={self.width})"

    @property
    def name(self) -> str:
        return f"{self.base.name}[eps]^{self.width}"

    def from_int(self, n: int):
        return (self.base.from_int(n), self._zgrad)

    def variable(self, value, index: int):
        """Lift a base value as the `index`-th tracked parameter."""
        g = list(self._zgrad)
        g[index] = self.base.one
        return (value, tuple(g))

    def constant(self, value):
        return (value, self._zgrad)

    def add(self, a, b):
        badd = self.base.add
        return (badd(a[0], b[0]), tuple(map(badd, a[1], b[1])))

    def sub(self, a, b):
        bsub = self.base.sub
        return (bsub(a[0], b[0]), tuple(map(bsub, a[1], b[1])))

    def mul(self, a, b):
        base = self.base
        av, ag = a
        bv, bg = b
        return (
            base.mul(av, bv),
            tuple(
                base.add(base.mul(av, y), base.mul(bv, x))
                for x, y in zip(ag, bg)
            ),
        )

    def neg(self, a):
        bneg = self.base.neg
        return (bneg(a[0]), tuple(map(bneg, a[1])))

    def invert(self, a):
        # (v + eps u)^-1 = v^-1 - eps v^-2 u
        base = self.base
        iv = base.invert(a[0])
        iv2 = base.neg(base.mul(iv, iv))
        return (iv, tuple(base.mul(iv2, x) for x in a[1]))

    inv = invert

    def is_zero(self, a) -> bool:
        base = self.base
        return base.is_zero(a[0]) and all(base.is_zero(x) for x in a[1])

    def value(self, a):
        return a[0]

    def gradient(self, a) -> tuple:
        return a[1]


class SparsePolyRing:
    """Sparse multivariate polynomials over Q in a fixed variable list.

    Elements are dicts mapping exponent tuples to nonzero Fraction
    coefficients; the empty dict is zero.  Used to run the recursion
    with the system coefficients as indeterminates.
    """

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.zero: dict = {}
        self._zexp = (0,) * self.nvars
        self.one = {self._zexp: Fraction(1)}

    def __repr__(self):
        return f"SparsePolyRing({list(self.names)!r})"

    @property
    def name(self) -> str:
        return f"Q[{','.join(self.names)}]"

    def from_int(self, n: int) -> dict:
        return {} if n == 0 else {self._zexp: Fraction(n)}

    def variable(self, index: int) -> dict:
        e = [0] * self.nvars
        e[index] = 1
        return {tuple(e): Fraction(1)}

    def add(self, a: dict, b: dict) -> dict:
        if not a:
            return dict(b)
        if not b:
            return dict(a)
        out = dict(a)
        for e, c in b.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return out

    def sub(self, a: dict, b: dict) -> dict:
        out = dict(a)
        for e, c in b.items():
            s = out.get(e)
            if s is None:
                out[e] = -c
            else:
                s = s - c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return out

    def mul(self, a: dict, b: dict) -> dict:
        if not a or not b:
            return {}
        if len(b) < len(a):
            a, b = b, a
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e)
                if s is None:
                    out[e] = ca * cb
                else:
                    s = s + ca * cb
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return out

    def neg(self, a: dict) -> dict:
        return {e: -c for e, c in a.items()}

    def invert(self, a: dict) -> dict:
        if len(a) == 1 and self._zexp in a:
            return {self._zexp: 1 / a[self._zexp]}
        raise NonInvertibleError("only nonzero constants are units in a polynomial ring")

    inv = invert

    def is_zero(self, a: dict) -> bool:
        return not a

    def term_count(self, a: dict) -> int:
        return len(a)

    def evaluate(self, a: dict, point: Sequence) -> Fraction:
        """Evaluate at a point of Fractions (or ints)."""
        total = Fraction(0)
        for e, c in a.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total += v
        return total

    def evaluate_mod(self, a: dict, point: Sequence[int], field: PrimeField) -> int:
        """Evaluate at integer residues, reducing exactly into F_p.

        Denominators must be invertible mod p.
        """
        p = field.p
        if not a:
            return 0
        # power tables per variable; denominators are few and cached
        max_exp = [0] * self.nvars
        for e in a:
            for i, k in enumerate(e):
                if k > max_exp[i]:
                    max_exp[i] = k
        pows = []
        for x, top in zip(point, max_exp):
            row = [1] * (top + 1)
            for k in range(1, top + 1):
                row[k] = row[k - 1] * x % p
            pows.append(row)
        inv_cache: dict[int, int] = {}
        total = 0
        for e, c in a.items():
            den = c.denominator % p
            if den not in inv_cache:
                inv_cache[den] = field.invert(den)
            v = c.numerator % p * inv_cache[den] % p
            for i, k in enumerate(e):
                if k:
                    v = v * pows[i][k] % p
            total += v
        return total % p

    def weighted_degrees(self, a: dict, weights: Sequence[int]) -> set[int]:
        """Set of weighted total degrees of the monomials of a."""
        return {sum(w * k for w, k in zip(weights, e)) for e in a}

    def format(self, a: dict) -> str:
        """Human-readable form, canonical monomial order."""
        if not a:
            return "0"
        parts = []
        for e in sorted(a, reverse=True):
            c = a[e]
            mono = "*".join(
                f"{n}^{k}" if k > 1 else n
                for n, k in zip(self.names, e)
                if k
            )
            if mono:
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{c}*{mono}")
            else:
                parts.append(str(c))
        out = parts[0]
        for t in parts[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out
