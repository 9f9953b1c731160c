"""Homogeneous polynomial arithmetic and the rotation operator."""

import random
from fractions import Fraction

import pytest

from focalvalues.homog import (
    HomogPoly,
    diff_x,
    diff_y,
    multiply,
    power_sum,
    rotation_apply,
    rotation_solve,
)
from focalvalues.rings import NonInvertibleError, PrimeField, RationalField

from oracle import naive_rotation_solve

F29 = PrimeField(29)
Q = RationalField()


def hp(ring, ints):
    return HomogPoly.from_ints(ring, len(ints) - 1, ints)


def rand_poly(ring, k, rng, span=28):
    return HomogPoly.from_ints(ring, k, [rng.randrange(span + 1) for _ in range(k + 1)])


def test_multiply_examples():
    assert multiply(hp(Q, [1, 1]), hp(Q, [1, -1])).coeffs == [1, 0, -1]
    f = hp(Q, [2, 3, 4])
    zero3 = HomogPoly.zero(Q, 3)
    assert multiply(f, zero3) == HomogPoly.zero(Q, 5)
    circ = hp(Q, [1, 0, 1])
    assert multiply(circ, circ).coeffs == [1, 0, 2, 0, 1]


def test_multiply_ring_mismatch():
    with pytest.raises(ValueError):
        multiply(hp(Q, [1, 1]), hp(F29, [1, 1]))


def test_diff_examples():
    circ = hp(Q, [1, 0, 1])
    assert diff_x(circ).coeffs == [2, 0]
    assert diff_y(circ).coeffs == [0, 2]
    assert diff_x(hp(Q, [0, 1, 0, 0])).coeffs == [0, 2, 0]  # d/dx x^2 y = 2xy
    assert diff_x(hp(Q, [5])) == HomogPoly.zero(Q, 0)  # structural zero, no error


def test_leibniz():
    rng = random.Random(2)
    for _ in range(100):
        f = rand_poly(F29, rng.randint(1, 6), rng)
        g = rand_poly(F29, rng.randint(1, 6), rng)
        lhs = diff_x(multiply(f, g))
        rhs = multiply(diff_x(f), g).add(multiply(f, diff_x(g)))
        assert lhs == rhs
        lhs = diff_y(multiply(f, g))
        rhs = multiply(diff_y(f), g).add(multiply(f, diff_y(g)))
        assert lhs == rhs


def test_rotation_apply_examples():
    assert rotation_apply(hp(Q, [1, 0, 1])) == HomogPoly.zero(Q, 2)
    # R(x^2 y) = 2xy^2 - x^3
    assert rotation_apply(hp(Q, [0, 1, 0, 0])).coeffs == [-1, 0, 2, 0]


def test_rotation_apply_matches_matrix_form():
    # build the (k+1)x(k+1) matrix of R from the images of the monomials
    rng = random.Random(4)
    k = 5
    cols = []
    for a in range(k + 1):
        e = [Fraction(0)] * (k + 1)
        e[a] = Fraction(1)
        cols.append(rotation_apply(HomogPoly(Q, k, e)).coeffs)
    for _ in range(50):
        c = [Fraction(rng.randint(-9, 9)) for _ in range(k + 1)]
        expected = [
            sum(cols[a][b] * c[a] for a in range(k + 1)) for b in range(k + 1)
        ]
        assert rotation_apply(HomogPoly(Q, k, c)).coeffs == expected


def test_rotation_kernel():
    circ = hp(Q, [1, 0, 1])
    f = HomogPoly(Q, 0, [Q.one])
    for m in range(1, 14):
        f = multiply(f, circ)
        assert rotation_apply(f).is_zero(), m


def test_rotation_solve_zero_odd():
    f, s = rotation_solve(HomogPoly.zero(Q, 5))
    assert f == HomogPoly.zero(Q, 5) and s is None


def test_rotation_solve_pure_complement():
    for conv in ("N1", "N2"):
        f, s = rotation_solve(power_sum(Q, 4), conv)
        assert rotation_apply(f).is_zero()
        assert s == 1
        assert f == HomogPoly.zero(Q, 4)


def test_rotation_solve_round_trip():
    rng = random.Random(5)
    for ring, span in ((F29, 28), (Q, 9)):
        for k in range(1, 27):
            g = rand_poly(ring, k, rng, span)
            for conv in ("N1", "N2"):
                f, s = rotation_solve(g, conv)
                back = rotation_apply(f)
                if k % 2 == 0:
                    back = back.add(power_sum(ring, k).scale(s))
                else:
                    assert s is None
                assert back == g, (ring, k, conv)


def test_rotation_solve_convention_difference_is_kernel():
    rng = random.Random(6)
    for k in (2, 4, 6, 8, 10):
        g = rand_poly(Q, k, rng, 9)
        f1, s1 = rotation_solve(g, "N1")
        f2, s2 = rotation_solve(g, "N2")
        assert s1 == s2
        diff = f1.sub(f2)
        # difference must be a multiple of (x^2+y^2)^(k/2)
        kernel = HomogPoly(Q, 0, [Q.one])
        circ = hp(Q, [1, 0, 1])
        for _ in range(k // 2):
            kernel = multiply(kernel, circ)
        lam = diff.coeffs[0]
        assert diff == kernel.scale(lam)


def test_rotation_solve_small_modulus_rejected():
    F5 = PrimeField(5)
    g = HomogPoly.from_ints(F5, 6, [1, 2, 3, 4, 0, 1, 2])
    with pytest.raises(NonInvertibleError):
        rotation_solve(g)


def test_rotation_solve_matches_oracle():
    rng = random.Random(7)
    for k in range(1, 11):
        for conv in ("N1", "N2"):
            for _ in range(5):
                g = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(k + 1)]
                f, s = rotation_solve(HomogPoly(Q, k, g), conv)
                f_o, s_o = naive_rotation_solve(g, conv)
                assert f.coeffs == f_o
                assert s == s_o or (s is None and s_o is None)


def test_structural_zero_degree():
    z = HomogPoly.zero(F29, 7)
    assert z.degree == 7 and len(z.coeffs) == 8 and z.is_zero()
    with pytest.raises(ValueError):
        HomogPoly(F29, 3, [1, 2])
