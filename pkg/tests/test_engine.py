"""The focal-value recursion: centers, the reference point, invariants."""

import random
from fractions import Fraction

import pytest

from focalvalues.engine import (
    COEFFICIENT_NAMES,
    COEFFICIENT_WEIGHTS,
    PolySystem,
    TermLimitExceeded,
    coefficient_names,
    evaluate_sequence_mod,
    evaluate_sequence_rational,
    first_nonzero,
    focal_values,
    symbolic_focal_values,
    verify_identity,
)
from focalvalues.homog import HomogPoly
from focalvalues.rings import PrimeField, RationalField
from focalvalues.systemio import REFERENCE_COEFFS

from oracle import naive_focal_values_cubic

F29 = PrimeField(29)
Q = RationalField()

HAMILTONIAN = [1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0]  # q = x^2, p = 2xy
REVERSIBLE = [0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0]   # q = xy, p = x^2+y^2


def rand_system(rng, ring=F29, span=28):
    return PolySystem.cubic(ring, [rng.randint(0, span) for _ in range(14)])


def test_coefficient_layout():
    assert COEFFICIENT_NAMES == (
        "q20", "q11", "q02", "q30", "q21", "q12", "q03",
        "p20", "p11", "p02", "p30", "p21", "p12", "p03",
    )
    assert COEFFICIENT_WEIGHTS == (1, 1, 1, 2, 2, 2, 2, 1, 1, 1, 2, 2, 2, 2)
    assert coefficient_names(2) == ("q20", "q11", "q02", "p20", "p11", "p02")


def test_linear_center():
    sys = PolySystem.cubic(F29, [0] * 14)
    seq, motion = focal_values(sys, 8, keep_motion=True)
    assert seq.values == [0] * 8
    assert seq.first_nonzero is None
    for part in motion.parts[1:]:
        assert part.is_zero()


def test_hamiltonian_center():
    # divergence-free: H = x^2/2 + y^2/2 + x^2 y is a constant of motion
    for ring in (F29, Q):
        sys = PolySystem.cubic(ring, HAMILTONIAN)
        seq, _ = focal_values(sys, 8)
        assert all(ring.is_zero(v) for v in seq.values)
    assert first_nonzero(PolySystem.cubic(F29, HAMILTONIAN), 12) is None


def test_reversible_center():
    # q odd in y, p even in y: symmetric about the x-axis
    for ring in (F29, Q):
        sys = PolySystem.cubic(ring, REVERSIBLE)
        seq, _ = focal_values(sys, 8)
        assert all(ring.is_zero(v) for v in seq.values)


def test_reference_point_vanishing():
    sys = PolySystem.cubic(F29, REFERENCE_COEFFS)
    seq, _ = focal_values(sys, 12)
    assert seq.values[:11] == [0] * 11
    assert seq.values[11] != 0
    assert seq.first_nonzero == 12
    assert first_nonzero(sys, 12) == 12


def test_reference_point_identity_through_26():
    sys = PolySystem.cubic(F29, REFERENCE_COEFFS)
    seq, motion = focal_values(sys, 12, keep_motion=True)
    assert verify_identity(sys, motion, seq, 26)


def test_identity_random_and_perturbed():
    rng = random.Random(11)
    sys = rand_system(rng)
    seq, motion = focal_values(sys, 5, keep_motion=True)
    assert verify_identity(sys, motion, seq, 12)
    # perturb one coefficient of f_5: the identity must break
    f5 = motion.part(5)
    f5.coeffs[2] = (f5.coeffs[2] + 1) % 29
    assert not verify_identity(sys, motion, seq, 12)


def test_identity_rational():
    rng = random.Random(12)
    for _ in range(5):
        sys = PolySystem.cubic(Q, [rng.randint(-3, 3) for _ in range(14)])
        seq, motion = focal_values(sys, 4, keep_motion=True)
        assert verify_identity(sys, motion, seq, 10)


def test_ring_compatibility_mod_29():
    # Rational values reduced mod 29 match the F_29 engine (j <= 6:
    # denominators only involve integers < 2j+3, all invertible)
    rng = random.Random(13)
    for _ in range(20):
        ints = [rng.randint(0, 28) for _ in range(14)]
        seq_q, _ = focal_values(PolySystem.cubic(Q, ints), 6)
        seq_p, _ = focal_values(PolySystem.cubic(F29, ints), 6)
        for vq, vp in zip(seq_q.values, seq_p.values):
            assert vq.numerator * pow(vq.denominator, -1, 29) % 29 == vp


def test_reference_lifted_to_rationals_matches_mod_29():
    # coefficients read as integers, recursion run exactly over Q, then
    # reduced mod 29: must agree with the F_29 engine and vanish, j <= 4
    vals_q = naive_focal_values_cubic(REFERENCE_COEFFS, 4)
    seq_p, _ = focal_values(PolySystem.cubic(F29, REFERENCE_COEFFS), 4)
    for vq, vp in zip(vals_q, seq_p.values):
        assert vq.numerator * pow(vq.denominator, -1, 29) % 29 == vp == 0


def test_matches_oracle():
    rng = random.Random(14)
    for _ in range(10):
        ints = [rng.randint(-4, 4) for _ in range(14)]
        seq, _ = focal_values(PolySystem.cubic(Q, ints), 4)
        assert seq.values == naive_focal_values_cubic(ints, 4)


def test_weighted_homogeneity():
    rng = random.Random(15)
    for _ in range(10):
        sys = rand_system(rng)
        lam = rng.randint(1, 28)
        scaled = [
            c * pow(lam, w, 29) % 29
            for c, w in zip(
                [c for c in sys.coefficient_vector()], COEFFICIENT_WEIGHTS
            )
        ]
        seq, _ = focal_values(sys, 6)
        seq_s, _ = focal_values(PolySystem.cubic(F29, scaled), 6)
        for j, (v, vs) in enumerate(zip(seq.values, seq_s.values), start=1):
            assert vs == v * pow(lam, 2 * j, 29) % 29


def test_first_nonzero_convention_independent():
    rng = random.Random(16)
    for _ in range(1000):
        ints = [rng.randint(0, 28) for _ in range(14)]
        sys = PolySystem.cubic(F29, ints)
        assert first_nonzero(sys, 8) == first_nonzero(sys, 8, "N2")


def test_early_exit_matches_full_scan():
    rng = random.Random(17)
    for _ in range(1000):
        sys = rand_system(rng)
        seq, _ = focal_values(sys, 8)
        assert first_nonzero(sys, 8) == seq.first_nonzero


def test_quadratic_systems_supported():
    # d = 2: a reversible quadratic center
    ring = F29
    q2 = HomogPoly.from_ints(ring, 2, [0, 1, 0])
    p2 = HomogPoly.from_ints(ring, 2, [1, 0, 1])
    sys = PolySystem(ring, [q2], [p2])
    assert sys.degree == 2
    seq, _ = focal_values(sys, 6)
    assert seq.values == [0] * 6
    # and a generic quadratic focus
    q2 = HomogPoly.from_ints(ring, 2, [3, 1, 4])
    p2 = HomogPoly.from_ints(ring, 2, [1, 5, 9])
    seq, _ = focal_values(PolySystem(ring, [q2], [p2]), 3)
    assert seq.first_nonzero == 1


def test_engine_guards():
    sys = PolySystem.cubic(F29, [0] * 14)
    with pytest.raises(ValueError):
        focal_values(sys, 0)
    with pytest.raises(ValueError):
        focal_values(sys, 5, convention="N3")
    small = PolySystem.cubic(PrimeField(7), [0] * 14)
    with pytest.raises(ValueError, match="2N\\+5"):
        focal_values(small, 12)


def test_symbolic_small():
    seq, ring = symbolic_focal_values(3, 2)
    s1, s2 = seq.values
    weights = COEFFICIENT_WEIGHTS
    assert ring.weighted_degrees(s1, weights) == {2}
    assert ring.weighted_degrees(s2, weights) == {4}
    # s_1 at the reference point vanishes mod 29
    assert ring.evaluate_mod(s1, list(REFERENCE_COEFFS), F29) == 0
    assert ring.evaluate_mod(s2, list(REFERENCE_COEFFS), F29) == 0


def test_symbolic_matches_scalar_rational():
    seq, ring = symbolic_focal_values(3, 2)
    rng = random.Random(18)
    for _ in range(30):
        pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(14)]
        sym_vals = evaluate_sequence_rational(seq, ring, pt)
        scalar, _ = focal_values(PolySystem.from_coefficients(Q, pt), 2)
        assert sym_vals == scalar.values


def test_symbolic_matches_scalar_mod_p():
    seq, ring = symbolic_focal_values(3, 3)
    rng = random.Random(19)
    for _ in range(30):
        pt = [rng.randint(0, 28) for _ in range(14)]
        sym_vals = evaluate_sequence_mod(seq, ring, pt, F29)
        scalar, _ = focal_values(PolySystem.cubic(F29, pt), 3)
        assert sym_vals == scalar.values


def test_symbolic_quadratic_weights():
    seq, ring = symbolic_focal_values(2, 3)
    weights = (1, 1, 1, 1, 1, 1)
    for j, poly in enumerate(seq.values, start=1):
        assert ring.weighted_degrees(poly, weights) <= {2 * j}


def test_symbolic_term_limit():
    with pytest.raises(TermLimitExceeded):
        symbolic_focal_values(3, 4, term_limit=100)


def test_motion_window_pruning_matches_full():
    # evaluation mode retains only the convection window; values must
    # match the keep_motion run
    rng = random.Random(20)
    sys = rand_system(rng)
    lean, _ = focal_values(sys, 6)
    full, motion = focal_values(sys, 6, keep_motion=True)
    assert lean.values == full.values
    assert motion.max_degree == 14
