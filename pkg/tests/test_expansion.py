"""Asymptotic expansion engine: recursion, closed forms, resonance handling."""

import math
from fractions import Fraction

import numpy as np
import pytest

from trigcell.expansion import (
    ResonantDirectionError,
    a2_closed_form,
    a4_pole_residue,
    check_nonresonant,
    corrector_recursion,
    expansion_residual,
    reachable_frequencies,
    sole_term,
)
from trigcell.potential import TrigPotential

from conftest import random_nonresonant_direction, random_potential

# irrational-slope direction: far from every small integer hyperplane
Q_GENERIC = (1.0, 0.5 * (math.sqrt(5.0) - 1.0))


def test_reachable_frequencies_small():
    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5), ((0, 1), 0.5)])
    r1 = reachable_frequencies(V, 1)
    assert r1 == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    r2 = reachable_frequencies(V, 2)
    assert (1, 1) in r2 and (2, 0) in r2 and (1, -1) in r2
    assert (0, 0) not in r2


def test_check_nonresonant_exact_rational():
    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5), ((1, 1), 0.5)])
    # (2,-1) = 3*k1 - k2 is reachable at order 4 and perpendicular to (1,2)
    assert check_nonresonant(V, (Fraction(1), Fraction(2)), 4) == 0.0
    assert check_nonresonant(V, (Fraction(1), Fraction(2)), 2) > 0


def test_resonant_direction_raises():
    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5), ((1, 1), 0.5)])
    with pytest.raises(ResonantDirectionError):
        corrector_recursion(V, (1.0, 2.0), 4)


def test_a0_a1_trivial(rng):
    V = random_potential(rng)
    Q = random_nonresonant_direction(rng, V)
    res = corrector_recursion(V, Q, 2)
    assert res.a[0] == pytest.approx(0.5 * float(np.dot(Q, Q)))
    assert res.a[1] == pytest.approx(V.mean)


def test_a2_matches_closed_form(rng):
    for _ in range(10):
        V = random_potential(rng)
        Q = random_nonresonant_direction(rng, V)
        res = corrector_recursion(V, Q, 2)
        assert res.a[2] == pytest.approx(a2_closed_form(V, Q), abs=1e-13)


def test_corrector_solves_order_equations(rng):
    """Each order of the recursion satisfies its matching equation pointwise."""
    V = random_potential(rng)
    Q = np.asarray(Q_GENERIC)
    res = corrector_recursion(V, Q, 3)
    xs = rng.random((40, 2))
    g = [v.gradient(xs) for v in res.correctors]
    # order 1: Q.Dv1 + V = a1
    lhs1 = g[0] @ Q + V.eval(xs)
    assert np.allclose(lhs1, res.a[1], atol=1e-10)
    # order 2: Q.Dv2 + 0.5 |Dv1|^2 = a2
    lhs2 = g[1] @ Q + 0.5 * np.sum(g[0] ** 2, axis=-1)
    assert np.allclose(lhs2, res.a[2], atol=1e-10)
    # order 3: Q.Dv3 + Dv1.Dv2 = a3
    lhs3 = g[2] @ Q + np.sum(g[0] * g[1], axis=-1)
    assert np.allclose(lhs3, res.a[3], atol=1e-9)


def test_correctors_are_real_valued(rng):
    V = random_potential(rng)
    Q = random_nonresonant_direction(rng, V)
    res = corrector_recursion(V, Q, 4)
    for v in res.correctors:
        assert v.hermitian_defect() < 1e-12


def test_corrector_zero_mean(rng):
    V = random_potential(rng)
    Q = random_nonresonant_direction(rng, V)
    res = corrector_recursion(V, Q, 4)
    zero = (0,) * V.dim
    for v in res.correctors:
        assert zero not in v.coeffs


def test_expansion_scaling_symmetry(rng):
    """a_l(s*Q) = s^{-2(l-1)} * ... only a0 scales; check a2 under Q -> 2Q."""
    V = random_potential(rng)
    Q = random_nonresonant_direction(rng, V)
    r1 = corrector_recursion(V, Q, 2)
    r2 = corrector_recursion(V, 2.0 * np.asarray(Q), 2)
    assert r2.a[2] == pytest.approx(r1.a[2] / 4.0)


def test_residual_decays_with_eps(rng):
    V = random_potential(rng)
    Q = np.asarray(Q_GENERIC)
    res = corrector_recursion(V, Q, 4)
    xs = rng.random((60, 2))
    r1 = expansion_residual(V, res, 1e-2, xs)
    r2 = expansion_residual(V, res, 5e-3, xs)
    assert r2 < r1


def test_sole_term_input_validation():
    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5), ((0, 1), 0.5)])
    with pytest.raises(ValueError):
        sole_term(V, 0, 0, 1, 1, Q_GENERIC)
    with pytest.raises(ValueError):
        sole_term(V, 0, 1, 2, 1, Q_GENERIC)
    with pytest.raises(ValueError):
        # orthogonal pair excluded
        sole_term(V, 0, 1, 1, 1, Q_GENERIC)


def test_sole_term_pole_constant():
    """The isolated pole of a_4: extrapolated residue matches the closed form.

    This pins the overall constant of the pair-vector term; the recursion and
    the closed form are independent code paths.
    """
    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5), ((1, 1), 0.4)])
    w = np.array([2.0, 1.0])  # k1 + k2
    perp = np.array([-1.0, 2.0]) / math.sqrt(5.0)
    path = [1.7 * perp + t * w / 5.0 for t in (0.02, 0.015, 0.01, 0.005)]
    residue = a4_pole_residue(V, w, path)
    Q_near = 1.7 * perp + 1e-9 * w / 5.0
    closed = sole_term(V, 0, 1, 1, 1, Q_near) * float(w @ Q_near) ** 2
    assert residue == pytest.approx(closed, rel=1e-4)


def test_min_denominator_reported(rng):
    V = random_potential(rng)
    Q = random_nonresonant_direction(rng, V)
    res = corrector_recursion(V, Q, 4)
    assert res.min_denominator == pytest.approx(check_nonresonant(V, Q, 4))
