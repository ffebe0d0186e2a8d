"""Potential data model: construction, evaluation, canonical form, transforms."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trigcell.potential import (
    FourierMode,
    InvalidPotentialError,
    RealModeForm,
    Transform,
    TransformRejectedError,
    TrigPotential,
    canonical_mode,
    canonicalize,
    is_parallel,
    max_on_torus,
    potential_from_dict,
    potential_to_dict,
    primitive_direction,
    transform,
)

from conftest import random_potential


def test_is_parallel_exact():
    assert is_parallel((2, 4), (1, 2))
    assert is_parallel((2, -4), (-1, 2))
    assert not is_parallel((1, 0), (1, 1))
    assert is_parallel((2, 4, 6), (1, 2, 3))
    assert not is_parallel((2, 4, 6), (1, 2, 4))


def test_primitive_direction():
    assert primitive_direction((4, 6)) == (2, 3)
    assert primitive_direction((-3, 0)) == (-1, 0)
    assert primitive_direction((0, 0, 5)) == (0, 0, 1)


def test_canonical_mode_flip():
    k, lam = canonical_mode((1, -2), 1 + 2j)
    assert k == (-1, 2)
    assert lam == 1 - 2j
    k, lam = canonical_mode((3, 0), 1j)
    assert k == (3, 0) and lam == 1j


def test_zero_mode_rejected():
    with pytest.raises(InvalidPotentialError):
        FourierMode((0, 0), 1.0)
    with pytest.raises(InvalidPotentialError):
        FourierMode((1, 0), 0.0)


def test_parallel_modes_rejected():
    with pytest.raises(InvalidPotentialError):
        TrigPotential.build(2, 0.0, [((1, 1), 0.5), ((2, 2), 0.3)])
    with pytest.raises(InvalidPotentialError):
        TrigPotential.build(2, 0.0, [((1, 1), 0.5), ((-1, -1), 0.3)])


def test_dimension_mismatch_rejected():
    with pytest.raises(InvalidPotentialError):
        TrigPotential.build(2, 0.0, [((1, 0, 0), 0.5)])


def test_build_drops_zero_amplitudes():
    V = TrigPotential.build(2, 0.1, [((1, 0), 0.5), ((0, 1), 0.0)])
    assert len(V.modes) == 1


def test_eval_real_cosine():
    # lam = 0.5 represents cos(2 pi x1)
    V = TrigPotential.build(2, 0.25, [((1, 0), 0.5)])
    assert V.eval(np.array([0.0, 0.3])) == pytest.approx(1.25)
    assert V.eval(np.array([0.5, 0.9])) == pytest.approx(-0.75)
    # complex amplitude r/2 e^{i omega} represents r cos(2 pi k.x + omega)
    lam = 0.35 * cmath.exp(0.7j)
    W = TrigPotential.build(1, 0.0, [((2,), lam)])
    x = 0.13
    assert W.eval(np.array([x])) == pytest.approx(0.7 * math.cos(4 * math.pi * x + 0.7))


def test_eval_batched_matches_scalar(rng):
    V = random_potential(rng)
    xs = rng.random((7, 5, 2))
    batched = V.eval(xs)
    for idx in np.ndindex(7, 5):
        assert batched[idx] == pytest.approx(V.eval(xs[idx]))


def test_grad_finite_difference(rng):
    V = random_potential(rng, dim=3)
    x = rng.random(3)
    g = V.grad(x)
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (V.eval(x + e) - V.eval(x - e)) / (2 * h)
        assert g[i] == pytest.approx(fd, abs=1e-5)


def test_periodicity(rng):
    V = random_potential(rng)
    x = rng.random(2)
    assert V.eval(x) == pytest.approx(V.eval(x + np.array([3.0, -2.0])))


def test_oscillation_bounds_range(rng):
    V = random_potential(rng)
    xs = rng.random((500, 2))
    vals = V.eval(xs)
    assert vals.max() - vals.min() <= V.oscillation() + 1e-12


def test_canonicalize_preserves_values(rng):
    V = random_potential(rng)
    # scramble: flip some modes to the lower half plane
    scrambled = TrigPotential.build(
        V.dim, V.mean,
        [(tuple(-c for c in m.k), m.amplitude.conjugate()) for m in V.modes],
    )
    C = canonicalize(scrambled)
    xs = rng.random((20, 2))
    assert np.allclose(C.eval(xs), V.eval(xs))
    for m in C.modes:
        nz = [c for c in m.k if c != 0]
        assert nz[-1] > 0


def test_canonicalize_ccw_order():
    V = TrigPotential.build(2, 0.0, [((1, 1), 0.5), ((1, 0), 0.5), ((-1, 2), 0.5)])
    C = canonicalize(V)
    angles = [math.atan2(m.k[1], m.k[0]) % math.pi for m in C.modes]
    assert angles == sorted(angles)


def test_real_mode_form_round_trip():
    m = FourierMode((1, 2), 0.3 - 0.4j)
    form = RealModeForm.from_mode(m)
    assert form.r == pytest.approx(1.0)
    back = form.to_mode()
    assert back.k == m.k
    assert back.amplitude == pytest.approx(m.amplitude)


def test_transform_pointwise(rng):
    V = random_potential(rng)
    T = Transform(Fraction(1, 2), (0.3, 0.7), -1)
    W = transform(V, T)
    xs = rng.random((25, 2))
    assert np.allclose(W.eval(xs), V.eval(T.apply_point(xs)), atol=1e-12)


def test_transform_inverse_round_trip(rng):
    V = random_potential(rng)
    T = Transform(Fraction(1, 3), (0.21, 0.84), 1)
    W = transform(V, T)
    back = transform(W, T.inverse())
    C = canonicalize(V)
    assert len(back.modes) == len(C.modes)
    for a, b in zip(back.modes, C.modes):
        assert a.k == b.k
        assert a.amplitude == pytest.approx(b.amplitude)


def test_transform_rejects_fractional_modes():
    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5)])
    with pytest.raises(TransformRejectedError):
        transform(V, Transform(Fraction(2), (0.0, 0.0), 1))


def test_max_on_torus_known_values():
    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5), ((0, 1), 0.5)])
    assert max_on_torus(V) == pytest.approx(2.0, abs=1e-9)
    W = TrigPotential.build(1, 1.5, [((1,), 0.5 * cmath.exp(0.4j))])
    assert max_on_torus(W) == pytest.approx(2.5, abs=1e-9)


def test_max_on_torus_dominates_samples(rng):
    V = random_potential(rng)
    xs = rng.random((400, 2))
    assert max_on_torus(V) >= V.eval(xs).max() - 1e-9


def test_dict_round_trip(rng, tmp_path):
    from trigcell.potential import load_potential, save_potential

    V = canonicalize(random_potential(rng))
    path = tmp_path / "pot.json"
    save_potential(V, str(path))
    W = load_potential(str(path))
    assert W.dim == V.dim
    assert W.mean == pytest.approx(V.mean)
    for a, b in zip(W.modes, V.modes):
        assert a.k == b.k
        assert a.amplitude == pytest.approx(b.amplitude)


def test_from_dict_rejects_malformed():
    with pytest.raises(InvalidPotentialError):
        potential_from_dict({"mean": 0.0})
    with pytest.raises(InvalidPotentialError):
        potential_from_dict({"dim": 2, "modes": [{"k": [1], "re": 1.0}]})
    with pytest.raises(InvalidPotentialError):
        potential_from_dict(
            {"dim": 2, "modes": [{"k": [1, 1], "re": 1.0},
                                 {"k": [2, 2], "re": 1.0}]})


@settings(max_examples=40, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_parallel_iff_zero_cross_product(a, b, c, d):
    u, v = (a, b), (c, d)
    assert is_parallel(u, v) == (a * d - b * c == 0)
