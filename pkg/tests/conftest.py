"""Shared generators for randomized tests.

Potentials are drawn with small integer mode vectors, pairwise non-parallel,
and complex amplitudes bounded away from zero so that phase extraction stays
well conditioned.
"""

import math

import numpy as np
import pytest

from trigcell.potential import TrigPotential, is_parallel


def random_modes(rng, dim, count, kmax=3):
    """Pairwise non-parallel nonzero integer vectors in Z^dim."""
    modes = []
    while len(modes) < count:
        k = tuple(int(c) for c in rng.integers(-kmax, kmax + 1, size=dim))
        if all(c == 0 for c in k):
            continue
        if any(is_parallel(k, m) for m in modes):
            continue
        modes.append(k)
    return modes


def random_potential(rng, dim=2, count=3, kmax=3, mean_scale=0.5):
    ks = random_modes(rng, dim, count, kmax)
    amps = []
    for _ in ks:
        r = 0.2 + 0.6 * rng.random()
        phi = 2.0 * math.pi * rng.random()
        amps.append(r * np.exp(1j * phi))
    mean = mean_scale * (2.0 * rng.random() - 1.0)
    return TrigPotential.build(dim, mean, list(zip(ks, amps)))


def random_nonresonant_direction(rng, V, order=4, min_denom=1e-2, norm=1.5):
    """Random direction of fixed norm with all order-L denominators bounded below."""
    from trigcell.expansion import check_nonresonant

    for _ in range(500):
        Q = rng.normal(size=V.dim)
        Q = norm * Q / np.linalg.norm(Q)
        if check_nonresonant(V, Q, order) >= min_denom:
            return Q
    raise RuntimeError("could not sample a non-resonant direction")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
