"""Trigonometric-polynomial periodic potentials on the n-torus.

A potential is stored as a real mean value plus a sparse set of Fourier
modes.  Each stored mode ``(k, lam)`` represents the real summand
``lam * exp(2*pi*i k.x) + conj(lam) * exp(-2*pi*i k.x)``, so the potential is
always real valued.  Mode vectors live in Z^n \\ {0} and must be pairwise
non-parallel.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize


class InvalidPotentialError(ValueError):
    """Raised when mode data violates the potential model (zero or parallel modes)."""


class TransformRejectedError(ValueError):
    """Raised when a translation/scaling would produce non-integer mode vectors."""


def is_parallel(u: Sequence, v: Sequence) -> bool:
    """Exact parallelism test for integer/rational vectors (all 2x2 minors vanish)."""
    n = len(u)
    for i in range(n):
        for j in range(i + 1, n):
            if u[i] * v[j] - u[j] * v[i] != 0:
                return False
    return True


def primitive_direction(k: Sequence[int]) -> tuple[int, ...]:
    """Reduce an integer vector by the gcd of its components."""
    g = math.gcd(*(abs(c) for c in k))
    return tuple(c // g for c in k)


def canonical_mode(k: Sequence[int], amplitude: complex) -> tuple[tuple[int, ...], complex]:
    """Flip (k, lam) -> (-k, conj lam) so the highest-index nonzero entry of k is positive.

    The represented real summand is unchanged.
    """
    k = tuple(int(c) for c in k)
    if all(c == 0 for c in k):
        raise InvalidPotentialError("zero mode vector")
    for c in reversed(k):
        if c != 0:
            if c < 0:
                return tuple(-x for x in k), complex(amplitude).conjugate()
            return k, complex(amplitude)
    raise InvalidPotentialError("zero mode vector")  # pragma: no cover


@dataclass(frozen=True)
class FourierMode:
    """One Fourier mode: integer frequency vector and complex amplitude."""

    k: tuple[int, ...]
    amplitude: complex

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(c) for c in self.k))
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if all(c == 0 for c in self.k):
            raise InvalidPotentialError("zero mode vector")
        if self.amplitude == 0:
            raise InvalidPotentialError("zero amplitude mode must be dropped at construction")


@dataclass(frozen=True)
class RealModeForm:
    """Amplitude/phase form of a mode: r*cos(2*pi*k.x + omega), r > 0."""

    k: tuple[int, ...]
    r: float
    omega: float

    @classmethod
    def from_mode(cls, mode: FourierMode) -> "RealModeForm":
        # lam = (r/2) e^{i omega}
        r = 2.0 * abs(mode.amplitude)
        omega = cmath.phase(mode.amplitude) % (2.0 * math.pi)
        return cls(mode.k, r, omega)

    def to_mode(self) -> FourierMode:
        return FourierMode(self.k, 0.5 * self.r * cmath.exp(1j * self.omega))


@dataclass(frozen=True)
class TrigPotential:
    """Z^n-periodic potential: mean value plus pairwise non-parallel Fourier modes."""

    dim: int
    mean: float
    modes: tuple[FourierMode, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        for mode in self.modes:
            if len(mode.k) != self.dim:
                raise InvalidPotentialError(
                    f"mode {mode.k} has wrong dimension (expected {self.dim})"
                )
        ms = self.modes
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                if is_parallel(ms[i].k, ms[j].k):
                    raise InvalidPotentialError(
                        f"parallel mode vectors {ms[i].k} and {ms[j].k}"
                    )

    @classmethod
    def build(cls, dim: int, mean: float, modes) -> "TrigPotential":
        """Construct from (k, amplitude) pairs, silently dropping zero amplitudes."""
        kept = []
        for k, lam in modes:
            if complex(lam) == 0:
                continue
            kept.append(FourierMode(tuple(k), complex(lam)))
        return cls(dim, float(mean), tuple(kept))

    def eval(self, x) -> float | np.ndarray:
        """Evaluate at x (shape (n,) or (..., n)); 1-periodic in each coordinate."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"point has dimension {x.shape[-1]}, potential has {self.dim}")
        out = np.full(x.shape[:-1], self.mean)
        for mode in self.modes:
            phase = 2.0 * np.pi * (x @ np.asarray(mode.k, dtype=float))
            out = out + 2.0 * (mode.amplitude.real * np.cos(phase)
                               - mode.amplitude.imag * np.sin(phase))
        if out.ndim == 0:
            return float(out)
        return out

    def grad(self, x) -> np.ndarray:
        """Gradient of eval at x (shape (n,) or (..., n))."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for mode in self.modes:
            kv = np.asarray(mode.k, dtype=float)
            phase = 2.0 * np.pi * (x @ kv)
            # d/dx of 2 Re(lam e^{i phase}) = -2*2pi*k * Re(i lam e^{i phase})
            s = -4.0 * np.pi * (mode.amplitude.real * np.sin(phase)
                                + mode.amplitude.imag * np.cos(phase))
            out = out + s[..., None] * kv
        return out

    def oscillation(self) -> float:
        """Cheap upper bound for max V - min V."""
        return 4.0 * sum(abs(m.amplitude) for m in self.modes)


def canonicalize(V: TrigPotential) -> TrigPotential:
    """Return the canonical representative: flipped modes, sorted counter-clockwise for n=2.

    Evaluation is unchanged at every point.  For n != 2 modes are sorted
    lexicographically by frequency vector to get a deterministic order.
    """
    flipped = [canonical_mode(m.k, m.amplitude) for m in V.modes]
    for i in range(len(flipped)):
        for j in range(i + 1, len(flipped)):
            if is_parallel(flipped[i][0], flipped[j][0]):
                raise InvalidPotentialError(
                    f"parallel mode vectors {flipped[i][0]} and {flipped[j][0]}"
                )
    if V.dim == 2:
        # canonical modes live in the upper half plane; angle in [0, pi)
        flipped.sort(key=lambda kl: math.atan2(kl[0][1], kl[0][0]) % math.pi)
    else:
        flipped.sort(key=lambda kl: kl[0])
    return TrigPotential(V.dim, V.mean, tuple(FourierMode(k, lam) for k, lam in flipped))


@dataclass(frozen=True)
class Transform:
    """Translation/scaling of the torus: x -> orientation * x / c + x0.

    ``c`` is an exact nonzero rational, ``x0`` a real translation and
    ``orientation`` +1 or -1 (reflection).
    """

    c: Fraction
    x0: tuple[float, ...]
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if self.c == 0:
            raise ValueError("scaling c must be nonzero")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def apply_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.orientation * x / float(self.c) + np.asarray(self.x0)

    def inverse(self) -> "Transform":
        c = self.c
        o = self.orientation
        x0 = tuple(-float(c) * o * v for v in self.x0)
        return Transform(Fraction(1, 1) / c, x0, o)


def transform(V: TrigPotential, T: Transform) -> TrigPotential:
    """Return W with W(x) = V(orientation*x/c + x0), canonicalized.

    Each mode k maps to orientation*k/c, which must stay integral, and the
    amplitude picks up the phase factor e^{2 pi i k.x0}.
    """
    new_modes = []
    for mode in V.modes:
        lam = mode.amplitude * cmath.exp(
            2j * math.pi * sum(ki * xi for ki, xi in zip(mode.k, T.x0))
        )
        new_k = []
        for ki in mode.k:
            q = Fraction(T.orientation * ki) / T.c
            if q.denominator != 1:
                raise TransformRejectedError(
                    f"mode {mode.k} maps to non-integer vector under c={T.c}"
                )
            new_k.append(int(q))
        new_modes.append((tuple(new_k), lam))
    W = TrigPotential.build(V.dim, V.mean, new_modes)
    return canonicalize(W)


def max_on_torus(V: TrigPotential, resolution: int = 64) -> float:
    """Supremum of V over the torus: grid scan followed by local ascent."""
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    if not V.modes:
        return V.mean
    axes = [np.linspace(0.0, 1.0, resolution, endpoint=False)] * V.dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = V.eval(grid)
    flat = np.argsort(vals, axis=None)[::-1][:8]
    best = -np.inf
    pts = grid.reshape(-1, V.dim)
    for idx in flat:
        res = minimize(
            lambda x: -V.eval(x),
            pts[idx],
            jac=lambda x: -V.grad(x),
            method="BFGS",
            options={"gtol": 1e-12},
        )
        best = max(best, -res.fun)
    return float(best)


def potential_to_dict(V: TrigPotential) -> dict:
    return {
        "dim": V.dim,
        "mean": V.mean,
        "modes": [
            {"k": list(m.k), "re": m.amplitude.real, "im": m.amplitude.imag}
            for m in V.modes
        ],
    }


def potential_from_dict(data: dict) -> TrigPotential:
    """Parse the JSON potential spec; rejects zero vectors, parallel pairs, dim mismatch."""
    try:
        dim = int(data["dim"])
        mean = float(data.get("mean", 0.0))
        raw = data.get("modes", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidPotentialError(f"malformed potential spec: {exc}") from exc
    modes = []
    for entry in raw:
        k = tuple(int(c) for c in entry["k"])
        if len(k) != dim:
            raise InvalidPotentialError(f"mode {k} does not have dimension {dim}")
        lam = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        modes.append((k, lam))
    return canonicalize(TrigPotential.build(dim, mean, modes))


def load_potential(path: str) -> TrigPotential:
    with open(path) as fh:
        return potential_from_dict(json.load(fh))


def save_potential(V: TrigPotential, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(potential_to_dict(V), fh, indent=2)
