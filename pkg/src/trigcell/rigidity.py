"""Equivalence decision engine for potentials with at most three modes.

Builds the combinatorial pair-sum vector sets and their sole vectors, checks
the double parallelism condition that forces a common scaling, carries the
phase apparatus (the max-over-angles function M with its exact half-period),
and assembles everything into the master decision: do two potentials produce
the same effective Hamiltonian, and if so through which transform?
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .potential import (
    FourierMode,
    InvalidPotentialError,
    Transform,
    TransformRejectedError,
    TrigPotential,
    canonicalize,
    is_parallel,
    primitive_direction,
    transform,
)

PHASE_TOL = 1e-9


# ---------------------------------------------------------------------------
# vector multisets, sole vectors, parallelism relation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorSet:
    """Multiset of nonzero vectors, closed under negation."""

    entries: Counter

    @classmethod
    def from_vectors(cls, vectors) -> "VectorSet":
        counts: Counter = Counter()
        for v in vectors:
            v = tuple(v)
            if all(c == 0 for c in v):
                raise ValueError("zero vector cannot be stored")
            counts[v] += 1
            counts[tuple(-c for c in v)] += 0  # ensure key symmetry below
        # symmetrize: every stored vector appears with its negation
        sym: Counter = Counter()
        seen = set()
        for v in counts:
            neg = tuple(-c for c in v)
            if v in seen:
                continue
            seen.add(v)
            seen.add(neg)
            mult = max(counts[v], counts[neg])
            sym[v] = mult
            sym[neg] = mult
        return cls(sym)

    def multiplicity(self, v) -> int:
        return self.entries.get(tuple(v), 0)

    def vectors(self):
        return [v for v, c in self.entries.items() if c > 0]

    def __contains__(self, v) -> bool:
        return self.multiplicity(v) > 0


def _pair_sums(vectors, require_nonorthogonal: bool = True):
    """Signed sums u_i +/- u_j over pairs i < j; orthogonal pairs optionally skipped."""
    out = []
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            u, v = vectors[i], vectors[j]
            if require_nonorthogonal and sum(a * b for a, b in zip(u, v)) == 0:
                continue
            for sa, sb in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                w = tuple(sa * a + sb * b for a, b in zip(u, v))
                if any(c != 0 for c in w):
                    out.append(w)
    return out


def _build_set(vectors) -> VectorSet:
    base = []
    for u in vectors:
        base.append(tuple(u))
        base.append(tuple(-c for c in u))
    return VectorSet.from_vectors(base + _pair_sums(vectors))


def build_A_set(V: TrigPotential) -> VectorSet:
    """Mode vectors plus signed pair sums of non-orthogonal pairs, with multiplicity.

    Self-pairs (j = l) are excluded: they would only contribute 2*k_j, parallel
    to k_j, and the zero vector.
    """
    return _build_set([m.k for m in V.modes])


def _sole_from(vectors, vector_set: VectorSet) -> set:
    """Pair-combination vectors with total multiplicity exactly 1 in the set.

    Candidates come from every pair, orthogonal or not: an excluded pair sum
    can still coincide with a stored vector (e.g. a mode vector) and then
    counts as sole if nothing else equals it.
    """
    candidates = set(_pair_sums(vectors, require_nonorthogonal=False))
    return {v for v in candidates if vector_set.multiplicity(v) == 1}


def sole_vectors(A: VectorSet, V: TrigPotential) -> set:
    """Sole vectors of V's pair-sum set: pair combinations equal to no other entry."""
    return _sole_from([m.k for m in V.modes], A)


def prec(A: VectorSet, B: VectorSet) -> bool:
    """True iff every entry of A is parallel to some entry of B."""
    bvecs = B.vectors() if isinstance(B, VectorSet) else list(B)
    avecs = A.vectors() if isinstance(A, VectorSet) else list(A)
    for u in avecs:
        if not any(is_parallel(u, v) for v in bvecs):
            return False
    return True


def lemma_geometry_check(u1, u2, u3, alpha2, alpha3) -> bool:
    """Double parallelism condition on the scaled pair-sum sets.

    With alpha1 normalized to 1, builds S1 from (u1,u2,u3) and S2 from the
    alpha-scaled pairs, and returns whether the sole vectors of each are all
    parallel into the other.  True forces alpha2 = alpha3 = 1.
    """
    us = [tuple(u1), tuple(u2), tuple(u3)]
    for i in range(3):
        for j in range(i + 1, 3):
            if is_parallel(us[i], us[j]):
                raise ValueError("vectors must be pairwise non-parallel")
    alphas = [Fraction(1), Fraction(alpha2), Fraction(alpha3)]
    if alphas[1] <= 0 or alphas[2] <= 0:
        raise ValueError("scalings must be positive")
    S1 = _build_set(us)
    scaled = [tuple(a * c for c in u) for a, u in zip(alphas, us)]
    # S2 keeps the unscaled base vectors but scales the pair sums
    base2 = []
    for u in us:
        base2.append(u)
        base2.append(tuple(-c for c in u))
    S2 = VectorSet.from_vectors(base2 + _pair_sums(scaled))
    sole1 = _sole_from(us, S1)
    sole2 = _sole_from(scaled, S2)
    return prec(VectorSet.from_vectors(sole1) if sole1 else _EMPTY, S2) and prec(
        VectorSet.from_vectors(sole2) if sole2 else _EMPTY, S1
    )


class _Empty:
    @staticmethod
    def vectors():
        return []


_EMPTY = _Empty()


# ---------------------------------------------------------------------------
# half-period lattice and the M function
# ---------------------------------------------------------------------------

def lattice_halfperiod(alpha1, alpha2) -> Fraction:
    """Value of l / pi: smallest positive |m + m1*alpha1 + m2*alpha2| over integers.

    Writing alpha_i = n_i / d over the lowest common denominator d, this is
    gcd(d, |n1|, |n2|) / d.
    """
    a1, a2 = Fraction(alpha1), Fraction(alpha2)
    d = math.lcm(a1.denominator, a2.denominator)
    n1 = int(a1 * d)
    n2 = int(a2 * d)
    g = math.gcd(d, abs(n1), abs(n2))
    return Fraction(g, d)


@dataclass(frozen=True)
class MFunctionParams:
    """Parameters of M(t) = max_theta r1 cos t1 + r2 cos t2 + r3 cos(a1 t1 + a2 t2 + t)."""

    r1: float
    r2: float
    r3: float
    alpha1: Fraction
    alpha2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha1", Fraction(self.alpha1))
        object.__setattr__(self, "alpha2", Fraction(self.alpha2))
        if min(self.r1, self.r2, self.r3) <= 0:
            raise ValueError("amplitudes must be positive")

    @property
    def halfperiod(self) -> float:
        """The half-period l (M has period 2l and is strictly monotone on [0, l])."""
        return math.pi * float(lattice_halfperiod(self.alpha1, self.alpha2))


def m_function(params: MFunctionParams, t: float, coarse: int = 256) -> float:
    """Evaluate M(t): coarse grid over the periodicity cell, then local ascent."""
    a1 = float(params.alpha1)
    a2 = float(params.alpha2)
    r = (params.r1, params.r2, params.r3)
    # theta_i is periodic with period 2*pi*(denominator of alpha_i)
    T1 = params.alpha1.denominator
    T2 = params.alpha2.denominator
    n1 = min(max(coarse, 96 * T1), 3072)
    n2 = min(max(coarse, 96 * T2), 3072)
    th1 = np.linspace(0.0, 2.0 * np.pi * T1, n1, endpoint=False)
    th2 = np.linspace(0.0, 2.0 * np.pi * T2, n2, endpoint=False)
    G1, G2 = np.meshgrid(th1, th2, indexing="ij")
    vals = (r[0] * np.cos(G1) + r[1] * np.cos(G2)
            + r[2] * np.cos(a1 * G1 + a2 * G2 + t))

    def f(theta):
        return -(r[0] * math.cos(theta[0]) + r[1] * math.cos(theta[1])
                 + r[2] * math.cos(a1 * theta[0] + a2 * theta[1] + t))

    def fgrad(theta):
        s3 = math.sin(a1 * theta[0] + a2 * theta[1] + t)
        return np.array([
            r[0] * math.sin(theta[0]) + r[2] * a1 * s3,
            r[1] * math.sin(theta[1]) + r[2] * a2 * s3,
        ])

    best = -np.inf
    for idx in np.argsort(vals, axis=None)[::-1][:6]:
        start = np.array([G1.flat[idx], G2.flat[idx]])
        res = minimize(f, start, jac=fgrad, method="BFGS",
                       options={"gtol": 1e-13, "maxiter": 200})
        best = max(best, -res.fun)
    return float(best)


def phase_equivalent(omega: float, omega_t: float, l: float, tol: float = PHASE_TOL):
    """Match two phases modulo the half-period lattice.

    Returns (k, +1) if omega = omega_t + 2*k*l within tol, (k, -1) if
    omega = 2*k*l - omega_t within tol, None otherwise.
    """
    if l <= 0:
        raise ValueError("half-period must be positive")
    kmax = int(math.ceil(2.0 * math.pi / l)) + 1
    for k in range(-kmax, kmax + 1):
        if abs(omega - (omega_t + 2.0 * k * l)) <= tol:
            return (k, 1)
    for k in range(-kmax, kmax + 1):
        if abs(omega - (2.0 * k * l - omega_t)) <= tol:
            return (k, -1)
    return None


# ---------------------------------------------------------------------------
# translation solver
# ---------------------------------------------------------------------------

def _rational_row_reduce(rows):
    """Gaussian elimination over Q; returns pivot row indices."""
    rows = [list(map(Fraction, r)) for r in rows]
    n_cols = len(rows[0]) if rows else 0
    pivots = []
    used = [False] * len(rows)
    col = 0
    while col < n_cols and len(pivots) < len(rows):
        pivot = None
        for i, r in enumerate(rows):
            if not used[i] and r[col] != 0:
                pivot = i
                break
        if pivot is None:
            col += 1
            continue
        used[pivot] = True
        pivots.append(pivot)
        for i, r in enumerate(rows):
            if i != pivot and r[col] != 0:
                f = r[col] / rows[pivot][col]
                rows[i] = [a - f * b for a, b in zip(r, rows[pivot])]
        col += 1
    return pivots


def solve_translation(modes, delta_omega, tol: float = PHASE_TOL, z_range: int = 4):
    """Find x0 with 2*pi*k_j . x0 = delta_omega_j (mod 2*pi) for all j, or None.

    Solves the linear system on a maximal linearly independent subset of the
    mode vectors, sweeping small integer branch offsets on those rows, and
    verifies the dependent congruences.
    """
    if len(modes) != len(delta_omega):
        raise ValueError("modes and phases must have equal length")
    if not modes:
        return np.zeros(0)
    n = len(modes[0])
    basis = _rational_row_reduce(modes)
    others = [j for j in range(len(modes)) if j not in basis]
    K_basis = np.asarray([modes[j] for j in basis], dtype=float)
    rhs0 = np.asarray([delta_omega[j] / (2.0 * math.pi) for j in basis])
    K_all = np.asarray(modes, dtype=float)
    target = np.asarray(delta_omega) / (2.0 * math.pi)

    z_iter = itertools.product(range(-z_range, z_range + 1), repeat=len(basis)) \
        if others else [(0,) * len(basis)]
    for z in z_iter:
        x0, *_ = np.linalg.lstsq(K_basis, rhs0 + np.asarray(z, dtype=float), rcond=None)
        resid = K_all @ x0 - target
        resid -= np.round(resid)
        if np.max(np.abs(resid)) <= tol / (2.0 * math.pi) + 1e-12:
            return np.mod(x0, 1.0)
    return None


# ---------------------------------------------------------------------------
# verdicts and the decision procedure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """Outcome of the equivalence decision."""

    tag: str  # TransformEquivalent | EffectivelyEqual | NotEquivalent | OutOfScope
    transform: Transform | None = None
    scalings: tuple | None = None  # per-mode rational scalings, EffectivelyEqual only
    mode_pairing: tuple | None = None
    witness: str | None = None  # NotEquivalent only
    reason: str | None = None  # OutOfScope only

    @property
    def equivalent(self) -> bool:
        return self.tag in ("TransformEquivalent", "EffectivelyEqual")


def _certify(V1: TrigPotential, V2: TrigPotential, T: Transform,
             tol: float = PHASE_TOL) -> bool:
    """Check that applying T to V2 reproduces V1 within tol."""
    try:
        W = transform(V2, T)
    except TransformRejectedError:
        return False
    V1c = canonicalize(V1)
    if abs(W.mean - V1c.mean) > tol:
        return False
    got = {m.k: m.amplitude for m in W.modes}
    want = {m.k: m.amplitude for m in V1c.modes}
    if set(got) != set(want):
        return False
    return all(abs(got[k] - want[k]) <= tol for k in want)


def _reflected(V: TrigPotential) -> TrigPotential:
    return transform(V, Transform(Fraction(1), (0.0,) * V.dim, -1))


def _mode_scaling(k1, k2) -> Fraction:
    """Rational t > 0 with k2 = t * k1 for parallel canonical integer vectors."""
    for a, b in zip(k1, k2):
        if a != 0:
            return Fraction(b, a)
    raise ValueError("zero vector")


def _express_in_plane(k3, k1, k2):
    """Exact rational (a1, a2) with k3 = a1*k1 + a2*k2, or None."""
    n = len(k3)
    for i in range(n):
        for j in range(i + 1, n):
            det = Fraction(k1[i]) * k2[j] - Fraction(k1[j]) * k2[i]
            if det == 0:
                continue
            a1 = (Fraction(k3[i]) * k2[j] - Fraction(k3[j]) * k2[i]) / det
            a2 = (Fraction(k1[i]) * k3[j] - Fraction(k1[j]) * k3[i]) / det
            if all(a1 * k1[r] + a2 * k2[r] == k3[r] for r in range(n)):
                return a1, a2
            return None
    return None


def _rank(vectors) -> int:
    return len(_rational_row_reduce(list(vectors)))


def _try_transform(V1: TrigPotential, V2: TrigPotential, c: Fraction,
                   pairing, tol: float = PHASE_TOL) -> Transform | None:
    """Look for x0 making V1(x) = V2(x/c + x0); linearly independent modes only."""
    try:
        V2c = transform(V2, Transform(c, (0.0,) * V2.dim, 1))
    except TransformRejectedError:
        return None
    amp2 = {m.k: m.amplitude for m in V2c.modes}
    modes = []
    delta = []
    for j1, _ in pairing:
        k = V1.modes[j1].k
        if k not in amp2:
            return None
        modes.append(k)
        delta.append(cmath.phase(V1.modes[j1].amplitude)
                     - cmath.phase(amp2[k]))
    x0 = solve_translation(modes, delta, tol=tol)
    if x0 is None:
        return None
    T = Transform(c, tuple(np.mod(x0 / float(c), 1.0)), 1)
    if _certify(V1, V2, T, tol=max(tol, 1e-9)):
        return T
    return None


def _planar_transform(V1: TrigPotential, V2: TrigPotential, c: Fraction,
                      pairing, tol: float = PHASE_TOL) -> Transform | None:
    """Phase analysis for three modes spanning a 2-plane (orientation +1 branch).

    Reduces phases on the first two modes by translation and matches the
    residual third phase modulo the half-period lattice.
    """
    try:
        V2c = transform(V2, Transform(c, (0.0,) * V2.dim, 1))
    except TransformRejectedError:
        return None
    ks = [V1.modes[j1].k for j1, _ in pairing]
    amp2 = {m.k: m.amplitude for m in V2c.modes}
    if set(ks) != set(amp2):
        return None
    om1 = [cmath.phase(V1.modes[j1].amplitude) for j1, _ in pairing]
    om2 = [cmath.phase(amp2[k]) for k in ks]
    coords = _express_in_plane(ks[2], ks[0], ks[1])
    if coords is None:
        return None
    a1, a2 = coords
    lp = lattice_halfperiod(a1, a2)  # l / pi
    l = math.pi * float(lp)
    psi1 = (om1[2] - float(a1) * om1[0] - float(a2) * om1[1]) % (2.0 * math.pi)
    psi2 = (om2[2] - float(a1) * om2[0] - float(a2) * om2[1]) % (2.0 * math.pi)
    match = phase_equivalent(psi1, psi2, l, tol=tol)
    if match is None or match[1] != 1:
        return None
    # branch integers: a1*z1 + a2*z2 - z3 = psi_gap / (2*pi), solved exactly
    delta = [w1 - w2 for w1, w2 in zip(om1, om2)]
    gap = delta[2] - float(a1) * delta[0] - float(a2) * delta[1]
    K = round(gap / (2.0 * l))
    if abs(gap - 2.0 * K * l) > 16.0 * tol:
        return None
    d = math.lcm(a1.denominator, a2.denominator)
    n1, n2 = int(a1 * d), int(a2 * d)
    g = int(lp * d)  # gcd(d, |n1|, |n2|)
    # n1*z1 + n2*z2 - d*z3 = K*g via extended gcd
    g12, s1, s2 = _xgcd(n1, n2)
    gg, s12, s3 = _xgcd(g12, -d)
    assert abs(gg) == g
    scale = K * g // gg
    z1 = s1 * s12 * scale
    z2 = s2 * s12 * scale
    x0 = solve_translation(
        ks[:2],
        [delta[0] + 2.0 * math.pi * z1, delta[1] + 2.0 * math.pi * z2],
        tol=tol,
    )
    if x0 is None:
        return None
    T = Transform(c, tuple(np.mod(np.asarray(x0) / float(c), 1.0)), 1)
    if _certify(V1, V2, T, tol=max(tol, 1e-9)):
        return T
    return None


def _xgcd(a: int, b: int):
    """Extended gcd: returns (g, x, y) with a*x + b*y = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _with_orientation(T: Transform, orientation: int) -> Transform:
    if orientation == 1:
        return T
    # V1(x) = V2r(x/c + x0) with V2r(y) = V2(-y) means V1(x) = V2(-x/c - x0)
    return Transform(T.c, tuple(np.mod(-np.asarray(T.x0), 1.0)), -1)


def decide(V1: TrigPotential, V2: TrigPotential, tol: float = PHASE_TOL) -> Verdict:
    """Master equivalence decision for potentials with at most three modes."""
    try:
        V1 = canonicalize(V1)
        V2 = canonicalize(V2)
    except InvalidPotentialError as exc:
        return Verdict("OutOfScope", reason=str(exc))
    if V1.dim != V2.dim:
        return Verdict("OutOfScope", reason="dimension mismatch")
    m = len(V1.modes)
    if m > 3 or len(V2.modes) > 3:
        return Verdict("OutOfScope", reason="more than 3 modes")
    if abs(V1.mean - V2.mean) > tol:
        return Verdict("NotEquivalent", witness="mean-mismatch")
    if len(V2.modes) != m:
        # mode direction sets are determined by the a2 pole directions
        return Verdict("NotEquivalent", witness="direction-mismatch")
    if m == 0:
        return Verdict(
            "TransformEquivalent",
            transform=Transform(Fraction(1), (0.0,) * V1.dim, 1),
            mode_pairing=(),
        )

    # pair modes by primitive direction (unique under pairwise non-parallelism)
    dir2 = {primitive_direction(mode.k): idx for idx, mode in enumerate(V2.modes)}
    pairing = []
    for j, mode in enumerate(V1.modes):
        d = primitive_direction(mode.k)
        if d not in dir2:
            return Verdict("NotEquivalent", witness="direction-mismatch")
        pairing.append((j, dir2[d]))
    pairing = tuple(pairing)

    for j1, j2 in pairing:
        if abs(abs(V1.modes[j1].amplitude) - abs(V2.modes[j2].amplitude)) > tol:
            return Verdict("NotEquivalent", witness="amplitude-mismatch")

    # per-mode rational scalings c_j with k_{2j} = c_j * k_{1j}
    cs = [_mode_scaling(V1.modes[j1].k, V2.modes[j2].k) for j1, j2 in pairing]
    common_c = cs[0] if all(c == cs[0] for c in cs) else None

    ks = [V1.modes[j1].k for j1, _ in pairing]
    dots = {
        (i, j): sum(a * b for a, b in zip(ks[i], ks[j]))
        for i in range(m) for j in range(i + 1, m)
    }

    def attempt(builder):
        for orientation, W2 in ((1, V2), (-1, _reflected(V2))):
            T = builder(W2)
            if T is not None:
                return Verdict(
                    "TransformEquivalent",
                    transform=_with_orientation(T, orientation),
                    mode_pairing=pairing,
                )
        return None

    if m == 1:
        v = attempt(lambda W2: _try_transform(V1, W2, cs[0], pairing, tol))
        if v is not None:
            return v
        return Verdict("NotEquivalent", witness="phase-condition-failed")

    if m == 2:
        if dots[(0, 1)] == 0:
            if common_c is not None:
                v = attempt(lambda W2: _try_transform(V1, W2, common_c, pairing, tol))
                if v is not None:
                    return v
            return Verdict("EffectivelyEqual", scalings=tuple(cs), mode_pairing=pairing)
        if common_c is None:
            return Verdict("NotEquivalent", witness="no-common-scaling")
        v = attempt(lambda W2: _try_transform(V1, W2, common_c, pairing, tol))
        if v is not None:
            return v
        return Verdict("NotEquivalent", witness="phase-condition-failed")

    # m == 3
    orth_pairs = [pair for pair, d in dots.items() if d == 0]
    planar = _rank(ks) == 2

    if len(orth_pairs) == 3:
        # mutually orthogonal triple
        if common_c is not None:
            v = attempt(lambda W2: _try_transform(V1, W2, common_c, pairing, tol))
            if v is not None:
                return v
        return Verdict("EffectivelyEqual", scalings=tuple(cs), mode_pairing=pairing)

    if len(orth_pairs) == 2 and not planar:
        shared = set(orth_pairs[0]) & set(orth_pairs[1])
        if len(shared) == 1:
            # one isolated mode orthogonal to a non-orthogonal coupled pair
            iso = shared.pop()
            coupled = [i for i in range(3) if i != iso]
            if cs[coupled[0]] != cs[coupled[1]]:
                return Verdict("NotEquivalent", witness="no-common-scaling")
            if common_c is not None:
                v = attempt(lambda W2: _try_transform(V1, W2, common_c, pairing, tol))
                if v is not None:
                    return v
            return Verdict("EffectivelyEqual", scalings=tuple(cs), mode_pairing=pairing)

    if not planar:
        # linearly independent generic triple: sole vectors force one scaling
        if common_c is None:
            return Verdict("NotEquivalent", witness="no-common-scaling")
        v = attempt(lambda W2: _try_transform(V1, W2, common_c, pairing, tol))
        if v is not None:
            return v
        return Verdict("NotEquivalent", witness="phase-condition-failed")

    # three modes spanning a 2-plane: full phase apparatus
    if common_c is None:
        return Verdict("NotEquivalent", witness="no-common-scaling")
    v = attempt(lambda W2: _planar_transform(V1, W2, common_c, pairing, tol))
    if v is not None:
        return v
    return Verdict("NotEquivalent", witness="phase-condition-failed")
