"""Large-momentum asymptotic expansion of the effective Hamiltonian.

For a direction Q and the rescaled cell equation

    (1/2)|Q + D phi|^2 + eps*V = a0 + eps*a1 + eps^2*a2 + ...,
    phi = eps*v1 + eps^2*v2 + ...,

matching powers of eps gives, at order l >= 1,

    Q . Dv_l + (1/2) sum_{i+j=l} Dv_i . Dv_j + [l=1]*V = a_l.

Each corrector v_l is a sparse trigonometric polynomial supported on signed
sums of at most l mode vectors of V, so the recursion runs on hash maps of
Fourier coefficients.  a_l is the zero mode of the quadratic convolution and
the nonzero modes determine v_l through division by 2*pi*i*(k.Q).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .potential import TrigPotential


class ResonantDirectionError(ValueError):
    """Q is (nearly) perpendicular to a frequency reachable by the expansion."""


@dataclass(frozen=True)
class FourierSeries:
    """Finite real-valued trigonometric polynomial: sparse map frequency -> coefficient.

    Both orientations of each frequency are stored; Hermitian symmetry
    coeff(-k) = conj(coeff(k)) is an invariant.
    """

    dim: int
    coeffs: dict

    def __call__(self, x) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for k, c in self.coeffs.items():
            phase = 2.0 * np.pi * (x @ np.asarray(k, dtype=float))
            out = out + (c.real * np.cos(phase) - c.imag * np.sin(phase))
        if out.ndim == 0:
            return float(out)
        return out

    def gradient(self, x) -> np.ndarray:
        """Evaluate the gradient (coefficient of e^{2 pi i k.x} is 2 pi i k c_k)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for k, c in self.coeffs.items():
            kv = np.asarray(k, dtype=float)
            phase = 2.0 * np.pi * (x @ kv)
            s = -2.0 * np.pi * (c.real * np.sin(phase) + c.imag * np.cos(phase))
            out = out + s[..., None] * kv
        return out

    def hermitian_defect(self) -> float:
        """Max |coeff(k) - conj(coeff(-k))| over the support."""
        worst = 0.0
        for k, c in self.coeffs.items():
            neg = tuple(-ki for ki in k)
            worst = max(worst, abs(c - self.coeffs.get(neg, 0j).conjugate()))
        return worst


@dataclass(frozen=True)
class ExpansionResult:
    """Coefficients a_0..a_L and correctors v_1..v_L for a direction Q."""

    Q: tuple[float, ...]
    order: int
    a: list[float]
    correctors: list[FourierSeries]
    min_denominator: float


def reachable_frequencies(V: TrigPotential, L: int) -> set[tuple[int, ...]]:
    """Nonzero integer vectors expressible as signed sums of at most L mode vectors."""
    steps = []
    for mode in V.modes:
        steps.append(mode.k)
        steps.append(tuple(-c for c in mode.k))
    reached: set[tuple[int, ...]] = set()
    frontier = {(0,) * V.dim}
    for _ in range(L):
        frontier = {
            tuple(a + b for a, b in zip(base, step))
            for base in frontier
            for step in steps
        } | frontier
    reached = {k for k in frontier if any(c != 0 for c in k)}
    return reached


def check_nonresonant(V: TrigPotential, Q, L: int) -> float:
    """Min |k.Q| over frequencies reachable by the order-L expansion.

    Pass Q with Fraction entries for exact resonance detection.
    """
    if all(q == 0 for q in Q):
        raise ValueError("Q must be nonzero")
    exact = all(isinstance(q, (int, Fraction)) for q in Q)
    best = None
    for k in reachable_frequencies(V, L):
        if exact:
            d = abs(sum(ki * qi for ki, qi in zip(k, Q)))
        else:
            d = abs(sum(ki * float(qi) for ki, qi in zip(k, Q)))
        if best is None or d < best:
            best = d
    return float(best) if best is not None else np.inf


def _convolve(ga: dict, gb: dict) -> dict:
    """Sparse convolution of two vector-coefficient maps under the dot product."""
    out: dict[tuple[int, ...], complex] = {}
    for k1, c1 in ga.items():
        for k2, c2 in gb.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0j) + complex(np.dot(c1, c2))
    return out


def corrector_recursion(
    V: TrigPotential, Q, L: int, eta: float = 1e-8
) -> ExpansionResult:
    """Run the sparse Fourier recursion to order L.

    Returns exact double-precision a_0..a_L and the correctors v_1..v_L.
    Raises ResonantDirectionError if any reachable frequency has |k.Q| < eta.
    """
    if L < 1:
        raise ValueError("expansion order must be at least 1")
    min_denom = check_nonresonant(V, Q, L)
    if min_denom < eta:
        raise ResonantDirectionError(
            f"min |k.Q| = {min_denom:.3e} below threshold {eta:.3e}"
        )
    Qf = np.asarray([float(q) for q in Q], dtype=float)
    a = [0.5 * float(Qf @ Qf)]
    # grad[l]: frequency -> complex vector coefficient of Dv_l (2*pi factors cancel)
    grads: list[dict] = []
    correctors: list[FourierSeries] = []
    for l in range(1, L + 1):
        g: dict[tuple[int, ...], complex | np.ndarray] = {}
        if l == 1:
            g[(0,) * V.dim] = complex(V.mean)
            for mode in V.modes:
                g[mode.k] = g.get(mode.k, 0j) + mode.amplitude
                neg = tuple(-c for c in mode.k)
                g[neg] = g.get(neg, 0j) + mode.amplitude.conjugate()
        for i in range(1, l):
            j = l - i
            if i > j:
                continue
            conv = _convolve(grads[i - 1], grads[j - 1])
            weight = 0.5 if i == j else 1.0  # (i,j) and (j,i) are equal contributions
            for k, c in conv.items():
                g[k] = g.get(k, 0j) + weight * c
        zero = (0,) * V.dim
        a_l = g.pop(zero, 0j)
        if abs(complex(a_l).imag) > 1e-10 * (1.0 + abs(complex(a_l))):
            raise ArithmeticError(f"a_{l} acquired an imaginary part: {a_l}")
        a.append(complex(a_l).real)
        grad_l: dict[tuple[int, ...], np.ndarray] = {}
        vhat_l: dict[tuple[int, ...], complex] = {}
        for k, c in g.items():
            c = complex(c)
            if c == 0:
                continue
            denom = float(np.asarray(k, dtype=float) @ Qf)
            grad_l[k] = (-c / denom) * np.asarray(k, dtype=float)
            vhat_l[k] = -c / (2j * np.pi * denom)
        grads.append(grad_l)
        correctors.append(FourierSeries(V.dim, vhat_l))
    return ExpansionResult(tuple(float(q) for q in Q), L, a, correctors, min_denom)


def a2_closed_form(V: TrigPotential, Q) -> float:
    """Second expansion coefficient: sum_j |lam_j|^2 |k_j|^2 / |k_j.Q|^2."""
    Qf = np.asarray([float(q) for q in Q], dtype=float)
    total = 0.0
    for mode in V.modes:
        kv = np.asarray(mode.k, dtype=float)
        denom = float(kv @ Qf)
        if denom == 0.0:
            raise ResonantDirectionError(f"Q is perpendicular to mode {mode.k}")
        total += abs(mode.amplitude) ** 2 * float(kv @ kv) / denom**2
    return total


def sole_term(
    V: TrigPotential, j1: int, j2: int, alpha: int, beta: int, Q
) -> float:
    """Closed form of the isolated 1/|w.Q|^2 pole coefficient of a_4 for
    the pair vector w = alpha*k_{j1} + beta*k_{j2}.

    The constant in front is 1 (not 1/4): it is pinned down empirically by the
    pole-extraction cross-check in the test suite, which extrapolates
    (w.Q)^2 * a_4 along paths Q -> w-perp using the generic recursion.
    """
    if j1 == j2:
        raise ValueError("indices must be distinct")
    if alpha not in (1, -1) or beta not in (1, -1):
        raise ValueError("alpha, beta must be +1 or -1")
    k1 = np.asarray(V.modes[j1].k, dtype=float)
    k2 = np.asarray(V.modes[j2].k, dtype=float)
    dot = float(k1 @ k2)
    if dot == 0.0:
        raise ValueError("orthogonal mode pair is excluded from the pair-sum set")
    w = alpha * k1 + beta * k2
    Qf = np.asarray([float(q) for q in Q], dtype=float)
    d1 = float(k1 @ Qf)
    d2 = float(k2 @ Qf)
    dw = float(w @ Qf)
    if d1 == 0.0 or d2 == 0.0 or dw == 0.0:
        raise ResonantDirectionError("zero denominator in sole-vector term")
    l1 = abs(V.modes[j1].amplitude)
    l2 = abs(V.modes[j2].amplitude)
    return (
        l1**2 * l2**2 * dot**2 * float(w @ w) / (d1**2 * d2**2 * dw**2)
    )


def a4_pole_residue(V: TrigPotential, w, path, eta: float = 1e-12) -> float:
    """Limit of (w.Q)^2 * a_4(Q) along a path with w.Q -> 0.

    ``path`` is a sequence of Q vectors approaching the hyperplane w-perp; the
    limit is extracted by polynomial extrapolation in the small parameter w.Q.
    """
    wv = np.asarray(w, dtype=float)
    ts = []
    fs = []
    for Q in path:
        Qf = np.asarray([float(q) for q in Q], dtype=float)
        t = float(wv @ Qf)
        res = corrector_recursion(V, Qf, 4, eta=eta)
        ts.append(t)
        fs.append(t * t * res.a[4])
    if len(ts) < 2:
        raise ValueError("path must contain at least two points")
    deg = min(3, len(ts) - 1)
    coef = np.polynomial.polynomial.polyfit(ts, fs, deg)
    return float(coef[0])


def expansion_residual(
    V: TrigPotential, result: ExpansionResult, eps: float, xs
) -> float:
    """Sup over sample points of the cell-equation residual of the truncated ansatz.

    With phi = sum_l eps^l v_l, returns
    sup_x |(1/2)|Q + D phi|^2 + eps*V(x) - sum_{l<=L} eps^l a_l|.
    """
    xs = np.asarray(xs, dtype=float)
    Qf = np.asarray(result.Q, dtype=float)
    grad = np.zeros(xs.shape)
    for l, v in enumerate(result.correctors, start=1):
        grad = grad + eps**l * v.gradient(xs)
    lhs = 0.5 * np.sum((Qf + grad) ** 2, axis=-1) + eps * V.eval(xs)
    rhs = sum(eps**l * al for l, al in enumerate(result.a))
    return float(np.max(np.abs(lhs - rhs)))
