"""Numerical and exact evaluation of the effective Hamiltonian H(p).

The cell constant is approximated through the large-time behaviour of

    w_t + 0.5*|p + Dw|^2 + V = 0,   w(.,0) = 0,

on a periodic grid: Hbar(p) = -lim w/t.  The scheme is a monotone local
Lax-Friedrichs discretization with forward Euler stepping; the constant is
extracted from a two-horizon difference quotient, which cancels the O(1)
corrector transient.  A classical one-dimensional quadrature formula serves
as an independent oracle, and separable potentials decompose block-wise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import _kernels
from .potential import TrigPotential, Transform, transform


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Discretization parameters for the grid solver."""

    grid_points_per_dim: int = 64
    cfl: float = 0.4
    horizon_t1: float | None = None  # default: 0.5 * horizon_t2
    horizon_t2: float | None = None  # default: 50 / (1 + |p|)
    scheme: str = "local-lax-friedrichs"

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise SolverError("cfl must lie in (0, 1)")
        if self.grid_points_per_dim < 8:
            raise SolverError("grid too coarse")
        if self.scheme != "local-lax-friedrichs":
            raise SolverError(f"unknown scheme {self.scheme!r}")
        t1, t2 = self.horizon_t1, self.horizon_t2
        if t1 is not None and t2 is not None and not 0.0 < t1 < t2:
            raise SolverError("horizons must satisfy 0 < T1 < T2")


@dataclass(frozen=True)
class HbarSample:
    """One evaluation of Hbar: momentum, value, and a two-horizon error estimate."""

    p: tuple[float, ...]
    value: float
    error_estimate: float


def hbar_numeric(V: TrigPotential, p, cfg: SolverConfig = SolverConfig()) -> HbarSample:
    """Approximate Hbar(p) on a periodic grid (dimensions 1 to 3)."""
    if V.dim > 3:
        raise SolverError("grid solver supports dimension <= 3; use hbar_separable")
    p = np.asarray(p, dtype=float)
    if p.shape != (V.dim,):
        raise SolverError(f"momentum has shape {p.shape}, expected ({V.dim},)")
    N = cfg.grid_points_per_dim
    dx = 1.0 / N
    axes = [np.arange(N) * dx] * V.dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    Vg = np.asarray(V.eval(grid), dtype=float).reshape((N,) * V.dim)

    # dt sized from the a-priori gradient bound |Dw| <= |p| + sqrt(2 osc V) + 1,
    # which dominates the per-point dissipation coefficients of the kernel
    pnorm = float(np.linalg.norm(p))
    grad_bound = pnorm + math.sqrt(2.0 * V.oscillation()) + 1.0
    sigma_bound = np.abs(p) + grad_bound
    dt = cfg.cfl * dx / float(np.sum(sigma_bound))

    t2 = cfg.horizon_t2 if cfg.horizon_t2 is not None else 50.0 / (1.0 + pnorm)
    t1 = cfg.horizon_t1 if cfg.horizon_t1 is not None else 0.5 * t2
    n1 = max(1, int(math.ceil(t1 / dt)))
    n2 = max(n1 + 1, int(math.ceil(t2 / dt)))

    w = _kernels.evolve(np.zeros((N,) * V.dim), Vg, p, dx, dt, n1)
    mean1 = float(np.mean(w))
    w = _kernels.evolve(w, Vg, p, dx, dt, n2 - n1)
    mean2 = float(np.mean(w))

    value = -(mean2 - mean1) / ((n2 - n1) * dt)
    single = -mean2 / (n2 * dt)
    return HbarSample(tuple(p), value, abs(value - single))


def hbar_1d_exact(W: TrigPotential, p: float, quad_tol: float = 1e-10) -> float:
    """Exact 1-D cell constant via the classical quadrature formula.

    Returns max W when |p| <= p_c = int_0^1 sqrt(2 (max W - W)) dx; otherwise
    the unique h > max W with int_0^1 sqrt(2 (h - W)) dx = |p|.
    """
    if W.dim != 1:
        raise ValueError("hbar_1d_exact requires a one-dimensional potential")
    if not W.modes:
        return 0.5 * p * p + W.mean
    xs = np.linspace(0.0, 1.0, 4097)
    wmax = float(np.max(W.eval(xs[:, None])))
    wmin = float(np.min(W.eval(xs[:, None])))

    def action(h: float) -> float:
        val, err = quad(
            lambda x: math.sqrt(max(2.0 * (h - W.eval(np.array([x]))), 0.0)),
            0.0, 1.0, epsabs=quad_tol, epsrel=quad_tol, limit=200,
        )
        if not math.isfinite(val):
            raise SolverError("quadrature did not converge")
        return val

    p_abs = abs(float(p))
    p_c = action(wmax)
    if p_abs <= p_c:
        return wmax
    lo = max(wmax, wmin + 0.5 * p_abs**2 - 1.0) + 1e-14
    hi = wmax + 0.5 * p_abs**2 + 1.0
    h = brentq(lambda h: action(h) - p_abs, lo, hi, xtol=quad_tol)
    return float(h)


def hbar_separable(parts, p, cfg: SolverConfig = SolverConfig()) -> float:
    """Hbar of a sum of potentials over disjoint consecutive coordinate blocks.

    ``parts`` is a list of (TrigPotential, scaling) pairs; block j contributes
    W_j(c_j * x_block).  The result is the sum of the per-block effective
    Hamiltonians and does not depend on the scalings.
    """
    p = np.asarray(p, dtype=float)
    sizes = [W.dim for W, _ in parts]
    if sum(sizes) != len(p):
        raise ValueError("coordinate blocks do not partition the momentum vector")
    total = 0.0
    offset = 0
    for W, c in parts:
        c = Fraction(c)
        if c != 1:
            W = transform(W, Transform(Fraction(1, 1) / c, (0.0,) * W.dim, 1))
        block_p = p[offset:offset + W.dim]
        if W.dim == 1:
            total += hbar_1d_exact(W, float(block_p[0]))
        else:
            total += hbar_numeric(W, block_p, cfg).value
        offset += W.dim
    return total


def hbar_grid(V: TrigPotential, p_list, cfg: SolverConfig = SolverConfig()) -> list[HbarSample]:
    """Element-wise hbar_numeric over a list of momenta, order preserved."""
    return [hbar_numeric(V, p, cfg) for p in p_list]
