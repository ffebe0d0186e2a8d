"""Pure-numpy local Lax-Friedrichs evolution kernel (fallback backend).

Evolves w_t + 0.5*|p + Dw|^2 + V = 0 on a periodic grid with forward Euler
and one-sided differences; the dissipation coefficient in each dimension is
max(|p_i + D_i^+ w|, |p_i + D_i^- w|) at each point, which keeps the scheme
monotone under the caller's CFL step while dissipating far less than the
global a-priori bound.  Used when the compiled extension is unavailable;
same contract as ``llf_cython``.
"""

from __future__ import annotations

import numpy as np


def evolve(w: np.ndarray, V: np.ndarray, p, dx: float, dt: float,
           n_steps: int) -> np.ndarray:
    """Advance w for n_steps; returns the final array (input not modified)."""
    w = np.array(w, dtype=np.float64, copy=True)
    dim = w.ndim
    p = np.asarray(p, dtype=np.float64)
    for _ in range(n_steps):
        ham = np.zeros_like(w)
        diss = np.zeros_like(w)
        for ax in range(dim):
            fwd = (np.roll(w, -1, axis=ax) - w) / dx
            bwd = (w - np.roll(w, 1, axis=ax)) / dx
            ham += 0.5 * (p[ax] + 0.5 * (fwd + bwd)) ** 2
            sig = np.maximum(np.abs(p[ax] + fwd), np.abs(p[ax] + bwd))
            diss += 0.5 * sig * (fwd - bwd)
        w = w - dt * (ham + V - diss)
    return w
