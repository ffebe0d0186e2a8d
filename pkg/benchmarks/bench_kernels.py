"""Compare the compiled evolution kernel against the numpy fallback.

Run as a script:

    python benchmarks/bench_kernels.py

Times a fixed number of solver steps on 1-D/2-D/3-D grids with both backends
and reports the speedup, then times one full effective-Hamiltonian evaluation
through the public API.
"""

import time

import numpy as np

from trigcell._kernels import llf_numpy

try:
    from trigcell._kernels import llf_cython
except ImportError:
    llf_cython = None

from trigcell.homogenize import SolverConfig, hbar_numeric
from trigcell.potential import TrigPotential


def setup(shape):
    grids = np.meshgrid(*[np.arange(s) / s for s in shape], indexing="ij")
    w0 = np.zeros(shape)
    V = sum(np.cos(2 * np.pi * g) for g in grids)
    p = np.full(len(shape), 0.7)
    dx = 1.0 / shape[0]
    dt = 0.4 * dx / (len(shape) * 6.0)
    return w0, V, p, dx, dt


def time_backend(evolve, args, n_steps, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        evolve(*args, n_steps)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    cases = [((4096,), 400), ((192, 192), 120), ((40, 40, 40), 40)]
    print(f"{'grid':>16} {'steps':>6} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for shape, n_steps in cases:
        args = setup(shape)
        t_np = time_backend(llf_numpy.evolve, args, n_steps)
        if llf_cython is None:
            print(f"{str(shape):>16} {n_steps:>6} {t_np:>9.3f}s  (compiled kernel unavailable)")
            continue
        t_cy = time_backend(llf_cython.evolve, args, n_steps)
        a = llf_numpy.evolve(*args, 10)
        b = llf_cython.evolve(*args, 10)
        drift = float(np.max(np.abs(a - b)))
        print(f"{str(shape):>16} {n_steps:>6} {t_np:>9.3f}s {t_cy:>9.3f}s "
              f"{t_np / t_cy:>7.1f}x   (max drift {drift:.1e})")

    V = TrigPotential.build(2, 0.0, [((1, 0), 0.5), ((0, 1), 0.5)])
    t0 = time.perf_counter()
    s = hbar_numeric(V, (0.0, 0.0), SolverConfig(grid_points_per_dim=96))
    print(f"\nhbar_numeric 96^2 grid, p=0: {time.perf_counter() - t0:.2f}s "
          f"(value {s.value:.4f}, active backend used)")


if __name__ == "__main__":
    main()
