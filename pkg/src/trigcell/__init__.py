"""Effective Hamiltonians of trigonometric-polynomial periodic potentials.

Library for computing the effective Hamiltonian of 0.5*|p|^2 + V(x) for
sparse trigonometric potentials (cell-problem grid solver plus large-momentum
asymptotic expansion) and for deciding whether two potentials with at most
three Fourier modes share the same effective Hamiltonian, recovering the
explicit translation/scaling transform when one exists.
"""

from .potential import (
    FourierMode,
    InvalidPotentialError,
    RealModeForm,
    Transform,
    TransformRejectedError,
    TrigPotential,
    canonicalize,
    load_potential,
    max_on_torus,
    potential_from_dict,
    potential_to_dict,
    save_potential,
    transform,
)
from .expansion import (
    ExpansionResult,
    FourierSeries,
    ResonantDirectionError,
    a2_closed_form,
    a4_pole_residue,
    check_nonresonant,
    corrector_recursion,
    expansion_residual,
    sole_term,
)
from .homogenize import (
    HbarSample,
    SolverConfig,
    hbar_1d_exact,
    hbar_grid,
    hbar_numeric,
    hbar_separable,
)
from .rigidity import (
    MFunctionParams,
    Verdict,
    VectorSet,
    build_A_set,
    decide,
    lattice_halfperiod,
    lemma_geometry_check,
    m_function,
    phase_equivalent,
    sole_vectors,
    solve_translation,
)

__version__ = "0.1.0"
