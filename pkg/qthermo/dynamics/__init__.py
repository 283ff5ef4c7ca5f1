"""
Dinámica del modo: propagador y coeficientes de la ecuación maestra
"""

from .propagator import (
    TimeGrid,
    PropagatorSolution,
    solve_u,
    compute_v_diag,
    compute_v_diag_direct,
    v_dot_diag,
    solve_propagator,
)
from .coefficients import MasterCoefficients, derive_coefficients

__all__ = [
    'TimeGrid',
    'PropagatorSolution',
    'solve_u',
    'compute_v_diag',
    'compute_v_diag_direct',
    'v_dot_diag',
    'solve_propagator',
    'MasterCoefficients',
    'derive_coefficients',
]
