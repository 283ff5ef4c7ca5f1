"""Estados reducidos: base de Fock y ruta gaussiana"""

from .fock_state import (
    CoherentInit,
    FockDensityMatrix,
    choose_n_max,
    coherence_rel_entropy,
    density_matrix_at,
    displaced_thermal_matrix,
    displaced_thermal_populations,
    energy_entropy,
    energy_entropy_series,
    fock_moments,
    populations_at,
    von_neumann_fock,
)
from .gaussian_state import (
    GaussianMoments,
    covariance_from_moments,
    moments_at,
    vn_entropy_series,
    von_neumann_gaussian,
)

__all__ = [
    'CoherentInit',
    'FockDensityMatrix',
    'GaussianMoments',
    'choose_n_max',
    'coherence_rel_entropy',
    'covariance_from_moments',
    'density_matrix_at',
    'displaced_thermal_matrix',
    'displaced_thermal_populations',
    'energy_entropy',
    'energy_entropy_series',
    'fock_moments',
    'moments_at',
    'populations_at',
    'vn_entropy_series',
    'von_neumann_fock',
    'von_neumann_gaussian',
]
