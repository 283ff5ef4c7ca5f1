"""
Baño térmico: densidades espectrales y núcleos de memoria
"""

from .base_bath import BathSpec, SpectralDensity
from .bath_factory import BathFactory
from .kernels import (
    QuadratureSettings,
    KernelSamples,
    spectral_density,
    bose_occupation,
    g_kernel,
    g_kernel_quadrature,
    g_tilde_kernel,
    build_kernel_tables,
)

__all__ = [
    'BathSpec',
    'SpectralDensity',
    'BathFactory',
    'QuadratureSettings',
    'KernelSamples',
    'spectral_density',
    'bose_occupation',
    'g_kernel',
    'g_kernel_quadrature',
    'g_tilde_kernel',
    'build_kernel_tables',
]
