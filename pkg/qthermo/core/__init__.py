"""
Utilidades comunes: errores, logging, paralelismo y derivadas numéricas
"""

from .errors import (
    QThermoError,
    DomainError,
    ConfigError,
    NumericalError,
    TruncationError,
    PhysicalityError,
    InconsistencyError,
)
from .log import log, banner, set_verbose, is_verbose
from .stencils import time_derivative

__all__ = [
    'QThermoError',
    'DomainError',
    'ConfigError',
    'NumericalError',
    'TruncationError',
    'PhysicalityError',
    'InconsistencyError',
    'log',
    'banner',
    'set_verbose',
    'is_verbose',
    'time_derivative',
]
