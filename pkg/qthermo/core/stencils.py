"""
Plantilla de derivación compartida por todo el ledger.

Diferencias centradas de segundo orden en el interior y laterales de
segundo orden en los extremos. Todas las tasas (v̇, dω/dt, dU/dt, d𝒮/dt,
dS/dt, dC/dt) pasan por aquí para que los residuos comparen esquemas
idénticos.
"""

import numpy as np

from .errors import DomainError


def time_derivative(series, step: float) -> np.ndarray:
    """
    Deriva una serie muestreada en la malla uniforme.

    Args:
        series: Valores en t_j = t_0 + j*step (al menos 3 muestras)
        step: Paso temporal Δt > 0

    Returns:
        Array con la derivada en cada muestra

    Raises:
        DomainError: si hay menos de 3 muestras o el paso no es positivo
    """
    values = np.asarray(series)
    if step <= 0:
        raise DomainError(f"El paso debe ser positivo: {step}")
    if values.shape[0] < 3:
        raise DomainError(
            f"Se necesitan al menos 3 muestras para derivar (hay {values.shape[0]})"
        )
    return np.gradient(values, step, edge_order=2)
