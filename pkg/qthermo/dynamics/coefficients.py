"""
Coeficientes de la ecuación maestra a partir del propagador:

    ω(t) = −Im[u̇/u],   γ(t) = −Re[u̇/u],   γ̃(t) = v̇(t,t) + 2 v(t,t) γ(t)
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from qthermo.core.log import log

from .propagator import PropagatorSolution, TimeGrid


@dataclass
class MasterCoefficients:
    """
    Series ω(t), γ(t), γ̃(t) en la malla.

    Si |u| cae por debajo de u_floor, las series se truncan en el último
    índice seguro y truncated_at guarda el primer índice descartado.
    """
    grid: TimeGrid
    omega_ren: np.ndarray
    gamma: np.ndarray
    gamma_tilde: np.ndarray
    truncated_at: Optional[int] = None

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None

    @property
    def count(self) -> int:
        return self.omega_ren.shape[0]


def derive_coefficients(sol: PropagatorSolution, u_floor: float = 1e-12) -> MasterCoefficients:
    """
    Convierte la solución del propagador en los coeficientes de la
    ecuación maestra.

    Args:
        sol: Solución del propagador
        u_floor: Umbral de |u| bajo el cual u̇/u es singular

    Returns:
        MasterCoefficients, truncados si |u| < u_floor en algún instante
    """
    small = np.nonzero(np.abs(sol.u) < u_floor)[0]
    stop = int(small[0]) if small.size else sol.u.shape[0]
    truncated_at = stop if small.size else None

    if truncated_at is not None:
        record = {
            'type': 'u_floor',
            'message': (f"|u| < {u_floor:g} en t = {sol.grid.times[stop]:.4f}: "
                        f"coeficientes truncados en el índice {stop}"),
            'index': stop,
        }
        log(record['message'], "WARNING")
        sol.warnings.append(record)

    ratio = sol.u_dot[:stop] / sol.u[:stop]
    omega_ren = -ratio.imag
    gamma = -ratio.real
    gamma_tilde = sol.v_dot[:stop] + 2.0 * sol.v[:stop] * gamma

    return MasterCoefficients(
        grid=sol.grid,
        omega_ren=omega_ren,
        gamma=gamma,
        gamma_tilde=gamma_tilde,
        truncated_at=truncated_at,
    )
