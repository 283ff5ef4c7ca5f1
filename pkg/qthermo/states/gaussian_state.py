"""
Ruta gaussiana: momentos de las cuadraturas, matriz de covarianza y
entropía de von Neumann a partir del autovalor simplético ν = √det V.

Con dinámica de Heisenberg lineal y estado coherente inicial:
    ⟨a⟩ = uα₀,   ⟨a†a⟩ = |u|²|α₀|² + v,   ⟨aa⟩ = u²α₀²
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.special import xlogy

from config.config_manager import registry
from qthermo.core.errors import DomainError, InconsistencyError, PhysicalityError
from qthermo.dynamics.propagator import PropagatorSolution

from .fock_state import CoherentInit


@dataclass
class GaussianMoments:
    """Momentos de primer y segundo orden en un instante"""
    time: float
    mean_a: complex
    number: float
    anomalous: complex
    covariance: np.ndarray
    symplectic_nu: float


def covariance_from_moments(mean_a, number, anomalous) -> np.ndarray:
    """
    Covarianza V_ij = ⟨ξ_iξ_j + ξ_jξ_i⟩/2 − ⟨ξ_i⟩⟨ξ_j⟩ en la base
    ξ₁ = a + a†, ξ₂ = −i(a − a†).

    Acepta escalares o arrays; devuelve (..., 2, 2).
    """
    mean_a = np.asarray(mean_a, dtype=complex)
    number = np.asarray(number, dtype=float)
    anomalous = np.asarray(anomalous, dtype=complex)

    re_a, im_a = mean_a.real, mean_a.imag
    v11 = 2 * anomalous.real + 2 * number + 1 - 4 * re_a**2
    v22 = -2 * anomalous.real + 2 * number + 1 - 4 * im_a**2
    v12 = 2 * anomalous.imag - 4 * re_a * im_a

    return np.stack([np.stack([v11, v12], axis=-1),
                     np.stack([v12, v22], axis=-1)], axis=-2)


def _model_moments(sol: PropagatorSolution, init: CoherentInit, index):
    u = sol.u[index]
    mean_a = u * init.alpha0
    number = np.abs(u) ** 2 * init.intensity + sol.v[index]
    anomalous = (u * init.alpha0) ** 2
    return mean_a, number, anomalous


def _check_physical(det: np.ndarray) -> None:
    clip = registry.get_tolerance('nu_clip')
    if np.any(det < 1.0 - clip):
        raise PhysicalityError(
            f"det V = {np.min(det):.8f} < 1 − {clip:g}: viola la cota de incertidumbre",
            {'det_min': float(np.min(det))},
        )


def moments_at(sol: PropagatorSolution, init: CoherentInit, t_index: int) -> GaussianMoments:
    """
    Momentos y covarianza en el instante t_index.

    Raises:
        PhysicalityError: si det V < 1 − 1e−6
    """
    mean_a, number, anomalous = _model_moments(sol, init, t_index)
    covariance = covariance_from_moments(mean_a, number, anomalous)
    det = float(np.linalg.det(covariance))
    _check_physical(np.asarray(det))

    return GaussianMoments(
        time=float(sol.grid.times[t_index]),
        mean_a=complex(mean_a),
        number=float(number),
        anomalous=complex(anomalous),
        covariance=covariance,
        symplectic_nu=float(np.sqrt(max(det, 1.0))),
    )


def von_neumann_gaussian(nu: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    S = ((ν+1)/2) ln((ν+1)/2) − ((ν−1)/2) ln((ν−1)/2), con S(1) = 0.

    Valores de ν hasta 1e−6 por debajo de 1 se recortan a 1.

    Raises:
        DomainError: si ν < 1 − 1e−6
    """
    nu = np.asarray(nu, dtype=float)
    clip = registry.get_tolerance('nu_clip')
    if np.any(nu < 1.0 - clip) or np.any(~np.isfinite(nu)):
        raise DomainError(f"ν = {np.min(nu)!r} fuera del dominio ν >= 1")

    nu = np.maximum(nu, 1.0)
    plus = 0.5 * (nu + 1.0)
    minus = 0.5 * (nu - 1.0)
    entropy = xlogy(plus, plus) - xlogy(minus, minus)
    return float(entropy) if entropy.ndim == 0 else entropy


def vn_entropy_series(sol: PropagatorSolution, init: CoherentInit,
                      stop: int = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    ν(t) y S(t) en todos los instantes.

    Comprueba la isotropía ν = 2v + 1 que este modelo garantiza para un
    estado coherente inicial.

    Returns:
        (nu, S_vn)

    Raises:
        PhysicalityError: si det V < 1 − 1e−6 en algún instante
        InconsistencyError: si ν se separa de 2v + 1
    """
    stop = sol.u.shape[0] if stop is None else stop
    index = slice(0, stop)
    covariance = covariance_from_moments(*_model_moments(sol, init, index))

    det = covariance[:, 0, 0] * covariance[:, 1, 1] - covariance[:, 0, 1] ** 2
    _check_physical(det)
    nu = np.sqrt(np.maximum(det, 1.0))

    isotropic = 2.0 * sol.v[index] + 1.0
    deviation = np.abs(nu - np.maximum(isotropic, 1.0)) / np.maximum(1.0, nu)
    tol = registry.get_tolerance('isotropy')
    if deviation.size and deviation.max() > tol:
        worst = int(np.argmax(deviation))
        raise InconsistencyError(
            f"ν = {nu[worst]:.10f} difiere de 2v+1 = {isotropic[worst]:.10f}",
            {'index': worst, 'deviation': float(deviation[worst])},
        )

    return nu, von_neumann_gaussian(nu)
