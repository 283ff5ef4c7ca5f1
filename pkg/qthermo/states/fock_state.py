"""
Estado del sistema en la base de Fock para un estado coherente inicial.

El estado evolucionado es un estado térmico desplazado con amplitud
α(t) = u(t,t₀)α₀ y ocupación térmica v(t,t). Sus elementos de matriz

    ⟨m|ρ|n⟩ = e^{−|α|²/(1+v)} Σ_k √(m!n!)/((m−k)!(n−k)!k!)
              α^{m−k} α*^{n−k} v^k / (1+v)^{m+n+1−k}

solo contienen potencias no negativas de |α|² y de v, así que son
estables en α₀ → 0 y en v → 0. Se evalúan en espacio logarítmico
(factoriales con gammaln) para n_max del orden de 1000.

Las poblaciones usan la recurrencia de tres términos de los polinomios de
Laguerre, O(n_max) por instante y vectorizada sobre todos los instantes.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import entr, gammaln, logsumexp, xlogy

from config.config_manager import registry
from qthermo.core.errors import (
    DomainError,
    InconsistencyError,
    NumericalError,
    TruncationError,
)
from qthermo.core.log import log
from qthermo.dynamics.propagator import PropagatorSolution


@dataclass(frozen=True)
class CoherentInit:
    """Estado coherente inicial |α₀⟩ (α₀ = 0 es el vacío)"""
    alpha0: complex

    def __post_init__(self):
        if not (math.isfinite(self.alpha0.real) and math.isfinite(self.alpha0.imag)):
            raise DomainError(f"α₀ debe ser finito: {self.alpha0}")

    @property
    def intensity(self) -> float:
        """|α₀|²"""
        return abs(self.alpha0) ** 2


@dataclass
class FockDensityMatrix:
    """Matriz densidad truncada ⟨m|ρ(t)|n⟩, 0 <= m,n <= n_max"""
    time: float
    n_max: int
    elements: np.ndarray
    populations: np.ndarray
    tail_mass: float


def _state_parameters(sol: PropagatorSolution, init: CoherentInit, t_index):
    """(α(t), v(t,t)) validando que v no sea negativa"""
    alpha = sol.u[t_index] * init.alpha0
    v = np.asarray(sol.v[t_index], dtype=float)

    tol = registry.get_tolerance('contractivity')
    if np.any(v < -tol):
        raise NumericalError(
            f"v(t,t) negativo ({np.min(v):.3e}): error numérico aguas arriba",
            {'v_min': float(np.min(v))},
        )
    return alpha, np.clip(v, 0.0, None)


def _check_tail(tail_mass: float, n_max: int, tail_tol: float) -> None:
    if tail_mass > tail_tol:
        raise TruncationError(
            f"Masa de cola {tail_mass:.3e} > {tail_tol:.1e} con n_max = {n_max}: "
            f"hay que aumentar n_max",
            n_max=n_max, tail_mass=float(tail_mass), tail_tol=tail_tol,
        )


def _clean_populations(p: np.ndarray) -> np.ndarray:
    """Recorta negativos de redondeo; falla si superan el suelo permitido"""
    floor = registry.get_tolerance('population_floor')
    if np.any(p < floor):
        raise NumericalError(
            f"Población negativa {np.min(p):.3e} por debajo de {floor:g}",
            {'p_min': float(np.min(p))},
        )
    return np.clip(p, 0.0, None)


# ---------------------------------------------------------------------------
# Estado térmico desplazado
# ---------------------------------------------------------------------------

def displaced_thermal_matrix(alpha: complex, v: float, n_max: int) -> np.ndarray:
    """
    Matriz ⟨m|ρ|n⟩ del estado térmico desplazado en espacio logarítmico.

    Args:
        alpha: Amplitud α = uα₀
        v: Ocupación térmica >= 0
        n_max: Dimensión de truncación (índices 0..n_max)

    Returns:
        Matriz compleja hermítica (n_max+1)×(n_max+1)
    """
    size = n_max + 1
    modulus = abs(alpha)
    phase = np.angle(alpha) if modulus > 0 else 0.0
    log_norm = -modulus**2 / (1.0 + v)
    log_one_plus_v = math.log1p(v)

    lf = gammaln(np.arange(size) + 1.0)
    rho = np.zeros((size, size), dtype=complex)

    for m in range(size):
        n = np.arange(m + 1)[:, None]           # n <= m
        k = np.arange(m + 1)[None, :]           # k <= n
        valid = k <= n
        kk = np.where(valid, k, 0)
        nk = np.where(valid, n - kk, 0)

        with np.errstate(divide='ignore', invalid='ignore'):
            terms = (
                0.5 * (lf[m] + lf[n])
                - lf[m - kk] - lf[nk] - lf[kk]
                + xlogy(m + n - 2 * kk, modulus)
                + xlogy(kk, v)
                - (m + n + 1 - kk) * log_one_plus_v
            )
            terms = np.where(valid, terms, -np.inf)
            log_mag = logsumexp(terms, axis=1) + log_norm

        row = np.exp(log_mag) * np.exp(1j * (m - np.arange(m + 1)) * phase)
        rho[m, :m + 1] = row
        rho[:m + 1, m] = np.conj(row)

    return rho


def displaced_thermal_populations(alpha, v, n_max: int) -> np.ndarray:
    """
    Poblaciones p_n = e^{−|α|²/(1+v)} r^n L_n(−|α|²/(v(1+v))) / (1+v),
    r = v/(1+v), por recurrencia de Laguerre:

        p_{n+1} = [((2n+1) r + c) p_n − n r² p_{n−1}] / (n+1),  c = |α|²/(1+v)²

    Vectorizada: alpha y v pueden ser arrays (un valor por instante).

    Returns:
        Array (..., n_max+1)
    """
    alpha2 = np.abs(np.asarray(alpha)) ** 2
    v = np.asarray(v, dtype=float)
    alpha2, v = np.broadcast_arrays(alpha2, v)

    r = v / (1.0 + v)
    c = alpha2 / (1.0 + v) ** 2

    p = np.zeros(alpha2.shape + (n_max + 1,))
    p[..., 0] = np.exp(-alpha2 / (1.0 + v)) / (1.0 + v)
    if n_max >= 1:
        p[..., 1] = (r + c) * p[..., 0]
    for n in range(1, n_max):
        p[..., n + 1] = (((2 * n + 1) * r + c) * p[..., n] - n * r * r * p[..., n - 1]) / (n + 1)
    return p


# ---------------------------------------------------------------------------
# Operaciones
# ---------------------------------------------------------------------------

def density_matrix_at(sol: PropagatorSolution, init: CoherentInit, t_index: int,
                      n_max: int, tail_tol: Optional[float] = None) -> FockDensityMatrix:
    """
    Matriz densidad reducida en el instante t_index.

    Args:
        sol: Solución del propagador
        init: Estado coherente inicial
        t_index: Índice de la malla
        n_max: Dimensión de truncación
        tail_tol: Masa de cola máxima (por defecto la del registry de run)

    Returns:
        FockDensityMatrix

    Raises:
        TruncationError: si la masa de cola supera tail_tol
    """
    if tail_tol is None:
        tail_tol = registry.get_run_defaults()['tail_tol']

    alpha, v = _state_parameters(sol, init, t_index)
    elements = displaced_thermal_matrix(complex(alpha), float(v), n_max)
    populations = _clean_populations(elements.diagonal().real.copy())
    tail_mass = 1.0 - float(populations.sum())
    _check_tail(tail_mass, n_max, tail_tol)

    return FockDensityMatrix(
        time=float(sol.grid.times[t_index]),
        n_max=n_max,
        elements=elements,
        populations=populations,
        tail_mass=tail_mass,
    )


def populations_at(sol: PropagatorSolution, init: CoherentInit, t_index: int,
                   n_max: int, tail_tol: Optional[float] = None) -> np.ndarray:
    """
    Poblaciones p_n(t) = ⟨n|ρ(t)|n⟩ sin construir la matriz completa.

    Raises:
        TruncationError: si la masa de cola supera tail_tol
    """
    if tail_tol is None:
        tail_tol = registry.get_run_defaults()['tail_tol']

    alpha, v = _state_parameters(sol, init, t_index)
    p = _clean_populations(displaced_thermal_populations(alpha, v, n_max))
    _check_tail(1.0 - float(p.sum()), n_max, tail_tol)
    return p


def energy_entropy(p) -> float:
    """
    Entropía de energía 𝒮 = −Σ p_n ln p_n con 0·ln 0 = 0.

    Raises:
        NumericalError: si alguna probabilidad es negativa más allá de −1e−14
    """
    p = _clean_populations(np.asarray(p, dtype=float))
    return float(entr(p).sum())


def energy_entropy_series(sol: PropagatorSolution, init: CoherentInit,
                          n_max: int, stop: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    𝒮(t) y masa de cola en todos los instantes de la malla.

    La recurrencia avanza en n con arrays de longitud N (un valor por
    instante) y acumula −p ln p sin guardar la tabla completa.

    Returns:
        (S_energy, tail_mass) como arrays
    """
    stop = sol.u.shape[0] if stop is None else stop
    alpha, v = _state_parameters(sol, init, slice(0, stop))
    alpha2 = np.abs(alpha) ** 2

    r = v / (1.0 + v)
    c = alpha2 / (1.0 + v) ** 2
    floor = registry.get_tolerance('population_floor')

    p_prev = np.exp(-alpha2 / (1.0 + v)) / (1.0 + v)
    entropy = entr(p_prev)
    total = p_prev.copy()
    p_min = float(p_prev.min())

    p_curr = (r + c) * p_prev
    for n in range(1, n_max + 1):
        p_min = min(p_min, float(p_curr.min()))
        clipped = np.clip(p_curr, 0.0, None)
        entropy += entr(clipped)
        total += clipped
        if n == n_max:
            break
        p_next = (((2 * n + 1) * r + c) * p_curr - n * r * r * p_prev) / (n + 1)
        p_prev, p_curr = p_curr, p_next

    if p_min < floor:
        raise NumericalError(
            f"Población negativa {p_min:.3e} por debajo de {floor:g}",
            {'p_min': p_min, 'n_max': n_max},
        )
    return entropy, 1.0 - total


def von_neumann_fock(rho: FockDensityMatrix) -> float:
    """
    Entropía de von Neumann del espectro de la matriz truncada.

    Ruta de validación: la producción usa la fórmula gaussiana.

    Raises:
        NumericalError: si ρ no es hermítica o un autovalor < −1e−10
    """
    elements = rho.elements
    herm_tol = registry.get_tolerance('hermiticity')
    asym = float(np.max(np.abs(elements - elements.conj().T))) if elements.size else 0.0
    if asym > herm_tol:
        raise NumericalError(f"ρ no es hermítica (asimetría {asym:.2e})", {'asymmetry': asym})

    eigenvalues = np.linalg.eigvalsh(elements)
    floor = registry.get_tolerance('eigenvalue_floor')
    if eigenvalues.min() < floor:
        raise NumericalError(
            f"Autovalor {eigenvalues.min():.3e} por debajo de {floor:g}: truncación insuficiente",
            {'eigenvalue_min': float(eigenvalues.min()), 'n_max': rho.n_max},
        )
    return float(entr(np.clip(eigenvalues, 0.0, None)).sum())


def coherence_rel_entropy(S_energy: Union[float, np.ndarray],
                          S_vn: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Entropía relativa de coherencia C = 𝒮 − S.

    Raises:
        InconsistencyError: si C < −1e−6 (rutas de entropía desalineadas)
    """
    coherence = np.asarray(S_energy) - np.asarray(S_vn)
    floor = registry.get_tolerance('coherence_floor')
    if np.any(coherence < floor):
        worst = int(np.argmin(coherence)) if coherence.ndim else 0
        raise InconsistencyError(
            f"Coherencia negativa {np.min(coherence):.3e} < {floor:g}",
            {'coherence_min': float(np.min(coherence)), 'index': worst},
        )
    return float(coherence) if coherence.ndim == 0 else coherence


def choose_n_max(sol: PropagatorSolution, init: CoherentInit, tail_tol: float,
                 policy: Union[str, int] = 'auto', stop: Optional[int] = None) -> int:
    """
    Dimensión de truncación de la base de Fock.

    'auto': empieza en ceil(10·(|α₀|² + v_max)) y duplica hasta que la masa
    de cola de todos los instantes sea <= tail_tol. Un entero se valida tal
    cual.

    Raises:
        TruncationError: si un n_max fijo (o el último doblado) no basta
    """
    stop = sol.u.shape[0] if stop is None else stop

    if policy != 'auto':
        n_max = int(policy)
        _, tail = energy_entropy_series(sol, init, n_max, stop)
        _check_tail(float(tail.max()), n_max, tail_tol)
        return n_max

    v_max = float(np.max(sol.v[:stop]))
    n_max = max(1, int(math.ceil(10.0 * (init.intensity + v_max))))

    for _ in range(registry.get_tolerance('n_max_doublings') + 1):
        _, tail = energy_entropy_series(sol, init, n_max, stop)
        worst = float(tail.max())
        if worst <= tail_tol:
            log(f"n_max = {n_max} (cola máxima {worst:.2e})", "INFO", indent=1)
            return n_max
        n_max *= 2

    _check_tail(worst, n_max // 2, tail_tol)
    return n_max


def fock_moments(rho: FockDensityMatrix) -> Dict[str, complex]:
    """
    Momentos ⟨a⟩, ⟨a†a⟩, ⟨aa⟩ calculados como trazas con la matriz truncada.

    Oráculo de la ruta gaussiana.
    """
    size = rho.n_max + 1
    lowering = np.diag(np.sqrt(np.arange(1, size)), k=1)
    mean_a = np.trace(lowering @ rho.elements)
    anomalous = np.trace(lowering @ lowering @ rho.elements)
    number = float(np.dot(np.arange(size), rho.populations))
    return {'mean_a': complex(mean_a), 'number': number, 'anomalous': complex(anomalous)}
