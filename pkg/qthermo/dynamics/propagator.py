"""
Propagador u(t,t₀) y función de ruido v(t,t).

    u̇(t) + iω₀ u(t) + ∫_{t₀}^{t} g(t−τ) u(τ) dτ = 0,   u(t₀) = 1
    v(t,t) = ∫∫ u(t−τ₁) g̃(τ₁−τ₂) u*(t−τ₂) dτ₁ dτ₂

La ecuación de Volterra se integra en el marco rotante w = e^{iω₀t} u con
el núcleo k(s) = g(s) e^{iω₀s}: suma de memoria trapezoidal y un paso
predictor-corrector (Heun). En el límite η = 0 el marco rotante hace que
u = e^{−iω₀t} sea exacto a precisión de máquina.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.config_manager import registry
from qthermo import OMEGA_0
from qthermo.bath.base_bath import BathSpec
from qthermo.bath.kernels import KernelSamples, QuadratureSettings, build_kernel_tables
from qthermo.core.errors import DomainError, NumericalError
from qthermo.core.log import log
from qthermo.core.stencils import time_derivative


@dataclass(frozen=True)
class TimeGrid:
    """
    Malla temporal uniforme t_j = t_start + j·step, j = 0..count−1.

    Attributes:
        t_start: Instante inicial t₀
        t_end: Instante final
        step: Paso Δt > 0
        count: Número de muestras N+1 >= 2
    """
    t_start: float
    t_end: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise DomainError(f"El paso debe ser positivo y finito: {self.step}")
        if self.count < 2:
            raise DomainError(f"La malla necesita al menos 2 muestras: {self.count}")

        span = (self.count - 1) * self.step
        target = self.t_end - self.t_start
        if abs(span - target) > 4 * np.finfo(float).eps * max(1.0, abs(target), abs(span)):
            raise DomainError(
                f"(count−1)·step = {span!r} no coincide con t_end − t_start = {target!r}"
            )

    @classmethod
    def from_step(cls, t_end: float, step: float, t_start: float = 0.0) -> 'TimeGrid':
        """
        Construye la malla a partir del paso.

        Raises:
            DomainError: si t_end − t_start no es múltiplo de step
        """
        if not (step > 0):
            raise DomainError(f"El paso debe ser positivo: {step}")
        intervals = round((t_end - t_start) / step)
        if intervals < 1 or abs(intervals * step - (t_end - t_start)) > 1e-9 * max(1.0, abs(t_end)):
            raise DomainError(
                f"t_end − t_start = {t_end - t_start} no es múltiplo de dt = {step}"
            )
        # t_end se recalcula para que la identidad de la malla sea exacta
        return cls(t_start, t_start + intervals * step, step, intervals + 1)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.step * np.arange(self.count)

    def refined(self) -> 'TimeGrid':
        """Malla con paso Δt/2 sobre el mismo intervalo"""
        return TimeGrid(self.t_start, self.t_end, self.step / 2, 2 * self.count - 1)


@dataclass
class PropagatorSolution:
    """Muestras de u, u̇, v(t,t) y v̇(t,t) sobre la malla"""
    grid: TimeGrid
    u: np.ndarray
    u_dot: np.ndarray
    v: np.ndarray
    v_dot: np.ndarray
    bath: Optional[BathSpec] = None
    warnings: List[Dict[str, Any]] = field(default_factory=list)
    stats: Dict[str, Any] = field(default_factory=dict)


def solve_u(bath: BathSpec, grid: TimeGrid,
            kernels: Optional[KernelSamples] = None,
            warnings: Optional[List[Dict[str, Any]]] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Resuelve la ecuación íntegro-diferencial para u(t,t₀).

    Integración por producto (suma trapezoidal de memoria) con un paso
    predictor-corrector; u̇ se evalúa con la propia ecuación, no por
    diferencias finitas. Error global O(Δt²).

    Args:
        bath: Parámetros del baño
        grid: Malla temporal
        kernels: Tablas precalculadas (si faltan, se calcula solo g)
        warnings: Lista donde anotar avisos no fatales

    Returns:
        (u, u_dot) como arrays complejos
    """
    h = grid.step
    n_total = grid.count
    if kernels is None:
        from qthermo.bath.kernels import g_kernel
        g = np.asarray(g_kernel(h * np.arange(n_total), bath), dtype=complex)
    else:
        g = kernels.g_samples[:n_total]

    lags = h * np.arange(n_total)
    rotation = np.exp(1j * OMEGA_0 * lags)
    k = g * rotation
    # k invertido y contiguo: k[n−j] para j = 1..n−1 es k_rev[N−n : N−1]
    k_rev = np.ascontiguousarray(k[::-1])

    w = np.zeros(n_total, dtype=complex)
    memory = np.zeros(n_total, dtype=complex)
    w[0] = 1.0

    def memory_at(n: int, history: complex, x: complex) -> complex:
        # h·(½k_n w_0 + Σ_{j=1}^{n−1} k_{n−j} w_j + ½k_0 x)
        return h * (0.5 * k[n] * w[0] + history + 0.5 * k[0] * x)

    force_prev = 0j  # ẇ(t₀) = 0: la memoria es nula en t₀
    for n in range(1, n_total):
        if n > 1:
            history = np.dot(k_rev[n_total - n:n_total - 1], w[1:n])
        else:
            history = 0j

        predictor = w[n - 1] + h * force_prev
        force_pred = -memory_at(n, history, predictor)
        w[n] = w[n - 1] + 0.5 * h * (force_prev + force_pred)

        memory[n] = memory_at(n, history, w[n])
        force_prev = -memory[n]

    u = w / rotation
    # u̇ = −iω₀u − ∫g u dτ, con ∫g u dτ = e^{−iω₀t}·M(t)
    u_dot = -1j * OMEGA_0 * u - memory / rotation

    tol = registry.get_tolerance('contractivity')
    peak = float(np.max(np.abs(u)))
    if peak > 1.0 + tol:
        record = {
            'type': 'contractivity',
            'message': f"max|u| = {peak:.3e} supera 1 + {tol:g}: paso demasiado grueso",
            'max_abs_u': peak,
        }
        log(record['message'], "WARNING")
        if warnings is not None:
            warnings.append(record)

    return u, u_dot


def compute_v_diag(bath: BathSpec, u: np.ndarray, grid: TimeGrid,
                   kernels: Optional[KernelSamples] = None,
                   quad: Optional[QuadratureSettings] = None) -> np.ndarray:
    """
    Diagonal v(t_n,t_n) de la función de ruido.

    Por estacionariedad u(t,τ) = u(t−τ), y con x = t−τ₁, y = t−τ₂:
        v(t_n) = h² Σ_{a,b≤n} c_a c_b u_a g̃_{b−a} u_b*
    con pesos trapezoidales c. La suma se acumula de forma incremental en
    O(n) por instante: B_n es la suma con pesos "izquierdos" (½ solo en 0)
    y la corrección del extremo derecho se aplica al final.

    Args:
        bath: Parámetros del baño
        u: Propagador en la malla
        grid: Malla temporal
        kernels: Tablas de g̃ (si faltan se calculan)
        quad: Ajustes de cuadratura si hay que calcular las tablas

    Returns:
        v(t,t) real

    Raises:
        NumericalError: si la parte imaginaria supera la tolerancia
    """
    n_total = grid.count
    if kernels is None:
        kernels = build_kernel_tables(bath, grid, quad)

    v = np.zeros(n_total)
    if not np.any(kernels.gtilde_positive[:n_total]):
        return v

    h = grid.step
    offset = kernels.count - 1
    # g̃_{n−a} para a = 0..n  →  gt_desc[offset−n : offset+1]
    gt_desc = np.ascontiguousarray(kernels.gtilde_samples[::-1])
    gt_full = kernels.gtilde_samples

    y = u[:n_total].astype(complex).copy()
    y[0] *= 0.5
    y_conj = np.conj(y)

    g0 = kernels.gtilde_at(0)
    x00 = abs(u[0]) ** 2 * g0
    acc = 0.25 * x00
    imag_max = 0.0

    for n in range(1, n_total):
        x_nn = abs(u[n]) ** 2 * g0
        # L_n = Σ_a c'_a X_{a n} = u_n* Σ_a c'_a u_a g̃_{n−a}
        left = np.conj(u[n]) * np.dot(gt_desc[offset - n:offset + 1], y[:n + 1])
        # R_n = Σ_b c'_b X_{n b} = u_n Σ_b g̃_{b−n} c'_b u_b*
        right = u[n] * np.dot(gt_full[offset - n:offset + 1], y_conj[:n + 1])
        acc += (left - x_nn) + (right - x_nn) + x_nn
        total = acc - 0.5 * (left + right) + 0.25 * x_nn

        v[n] = h * h * total.real
        imag_max = max(imag_max, abs(h * h * total.imag))

    tol = registry.get_tolerance('imag_v') * max(1.0, float(np.max(np.abs(v))))
    if imag_max > tol:
        raise NumericalError(
            f"Parte imaginaria de v(t,t) = {imag_max:.3e} supera {tol:.1e}",
            {'imag_max': imag_max, 'tolerance': tol, 'step': h},
        )
    return v


def compute_v_diag_direct(u: np.ndarray, kernels: KernelSamples,
                          grid: TimeGrid) -> np.ndarray:
    """
    Oráculo de fuerza bruta: doble suma directa en cada instante, sin
    reutilizar nada entre instantes. Coste O(N³); pensado para N <= 200.
    """
    n_total = grid.count
    h = grid.step
    v = np.zeros(n_total, dtype=complex)

    for n in range(1, n_total):
        weights = np.ones(n + 1)
        weights[0] = weights[-1] = 0.5
        q = weights * u[:n + 1]
        index = np.arange(n + 1)
        lag_matrix = index[None, :] - index[:, None]  # b − a
        gt = kernels.gtilde_samples[lag_matrix + kernels.count - 1]
        v[n] = h * h * (q @ gt @ np.conj(q))
    return v.real


def v_dot_diag(v: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """d/dt v(t,t) con la plantilla compartida de segundo orden"""
    return time_derivative(v, grid.step)


def solve_propagator(bath: BathSpec, grid: TimeGrid,
                     quad: Optional[QuadratureSettings] = None) -> PropagatorSolution:
    """
    Pipeline completo: kernels → u → v → v̇.

    Args:
        bath: Parámetros del baño
        grid: Malla temporal
        quad: Ajustes de cuadratura de g̃

    Returns:
        PropagatorSolution con estadísticas del solver y avisos
    """
    warnings: List[Dict[str, Any]] = []
    start = time.time()

    kernels = build_kernel_tables(bath, grid, quad)
    t_kernels = time.time()

    u, u_dot = solve_u(bath, grid, kernels, warnings)
    t_u = time.time()

    v = compute_v_diag(bath, u, grid, kernels)
    v_dot = v_dot_diag(v, grid)
    t_v = time.time()

    tol = registry.get_tolerance('contractivity')
    if v.min() < -tol:
        raise NumericalError(
            f"v(t,t) negativo ({v.min():.3e}): la ocupación del baño no puede ser negativa",
            {'v_min': float(v.min())},
        )

    stats = {
        'grid': {'t_start': grid.t_start, 't_end': grid.t_end,
                 'step': grid.step, 'count': grid.count},
        'quadrature': kernels.stats,
        'max_abs_u': float(np.max(np.abs(u))),
        'v_final': float(v[-1]),
        'timing_s': {
            'kernels': round(t_kernels - start, 3),
            'u': round(t_u - t_kernels, 3),
            'v': round(t_v - t_u, 3),
        },
    }
    log(f"Propagador resuelto: |u(t_end)|={abs(u[-1]):.4f}, v(t_end)={v[-1]:.4f}",
        "SUCCESS", indent=1)
    return PropagatorSolution(grid=grid, u=u, u_dot=u_dot, v=v, v_dot=v_dot,
                              bath=bath, warnings=warnings, stats=stats)
