"""
Núcleos del baño: densidad espectral, ocupación de Bose-Einstein y los
núcleos de memoria g(s) y g̃(s) que alimentan al propagador.

g(s) = ∫₀^∞ J(ω) e^{−iωs} dω          (forma cerrada para el baño óhmico)
g̃(s) = ∫₀^Ω_max J(ω) n̄(ω,T₀) e^{−iωs} dω  (cuadratura numérica)

Uso:
    from qthermo.bath.kernels import build_kernel_tables, QuadratureSettings

    tables = build_kernel_tables(bath, grid, QuadratureSettings.from_registry())
    tables.gtilde_at(-3)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Dict, Optional

import numpy as np
from scipy import integrate

from config.config_manager import registry
from qthermo.core.errors import DomainError, NumericalError
from qthermo.core.log import log

from .base_bath import BathSpec, memory_kernel_quadrature
from .bath_factory import spectral_for

if TYPE_CHECKING:
    from qthermo.dynamics.propagator import TimeGrid


SCHEMES = ('panels', 'adaptive')


@dataclass(frozen=True)
class QuadratureSettings:
    """
    Parámetros de la cuadratura de g̃.

    Attributes:
        omega_max_factor: Ω_max = factor·max(ω_c, kT₀)
        order: Nodos de Gauss-Legendre por panel
        panels: Número de paneles; None para elegirlo según el retardo máximo
        scheme: 'panels' (Gauss-Legendre por paneles) o 'adaptive' (quad)
        rtol: Tolerancia de convergencia relativa a |g̃(0)|
        max_refinements: Duplicaciones de paneles permitidas
    """
    omega_max_factor: float = 50.0
    order: int = 64
    panels: Optional[int] = None
    scheme: str = 'panels'
    rtol: float = 1e-8
    max_refinements: int = 4
    phase_per_panel: float = 120.0
    max_panel_width: float = 2.0
    negligible_weight: float = 1e-18
    lag_block: int = 128
    epsrel: float = 1e-11
    subdiv_limit: int = 2000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"Esquema de cuadratura desconocido: {self.scheme}")
        if self.omega_max_factor <= 0:
            raise DomainError(f"omega_max_factor debe ser > 0: {self.omega_max_factor}")
        if self.order < 2:
            raise DomainError(f"order debe ser >= 2: {self.order}")
        if self.panels is not None and self.panels < 1:
            raise DomainError(f"panels debe ser >= 1: {self.panels}")

    @classmethod
    def from_registry(cls, **overrides) -> 'QuadratureSettings':
        """Valores del registry, con sustituciones opcionales"""
        cfg = registry.get_quadrature_settings()
        settings = cls(
            order=cfg['order'],
            rtol=cfg['rtol'],
            max_refinements=cfg['max_refinements'],
            phase_per_panel=cfg['phase_per_panel'],
            max_panel_width=cfg['max_panel_width'],
            negligible_weight=cfg['negligible_weight'],
            lag_block=cfg['lag_block'],
            epsrel=cfg['epsrel'],
            subdiv_limit=cfg['subdiv_limit'],
        )
        return replace(settings, **overrides)


@dataclass
class KernelSamples:
    """
    Tablas de g y g̃ en la malla uniforme s_j = jΔt.

    gtilde_samples cubre los retardos −(N−1)..(N−1); los negativos se
    obtienen por simetría hermítica g̃(−s) = conj(g̃(s)).
    """
    grid_step: float
    g_samples: np.ndarray
    gtilde_samples: np.ndarray
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return self.g_samples.shape[0]

    @property
    def gtilde_positive(self) -> np.ndarray:
        """g̃(s_j) para j = 0..N−1"""
        return self.gtilde_samples[self.count - 1:]

    def gtilde_at(self, j: int) -> complex:
        """g̃ en el retardo jΔt (j puede ser negativo)"""
        return self.gtilde_samples[j + self.count - 1]


# ---------------------------------------------------------------------------
# Operaciones puntuales
# ---------------------------------------------------------------------------

def spectral_density(omega, bath: BathSpec):
    """
    Densidad espectral J(ω) del baño.

    Args:
        omega: Frecuencia(s) >= 0
        bath: Parámetros del baño

    Returns:
        J(ω) (escalar o array)

    Raises:
        DomainError: si alguna frecuencia es negativa

    Examples:
        >>> spectral_density(10.0, BathSpec(1.0, 10.0, 0.0))
        3.678794411714423
    """
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr < 0):
        raise DomainError(f"La frecuencia debe ser >= 0: {omega}")
    value = spectral_for(bath).density(omega_arr)
    return float(value) if value.ndim == 0 else value


def bose_occupation(omega, temperature: float):
    """
    Ocupación de Bose-Einstein 1/(e^{ω/kT₀} − 1).

    Args:
        omega: Frecuencia(s) > 0
        temperature: kT₀ >= 0 (a temperatura cero devuelve 0)

    Returns:
        n̄(ω, T₀)

    Raises:
        DomainError: si ω <= 0 o la temperatura es negativa
    """
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr <= 0):
        raise DomainError(f"La frecuencia debe ser > 0: {omega}")
    if temperature < 0:
        raise DomainError(f"La temperatura debe ser >= 0: {temperature}")

    if temperature == 0:
        value = np.zeros_like(omega_arr)
    else:
        with np.errstate(over='ignore'):
            value = 1.0 / np.expm1(omega_arr / temperature)
    return float(value) if value.ndim == 0 else value


def g_kernel(lag, bath: BathSpec):
    """
    Núcleo de memoria g(s) = ∫₀^∞ J(ω) e^{−iωs} dω.

    Para el baño óhmico es la forma cerrada η ω_c² / (1 + i ω_c s)².
    """
    value = spectral_for(bath).memory_kernel(lag)
    value = np.asarray(value)
    return complex(value) if value.ndim == 0 else value


def g_kernel_quadrature(lag: float, bath: BathSpec) -> complex:
    """g(s) por cuadratura directa; oráculo de la forma cerrada"""
    return memory_kernel_quadrature(spectral_for(bath), lag)


def g_tilde_kernel(lag: float, bath: BathSpec,
                   quad: Optional[QuadratureSettings] = None) -> complex:
    """
    Núcleo de ruido g̃(s) = ∫₀^Ω_max J(ω) n̄(ω,T₀) e^{−iωs} dω.

    El integrando se extiende en ω → 0 a su límite finito η·kT₀.

    Args:
        lag: Retardo s (real)
        bath: Parámetros del baño
        quad: Ajustes de cuadratura (por defecto los del registry)

    Returns:
        g̃(s) complejo

    Raises:
        NumericalError: si la cuadratura no converge tras max_refinements
    """
    quad = quad or QuadratureSettings.from_registry()
    if bath.temperature == 0:
        return 0j

    lag = float(lag)
    if lag < 0:
        return complex(np.conj(g_tilde_kernel(-lag, bath, quad)))

    if quad.scheme == 'adaptive':
        return _gtilde_adaptive(lag, bath, quad)

    lags = np.array([lag])
    values, _ = _gtilde_panels_converged(lags, bath, quad, max(lag, 1.0))
    return complex(values[0])


# ---------------------------------------------------------------------------
# Tablas en la malla
# ---------------------------------------------------------------------------

def build_kernel_tables(bath: BathSpec, grid: 'TimeGrid',
                        quad: Optional[QuadratureSettings] = None) -> KernelSamples:
    """
    Precalcula g y g̃ en todos los retardos de la malla.

    g̃ solo depende del retardo (núcleo estacionario), así que una tabla
    de N valores sustituye a la doble integral en cada instante.

    Args:
        bath: Parámetros del baño
        grid: Malla temporal uniforme
        quad: Ajustes de cuadratura

    Returns:
        KernelSamples con estadísticas de la cuadratura
    """
    quad = quad or QuadratureSettings.from_registry()
    lags = grid.step * np.arange(grid.count)
    g_samples = np.asarray(g_kernel(lags, bath), dtype=complex)

    stats: Dict[str, Any] = {
        'scheme': quad.scheme,
        'omega_max': spectral_for(bath).omega_max(quad.omega_max_factor),
        'order': quad.order,
    }

    if bath.temperature == 0 or bath.coupling_eta == 0:
        positive = np.zeros(grid.count, dtype=complex)
        stats.update({'panels': 0, 'nodes': 0, 'convergence_error': 0.0})
    elif quad.scheme == 'adaptive':
        positive = np.array([_gtilde_adaptive(s, bath, quad) for s in lags])
        stats.update({'panels': None, 'nodes': None, 'convergence_error': None})
    else:
        positive, panel_stats = _gtilde_panels_converged(lags, bath, quad, lags[-1])
        stats.update(panel_stats)

    gtilde = np.concatenate([np.conj(positive[:0:-1]), positive])
    log(
        f"Kernels en {grid.count} retardos (Ω_max={stats['omega_max']:.1f}, "
        f"paneles={stats.get('panels')})",
        "INFO", indent=1,
    )
    return KernelSamples(grid_step=grid.step, g_samples=g_samples,
                         gtilde_samples=gtilde, stats=stats)


# ---------------------------------------------------------------------------
# Cuadraturas internas
# ---------------------------------------------------------------------------

def _auto_panels(omega_max: float, max_lag: float, quad: QuadratureSettings) -> int:
    """Paneles suficientes para que cada uno vea como mucho phase_per_panel radianes"""
    width = quad.max_panel_width
    if max_lag > 0:
        width = min(width, quad.phase_per_panel / max_lag)
    return max(1, int(math.ceil(omega_max / width)))


def _panel_rule(bath: BathSpec, quad: QuadratureSettings, panels: int):
    """Nodos y pesos efectivos w_k·J(ω_k)n̄(ω_k) de la regla por paneles"""
    spectral = spectral_for(bath)
    omega_max = spectral.omega_max(quad.omega_max_factor)

    x, w = np.polynomial.legendre.leggauss(quad.order)
    edges = np.linspace(0.0, omega_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])

    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel() * spectral.thermal_weight(nodes)

    # La cola exponencial no aporta por debajo de negligible_weight
    keep = weights > quad.negligible_weight * weights.sum()
    return nodes[keep], weights[keep]


def _panel_sum(lags: np.ndarray, nodes: np.ndarray, weights: np.ndarray,
               block: int) -> np.ndarray:
    """
    Σ_k W_k e^{−iω_k s_j} para retardos equiespaciados o arbitrarios.

    Para retardos equiespaciados procesa bloques de `block` retardos con
    una matriz de fases fija y avanza la fase base por multiplicación.
    """
    lags = np.asarray(lags, dtype=float)
    if lags.size < 2 * block or not np.allclose(np.diff(lags), lags[1] - lags[0]):
        phases = np.exp(-1j * np.outer(lags, nodes))
        return phases @ weights

    step = lags[1] - lags[0]
    local = np.exp(-1j * np.outer(step * np.arange(block), nodes))
    advance = np.exp(-1j * nodes * step * block)
    base = weights * np.exp(-1j * nodes * lags[0])

    out = np.empty(lags.size, dtype=complex)
    for start in range(0, lags.size, block):
        stop = min(start + block, lags.size)
        out[start:stop] = local[:stop - start] @ base
        base = base * advance
    return out


def _gtilde_panels_converged(lags: np.ndarray, bath: BathSpec,
                             quad: QuadratureSettings, max_lag: float):
    """
    Cuadratura por paneles con comprobación de convergencia.

    Compara P y 2P paneles en retardos de sondeo (0, máximo/3, máximo) y
    duplica P hasta que la diferencia cae bajo rtol·|g̃(0)|.
    """
    spectral = spectral_for(bath)
    omega_max = spectral.omega_max(quad.omega_max_factor)
    panels = quad.panels or _auto_panels(omega_max, max_lag, quad)

    sample_lags = np.unique(np.array([0.0, lags[len(lags) // 3], lags[-1]]))
    history = []

    for _ in range(quad.max_refinements + 1):
        nodes, weights = _panel_rule(bath, quad, panels)
        nodes2, weights2 = _panel_rule(bath, quad, 2 * panels)
        coarse = _panel_sum(sample_lags, nodes, weights, quad.lag_block)
        fine = _panel_sum(sample_lags, nodes2, weights2, quad.lag_block)

        scale = max(abs(fine[0]), np.finfo(float).tiny)
        error = float(np.max(np.abs(fine - coarse)) / scale)
        history.append({'panels': panels, 'error': error})

        if error <= quad.rtol:
            values = _panel_sum(lags, nodes, weights, quad.lag_block)
            return values, {
                'panels': panels,
                'nodes': int(nodes.size),
                'convergence_error': error,
            }
        panels *= 2

    raise NumericalError(
        f"La cuadratura de g̃ no converge tras {quad.max_refinements} duplicaciones",
        {'history': history, 'omega_max': omega_max, 'max_lag': float(max_lag)},
    )


def _gtilde_adaptive(lag: float, bath: BathSpec, quad: QuadratureSettings) -> complex:
    """g̃(s) con quad adaptativo (QAWO para los pesos coseno y seno)"""
    spectral = spectral_for(bath)
    omega_max = spectral.omega_max(quad.omega_max_factor)
    integrand = lambda w: float(spectral.thermal_weight(w))
    options = dict(epsabs=1e-14, epsrel=quad.epsrel, limit=quad.subdiv_limit)

    if lag == 0.0:
        re_int = integrate.quad(integrand, 0.0, omega_max, **options)[0]
        return complex(re_int, 0.0)

    re_int = integrate.quad(integrand, 0.0, omega_max, weight='cos', wvar=lag, **options)[0]
    im_int = -integrate.quad(integrand, 0.0, omega_max, weight='sin', wvar=lag, **options)[0]
    return complex(re_int, im_int)
