"""
Base Bath - Parámetros del baño térmico y clase abstracta para las
densidades espectrales J(ω).

Las densidades concretas solo implementan density() y
low_frequency_slope(); el núcleo de memoria g(s) tiene una implementación
por cuadratura en la base que las subclases pueden sustituir por una forma
cerrada.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from qthermo import OMEGA_0
from qthermo.core.errors import DomainError


@dataclass(frozen=True)
class BathSpec:
    """
    Parámetros del reservorio en unidades de omega_0.

    Attributes:
        coupling_eta: Acoplamiento adimensional η (η = 0 es el límite cerrado)
        cutoff: Frecuencia de corte ω_c
        temperature: Temperatura inicial kT₀ en unidades de ħω₀
        kind: Código de la densidad espectral registrada
    """
    coupling_eta: float
    cutoff: float
    temperature: float
    kind: str = 'ohmic'

    def __post_init__(self):
        for name in ('coupling_eta', 'cutoff', 'temperature'):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} debe ser finito: {value}")

        if self.coupling_eta < 0:
            raise DomainError(f"coupling_eta debe ser >= 0: {self.coupling_eta}")
        if self.cutoff <= 0:
            raise DomainError(f"cutoff debe ser > 0: {self.cutoff}")
        if self.temperature < 0:
            raise DomainError(f"temperature debe ser >= 0: {self.temperature}")

    @classmethod
    def from_ratio(cls, eta_over_eta_c: float, cutoff: float,
                   temperature: float, kind: str = 'ohmic') -> 'BathSpec':
        """Construye el baño a partir de η/η_c, con η_c = ω₀/ω_c"""
        if cutoff <= 0:
            raise DomainError(f"cutoff debe ser > 0: {cutoff}")
        return cls(eta_over_eta_c * OMEGA_0 / cutoff, cutoff, temperature, kind)

    @property
    def critical_coupling(self) -> float:
        """η_c = ω₀/ω_c: por encima aparece un estado ligado localizado"""
        return OMEGA_0 / self.cutoff

    @property
    def is_weak_coupling(self) -> bool:
        return self.coupling_eta < self.critical_coupling

    @property
    def eta_over_eta_c(self) -> float:
        return self.coupling_eta / self.critical_coupling


class SpectralDensity(ABC):
    """
    Clase base abstracta para densidades espectrales J(ω).

    Proporciona:
    - Peso térmico J(ω)·n̄(ω,T₀) con su límite finito en ω → 0
    - Núcleo de memoria g(s) por cuadratura directa
    - Corte superior de frecuencias para la cuadratura de g̃

    Las densidades hijas deben implementar:
    - density()
    - low_frequency_slope()
    """

    def __init__(self, bath: BathSpec):
        self.bath = bath

    @abstractmethod
    def density(self, omega):
        """
        Evalúa J(ω) sin comprobar dominio (vectorizado).

        Args:
            omega: Frecuencia(s) >= 0

        Returns:
            J(ω) con la misma forma que omega
        """
        pass

    @abstractmethod
    def low_frequency_slope(self) -> float:
        """lim_{ω→0} J(ω)/ω; fija el límite J·n̄ → pendiente·kT₀"""
        pass

    def thermal_weight(self, omega):
        """
        J(ω)·n̄(ω,T₀) extendido con continuidad a ω = 0.

        Args:
            omega: Frecuencia(s) >= 0

        Returns:
            Peso térmico; idénticamente 0 a temperatura cero
        """
        omega = np.asarray(omega, dtype=float)
        temperature = self.bath.temperature
        if temperature == 0:
            return np.zeros_like(omega)

        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            value = self.density(omega) / np.expm1(omega / temperature)
        return np.where(omega > 0, value, self.low_frequency_slope() * temperature)

    def omega_max(self, factor: float) -> float:
        """Corte superior Ω_max = factor·max(ω_c, kT₀)"""
        return factor * max(self.bath.cutoff, self.bath.temperature)

    def memory_kernel(self, lag):
        """
        g(s) = ∫₀^∞ J(ω) e^{−iωs} dω por cuadratura adaptativa.

        Las subclases con forma cerrada sobrescriben este método; esta
        versión queda como oráculo.
        """
        return memory_kernel_quadrature(self, lag)


def memory_kernel_quadrature(spectral: SpectralDensity, lag: float,
                             epsabs: float = 1e-14, limit: int = 2000) -> complex:
    """
    Cuadratura directa de g(s), parte real e imaginaria por separado.

    Args:
        spectral: Densidad espectral
        lag: Retardo s (real)
        epsabs: Tolerancia absoluta de quad
        limit: Subdivisiones máximas

    Returns:
        g(s) complejo
    """
    lag = float(lag)
    integrand = lambda w: float(spectral.density(w))

    if lag == 0.0:
        re_int = integrate.quad(integrand, 0.0, np.inf, epsabs=epsabs,
                                epsrel=1e-12, limit=limit)[0]
        return complex(re_int, 0.0)

    # QAWF: integrales de Fourier en [0, ∞)
    re_int = integrate.quad(integrand, 0.0, np.inf, weight='cos',
                            wvar=abs(lag), epsabs=epsabs, limlst=100)[0]
    im_int = -integrate.quad(integrand, 0.0, np.inf, weight='sin',
                             wvar=abs(lag), epsabs=epsabs, limlst=100)[0]
    if lag < 0:
        im_int = -im_int
    return complex(re_int, im_int)
