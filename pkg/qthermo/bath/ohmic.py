"""
Densidad espectral óhmica J(ω) = η ω exp(−ω/ω_c)
"""

import numpy as np

from .base_bath import SpectralDensity


class OhmicSpectralDensity(SpectralDensity):
    """Baño óhmico con corte exponencial"""

    def density(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.bath.coupling_eta * omega * np.exp(-omega / self.bath.cutoff)

    def low_frequency_slope(self) -> float:
        return self.bath.coupling_eta

    def memory_kernel(self, lag):
        """
        Forma cerrada g(s) = η ω_c² / (1 + i ω_c s)².

        Sustituye la cuadratura en el bucle O(N²) del propagador.
        """
        lag = np.asarray(lag, dtype=float)
        eta = self.bath.coupling_eta
        cutoff = self.bath.cutoff
        return eta * cutoff**2 / (1.0 + 1j * cutoff * lag) ** 2
