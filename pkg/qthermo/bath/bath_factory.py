"""
Factory para instanciar densidades espectrales dinámicamente.

Usa qthermo_registry.yaml (vía QThermoRegistry) como única fuente de
verdad para saber qué densidades están soportadas.

Uso:
    from qthermo.bath.bath_factory import BathFactory

    spectral = BathFactory().create(bath)
    j = spectral.density(1.0)
"""

import importlib
from functools import lru_cache
from typing import List

from config.config_manager import QThermoRegistry

from .base_bath import BathSpec, SpectralDensity


class BathFactory:
    """Factory que importa e instancia densidades espectrales registradas"""

    def __init__(self):
        self._registry = QThermoRegistry()

    def list_supported(self) -> List[str]:
        """Devuelve todos los códigos de densidad del registry."""
        return self._registry.list_spectral_densities()

    def create(self, bath: BathSpec) -> SpectralDensity:
        """
        Importa dinámicamente e instancia la densidad del baño.

        Args:
            bath: Parámetros del baño (bath.kind elige la densidad)

        Returns:
            Instancia de la SpectralDensity correspondiente

        Raises:
            ValueError: si bath.kind no está en el registry
            ImportError: si no se puede cargar el módulo/clase
        """
        info = self._registry.get_spectral_density_info(bath.kind)
        if info is None:
            raise ValueError(f"Densidad espectral '{bath.kind}' no está en el registry")

        module = importlib.import_module(info['module'])
        spectral_class = getattr(module, info['class'])
        return spectral_class(bath)


@lru_cache(maxsize=64)
def spectral_for(bath: BathSpec) -> SpectralDensity:
    """Instancia cacheada por baño (BathSpec es inmutable)"""
    return BathFactory().create(bath)
