"""
Gestor de configuración centralizado de noneq-qthermo.

Este módulo implementa el patrón Singleton para acceder al registro
unificado en config/qthermo_registry.yaml: valores por defecto de las
simulaciones, tolerancias numéricas, densidades espectrales registradas,
presets de figuras y mallas reducidas de validación.

Uso:
    from config.config_manager import QThermoRegistry

    registry = QThermoRegistry()

    # Valores por defecto del JSON de configuración
    defaults = registry.get_run_defaults()

    # Tolerancias
    tol = registry.get_tolerance('first_law_rtol')

    # Presets de figuras
    fig = registry.get_figure('fig2')
"""

import copy
import yaml
from pathlib import Path
from typing import Dict, List, Optional, Any


class QThermoRegistry:
    """Registry centralizado de parámetros con patrón Singleton"""

    _instance = None
    _config: Optional[Dict] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        # Solo cargar una vez
        if self._config is None:
            self._load_config()

    def _load_config(self) -> None:
        """Carga el archivo YAML de configuración"""
        config_path = Path(__file__).parent / "qthermo_registry.yaml"

        if not config_path.exists():
            raise FileNotFoundError(
                f"No se encuentra el archivo de configuración: {config_path}"
            )

        with open(config_path, 'r', encoding='utf-8') as f:
            self._config = yaml.safe_load(f)

    def get_run_defaults(self) -> Dict[str, Any]:
        """
        Obtiene los valores por defecto de una simulación.

        Returns:
            Copia del diccionario con todas las claves documentadas del
            JSON de configuración

        Examples:
            >>> registry = QThermoRegistry()
            >>> registry.get_run_defaults()['dt']
            0.001
        """
        return copy.deepcopy(self._config['run_defaults'])

    def list_config_keys(self) -> List[str]:
        """Lista las claves aceptadas por parse_config"""
        return list(self._config['run_defaults'].keys())

    def get_quadrature_settings(self) -> Dict[str, Any]:
        """
        Obtiene los parámetros de la cuadratura de g̃.

        Returns:
            Diccionario con orden, política de paneles y tolerancias
        """
        return copy.deepcopy(self._config['quadrature'])

    def get_tolerance(self, name: str) -> float:
        """
        Obtiene una tolerancia numérica por nombre.

        Args:
            name: Nombre de la tolerancia (ej: 'contractivity', 'imag_v')

        Returns:
            Valor de la tolerancia

        Raises:
            KeyError: si la tolerancia no está en el registry
        """
        tolerances = self._config['tolerances']
        if name not in tolerances:
            raise KeyError(f"Tolerancia '{name}' no está en el registry")
        return tolerances[name]

    def get_tolerances(self) -> Dict[str, float]:
        """Devuelve todas las tolerancias"""
        return dict(self._config['tolerances'])

    def get_spectral_density_info(self, kind: str) -> Optional[Dict[str, str]]:
        """
        Obtiene módulo y clase de una densidad espectral registrada.

        Args:
            kind: Código de la densidad (ej: 'ohmic')

        Returns:
            Dict con 'module' y 'class', o None si no existe
        """
        return self._config['spectral_densities'].get(kind)

    def list_spectral_densities(self) -> List[str]:
        """Lista las densidades espectrales registradas"""
        return list(self._config['spectral_densities'].keys())

    def get_figure(self, figure_id: str) -> Optional[Dict[str, Any]]:
        """
        Obtiene el preset de una figura.

        Args:
            figure_id: 'fig1', 'fig2' o 'fig3'

        Returns:
            Diccionario con escenarios, stride y paneles, o None
        """
        figure = self._config['figures'].get(figure_id)
        return copy.deepcopy(figure) if figure else None

    def list_figures(self) -> List[str]:
        """Lista los identificadores de figura disponibles"""
        return list(self._config['figures'].keys())

    def get_validation_grids(self, fast: bool = False) -> Dict[str, Any]:
        """
        Obtiene las mallas reducidas del comando validate.

        Args:
            fast: True para el perfil rápido

        Returns:
            Diccionario de mallas por comprobación
        """
        profile = 'fast' if fast else 'full'
        return copy.deepcopy(self._config['validation'][profile])

    def get_metadata(self) -> Dict[str, Any]:
        """
        Obtiene los metadatos globales del proyecto (versión y unidades).

        Returns:
            Diccionario con metadatos
        """
        return copy.deepcopy(self._config['metadata'])

    def reload(self) -> None:
        """Recarga el archivo de configuración (útil para desarrollo/testing)"""
        self._config = None
        self._load_config()


# Instancia global (singleton)
# Usar esto en vez de crear instancias nuevas cada vez
registry = QThermoRegistry()
