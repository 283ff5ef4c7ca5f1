"""Configuración, ejecución de escenarios, figuras y validación"""

from .simulation_config import SimulationConfig, build_config, load_config, parse_config, serialize_config

__all__ = [
    'SimulationConfig',
    'build_config',
    'load_config',
    'parse_config',
    'serialize_config',
]
