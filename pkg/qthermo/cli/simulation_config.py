"""
Configuración de una simulación: parseo y validación del JSON de entrada.

Las claves aceptadas y sus valores por defecto vienen de la sección
run_defaults de config/qthermo_registry.yaml.

Uso:
    from qthermo.cli.simulation_config import parse_config, serialize_config

    config = parse_config('{"eta_over_eta_c": 0.1, "kT0": 20}')
    text = serialize_config(config)
"""

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Union

from config.config_manager import registry
from qthermo.bath.base_bath import BathSpec
from qthermo.bath.kernels import QuadratureSettings
from qthermo.core.errors import ConfigError, DomainError
from qthermo.dynamics.propagator import TimeGrid
from qthermo.ledger.thermo_ledger import TemperaturePolicy
from qthermo.states.fock_state import CoherentInit

FORMATS = ('csv', 'json')


@dataclass(frozen=True)
class SimulationConfig:
    """
    Parámetros completos de un escenario.

    Se serializa tal cual en meta.json para poder repetir la ejecución
    sin ningún contexto externo.
    """
    eta_over_eta_c: float
    omega_c: float
    kT0: float
    alpha0_re: float
    alpha0_im: float
    dt: float
    t_end: float
    n_max: Union[str, int]
    tail_tol: float
    omega_max_factor: float
    stride: int
    format: str
    u_floor: float
    s_floor: float
    q_floor: float
    quad_order: int
    quad_panels: Union[str, int]
    output_dir: str

    @property
    def bath(self) -> BathSpec:
        return BathSpec.from_ratio(self.eta_over_eta_c, self.omega_c, self.kT0)

    @property
    def alpha0(self) -> complex:
        return complex(self.alpha0_re, self.alpha0_im)

    @property
    def init(self) -> CoherentInit:
        return CoherentInit(self.alpha0)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.from_step(self.t_end, self.dt)

    @property
    def quadrature(self) -> QuadratureSettings:
        panels = None if self.quad_panels == 'auto' else int(self.quad_panels)
        return QuadratureSettings.from_registry(
            omega_max_factor=self.omega_max_factor,
            order=self.quad_order,
            panels=panels,
        )

    @property
    def temperature_policy(self) -> TemperaturePolicy:
        return TemperaturePolicy.from_registry(s_floor=self.s_floor, q_floor=self.q_floor)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def with_overrides(self, **overrides) -> 'SimulationConfig':
        """Copia con claves sustituidas, validando el resultado"""
        data = self.to_dict()
        data.update(overrides)
        return build_config(data)


# ---------------------------------------------------------------------------
# Validación por clave
# ---------------------------------------------------------------------------

def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError.invalid_value(key, value, 'number')
    if not math.isfinite(value):
        raise ConfigError.invalid_value(key, value, 'finite number')
    return float(value)


def _positive(key: str, value: Any) -> float:
    number = _number(key, value)
    if number <= 0:
        raise ConfigError.invalid_value(key, value, '> 0')
    return number


def _non_negative(key: str, value: Any) -> float:
    number = _number(key, value)
    if number < 0:
        raise ConfigError.invalid_value(key, value, '>= 0')
    return number


def _integer(key: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ConfigError.invalid_value(key, value, f'integer >= {minimum}')
    if value < minimum:
        raise ConfigError.invalid_value(key, value, f'integer >= {minimum}')
    return value


def _auto_or_integer(key: str, value: Any, minimum: int) -> Union[str, int]:
    if value == 'auto':
        return 'auto'
    if isinstance(value, str):
        raise ConfigError.invalid_value(key, value, f'"auto" or integer >= {minimum}')
    return _integer(key, value, minimum)


_VALIDATORS = {
    'eta_over_eta_c': _non_negative,
    'omega_c': _positive,
    'kT0': _non_negative,
    'alpha0_re': _number,
    'alpha0_im': _number,
    'dt': _positive,
    't_end': _positive,
    'n_max': lambda k, v: _auto_or_integer(k, v, 1),
    'tail_tol': _positive,
    'omega_max_factor': _positive,
    'stride': lambda k, v: _integer(k, v, 1),
    'u_floor': _positive,
    's_floor': _positive,
    'q_floor': _positive,
    'quad_order': lambda k, v: _integer(k, v, 2),
    'quad_panels': lambda k, v: _auto_or_integer(k, v, 1),
}


def build_config(data: Dict[str, Any]) -> SimulationConfig:
    """
    Valida un diccionario de claves y completa las ausentes con los
    valores por defecto del registry.

    Raises:
        ConfigError: clave desconocida o valor fuera de su restricción
    """
    defaults = registry.get_run_defaults()
    allowed = [f.name for f in fields(SimulationConfig)]

    for key in data:
        if key not in allowed:
            raise ConfigError.unknown_key(key, allowed)

    merged = {key: data.get(key, defaults[key]) for key in allowed}
    values: Dict[str, Any] = {}
    for key, value in merged.items():
        validator = _VALIDATORS.get(key)
        values[key] = validator(key, value) if validator else value

    if values['format'] not in FORMATS:
        raise ConfigError.invalid_value('format', values['format'], ' | '.join(FORMATS))
    if not isinstance(values['output_dir'], str) or not values['output_dir'].strip():
        raise ConfigError.invalid_value('output_dir', values['output_dir'], 'non-empty path')
    if not values['tail_tol'] < 1:
        raise ConfigError.invalid_value('tail_tol', values['tail_tol'], '0 < tail_tol < 1')

    config = SimulationConfig(**values)
    try:
        config.grid
    except DomainError as e:
        raise ConfigError.invalid_value('t_end', values['t_end'], f'multiple of dt ({e.message})')
    return config


def parse_config(source: str) -> SimulationConfig:
    """
    Parsea el texto JSON de configuración.

    Args:
        source: Texto UTF-8 con un objeto JSON

    Returns:
        SimulationConfig validada

    Raises:
        ConfigError: JSON inválido, clave desconocida o valor inválido
    """
    try:
        data = json.loads(source) if source.strip() else {}
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON de configuración inválido: {e}")

    if not isinstance(data, dict):
        raise ConfigError(f"La configuración debe ser un objeto JSON, no {type(data).__name__}")
    return build_config(data)


def load_config(path: Union[str, Path]) -> SimulationConfig:
    """Lee y parsea un archivo de configuración"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"No existe el archivo de configuración: {path}")
    return parse_config(path.read_text(encoding='utf-8'))


def serialize_config(config: SimulationConfig) -> str:
    """JSON con todas las claves; parse_config(serialize_config(c)) == c"""
    return json.dumps(config.to_dict(), indent=2, ensure_ascii=False)


def default_config(**overrides) -> SimulationConfig:
    """Configuración por defecto con sustituciones opcionales"""
    return build_config(overrides)
