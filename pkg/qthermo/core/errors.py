"""
Jerarquía de excepciones del motor.

Todas las excepciones exponen to_record(), el registro legible por máquina
que el runner escribe en meta.json cuando una ejecución aborta.
"""

from typing import Any, Dict, Optional


class QThermoError(Exception):
    """Excepción raíz de noneq-qthermo"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.diagnostics = diagnostics or {}

    def to_record(self) -> Dict[str, Any]:
        """Registro serializable del error"""
        return {
            'type': type(self).__name__,
            'message': self.message,
            'diagnostics': self.diagnostics,
        }


class DomainError(QThermoError, ValueError):
    """Argumento fuera del dominio de una función pura"""


class ConfigError(QThermoError, ValueError):
    """Clave desconocida o valor inválido en la configuración"""

    def __init__(self, message: str, key: Optional[str] = None,
                 value: Any = None, constraint: Optional[str] = None):
        super().__init__(message, {
            'key': key,
            'value': repr(value) if value is not None else None,
            'constraint': constraint,
        })
        self.key = key
        self.value = value
        self.constraint = constraint

    @classmethod
    def unknown_key(cls, key: str, allowed) -> 'ConfigError':
        return cls(
            f"Clave desconocida '{key}'. Claves válidas: {', '.join(sorted(allowed))}",
            key=key,
            constraint='known key',
        )

    @classmethod
    def invalid_value(cls, key: str, value: Any, constraint: str) -> 'ConfigError':
        return cls(
            f"Valor inválido para '{key}': {value!r} (restricción: {constraint})",
            key=key,
            value=value,
            constraint=constraint,
        )


class NumericalError(QThermoError, ArithmeticError):
    """Fallo numérico: cuadratura no convergida, parte imaginaria espuria..."""


class TruncationError(NumericalError):
    """Masa de cola de Fock por encima de tail_tol"""

    def __init__(self, message: str, n_max: int, tail_mass: float, tail_tol: float):
        super().__init__(message, {
            'n_max': n_max,
            'tail_mass': tail_mass,
            'tail_tol': tail_tol,
        })
        self.n_max = n_max
        self.tail_mass = tail_mass
        self.tail_tol = tail_tol


class PhysicalityError(NumericalError):
    """Matriz de covarianza que viola la cota de incertidumbre"""


class InconsistencyError(QThermoError):
    """Dos rutas independientes del ledger no cuadran"""
