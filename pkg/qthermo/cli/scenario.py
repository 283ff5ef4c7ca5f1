"""
Ejecución de un escenario completo y escritura del directorio de salida.

Pipeline: kernels → propagador → coeficientes → estados → ledger.

Cada ejecución escribe en su propio directorio:
    series.csv (o series.json)   una fila por instante muestreado
    meta.json                    configuración, estadísticas e informe
                                 de tolerancias, o el registro de error
"""

import hashlib
import json
import time
import traceback
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from config.config_manager import registry
from qthermo import __version__
from qthermo.core.errors import QThermoError
from qthermo.core.log import banner, log
from qthermo.dynamics.coefficients import MasterCoefficients, derive_coefficients
from qthermo.dynamics.propagator import PropagatorSolution, solve_propagator
from qthermo.ledger.thermo_ledger import (
    LedgerSeries,
    build_ledger,
    integrate_balance,
    integrate_energy,
)
from qthermo.states.fock_state import choose_n_max

from .simulation_config import SimulationConfig, serialize_config

SERIES_COLUMNS = [
    't', 're_u', 'im_u', 'v', 'omega_ren', 'gamma', 'gamma_tilde', 'n',
    'U', 'dU_dt', 'dW_dt', 'dQ_dt', 'S_energy', 'S_vn', 'C',
    'Sigma', 'Phi_Q', 'Phi_C', 'T', 'T_flag', 'F',
    'first_law_residual', 'balance_residual',
]

# Columnas adicionales disponibles para las figuras
EXTRA_COLUMNS = ['dS_energy_dt', 'dS_vn_dt', 'tail_mass', 'nu']

COLUMN_UNITS = {
    't': '1/omega_0', 're_u': '1', 'im_u': '1', 'v': '1',
    'omega_ren': 'omega_0', 'gamma': 'omega_0', 'gamma_tilde': 'omega_0', 'n': '1',
    'U': 'hbar*omega_0', 'dU_dt': 'hbar*omega_0^2', 'dW_dt': 'hbar*omega_0^2',
    'dQ_dt': 'hbar*omega_0^2', 'S_energy': 'k', 'S_vn': 'k', 'C': 'k',
    'Sigma': 'k*omega_0', 'Phi_Q': 'k*omega_0', 'Phi_C': 'k*omega_0',
    'T': 'hbar*omega_0/k', 'T_flag': '-', 'F': 'hbar*omega_0',
    'first_law_residual': 'hbar*omega_0^2', 'balance_residual': 'k*omega_0',
    'dS_energy_dt': 'k*omega_0', 'dS_vn_dt': 'k*omega_0', 'tail_mass': '1', 'nu': '1',
}


@dataclass
class ScenarioResult:
    """Resultado en memoria de un escenario (sin escribir a disco)"""
    config: SimulationConfig
    solution: PropagatorSolution
    coefficients: MasterCoefficients
    ledger: LedgerSeries
    n_max: int
    integrated_balance: Dict[str, float]
    integrated_energy: Dict[str, float]
    elapsed: float

    @property
    def warnings(self) -> List[Dict[str, Any]]:
        return list(self.solution.warnings) + list(self.ledger.warnings)

    def to_frame(self, stride: Optional[int] = None, extra: bool = False) -> pd.DataFrame:
        """
        Tabla de series muestreadas cada `stride` instantes.

        Args:
            stride: Submuestreo de salida (por defecto el de la configuración)
            extra: Añadir las columnas de EXTRA_COLUMNS

        Returns:
            DataFrame con las columnas en el orden de SERIES_COLUMNS
        """
        stride = stride or self.config.stride
        ledger, sol, coeffs = self.ledger, self.solution, self.coefficients
        rows = slice(0, ledger.count, stride)
        u = sol.u[:ledger.count]

        data = {
            't': ledger.times[rows],
            're_u': u.real[rows],
            'im_u': u.imag[rows],
            'v': sol.v[:ledger.count][rows],
            'omega_ren': coeffs.omega_ren[rows],
            'gamma': coeffs.gamma[rows],
            'gamma_tilde': coeffs.gamma_tilde[rows],
            'n': ledger.occupation[rows],
            'U': ledger.internal_energy[rows],
            'dU_dt': ledger.internal_energy_rate[rows],
            'dW_dt': ledger.work_rate[rows],
            'dQ_dt': ledger.heat_rate[rows],
            'S_energy': ledger.energy_entropy[rows],
            'S_vn': ledger.vn_entropy[rows],
            'C': ledger.coherence[rows],
            'Sigma': ledger.entropy_rate[rows],
            'Phi_Q': ledger.flux_heat[rows],
            'Phi_C': ledger.flux_coherence[rows],
            'T': ledger.temperature[rows],
            'T_flag': ledger.temperature_flag[rows].astype(str),
            'F': ledger.free_energy[rows],
            'first_law_residual': ledger.first_law_residual[rows],
            'balance_residual': ledger.balance_residual[rows],
        }
        if extra:
            data.update({
                'dS_energy_dt': ledger.energy_entropy_rate[rows],
                'dS_vn_dt': ledger.entropy_rate[rows],
                'tail_mass': ledger.tail_mass[rows],
                'nu': ledger.symplectic_nu[rows],
            })

        columns = SERIES_COLUMNS + (EXTRA_COLUMNS if extra else [])
        return pd.DataFrame(data, columns=columns)


def _jsonable(value: Any) -> Any:
    """Convierte tipos de numpy a tipos nativos para json.dump"""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def default_run_dir(config: SimulationConfig) -> Path:
    """Directorio determinista a partir del hash de la configuración"""
    digest = hashlib.sha1(serialize_config(config).encode('utf-8')).hexdigest()[:10]
    return Path(config.output_dir) / f"run_{digest}"


class ScenarioRunner:
    """Ejecuta un escenario y escribe su directorio de salida"""

    def __init__(self, config: SimulationConfig, run_dir: Optional[Union[str, Path]] = None):
        self.config = config
        self.run_dir = Path(run_dir) if run_dir else default_run_dir(config)
        self.metadata: Dict[str, Any] = {
            'project': 'noneq-qthermo',
            'version': __version__,
            'created_at': datetime.now().isoformat(),
            'config': config.to_dict(),
            'units': registry.get_metadata()['units'],
        }

    def execute(self) -> ScenarioResult:
        """
        Cálculo completo en memoria.

        Returns:
            ScenarioResult

        Raises:
            QThermoError: cualquier error de los módulos numéricos
        """
        config = self.config
        start = time.time()

        # 1. Kernels y propagador
        log("PASO 1/4: Propagador u(t) y ruido v(t,t)", "STEP")
        solution = solve_propagator(config.bath, config.grid, config.quadrature)

        # 2. Coeficientes de la ecuación maestra
        log("PASO 2/4: Coeficientes ω(t), γ(t), γ̃(t)", "STEP")
        coefficients = derive_coefficients(solution, config.u_floor)

        # 3. Truncación de Fock
        log("PASO 3/4: Truncación de la base de Fock", "STEP")
        n_max = choose_n_max(solution, config.init, config.tail_tol,
                             config.n_max, coefficients.count)

        # 4. Ledger termodinámico
        log("PASO 4/4: Ledger termodinámico", "STEP")
        ledger = build_ledger(solution, coefficients, config.init, n_max,
                              config.temperature_policy)

        return ScenarioResult(
            config=config,
            solution=solution,
            coefficients=coefficients,
            ledger=ledger,
            n_max=n_max,
            integrated_balance=integrate_balance(ledger),
            integrated_energy=integrate_energy(ledger),
            elapsed=time.time() - start,
        )

    def run(self) -> Path:
        """
        Ejecuta y escribe series + meta.json.

        Si algún módulo falla, meta.json recibe el registro del error y la
        excepción se propaga.

        Returns:
            Directorio de la ejecución
        """
        banner(f"🔍 Escenario: η/η_c={self.config.eta_over_eta_c}, "
               f"kT₀={self.config.kT0}, α₀={self.config.alpha0}")
        self.run_dir.mkdir(parents=True, exist_ok=True)

        try:
            result = self.execute()
        except Exception as e:
            record = e.to_record() if isinstance(e, QThermoError) else {
                'type': type(e).__name__,
                'message': str(e),
                'traceback': traceback.format_exc(),
            }
            self.metadata.update({'status': 'error', 'error': record})
            self.save_metadata()
            log(f"Escenario abortado: {record['message']}", "ERROR")
            raise

        self.save_series(result)
        self.metadata.update(self._result_metadata(result))
        self.save_metadata()

        log(f"Escenario completado en {result.elapsed:.1f}s "
            f"({result.ledger.count} instantes, n_max={result.n_max})", "SUCCESS")
        return self.run_dir

    def _result_metadata(self, result: ScenarioResult) -> Dict[str, Any]:
        columns = SERIES_COLUMNS
        return {
            'status': 'ok',
            'series_file': self.series_path.name,
            'columns': columns,
            'column_units': {c: COLUMN_UNITS[c] for c in columns},
            'rows': int(result.to_frame().shape[0]),
            'n_max': result.n_max,
            'truncated_at': result.coefficients.truncated_at,
            'solver': result.solution.stats,
            'tolerance_report': result.ledger.report,
            'frozen_tolerances': registry.get_tolerances(),
            'integrated_balance': result.integrated_balance,
            'integrated_energy': result.integrated_energy,
            'warnings': result.warnings,
            'elapsed_seconds': result.elapsed,
        }

    @property
    def series_path(self) -> Path:
        return self.run_dir / f"series.{self.config.format}"

    def save_series(self, result: ScenarioResult) -> Path:
        """Escribe series.csv o series.json con el orden de columnas fijo"""
        frame = result.to_frame()
        path = self.series_path

        if self.config.format == 'csv':
            frame.to_csv(path, index=False, float_format='%.12e', lineterminator='\n')
        else:
            frame.to_json(path, orient='records', double_precision=15, indent=1)

        log(f"Series guardadas: {path}", "SAVE")
        return path

    def save_metadata(self) -> Path:
        """Escribe meta.json"""
        path = self.run_dir / 'meta.json'
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(_jsonable(self.metadata), f, ensure_ascii=False, indent=2)
        log(f"Metadatos guardados: {path}", "SAVE")
        return path


def run_scenario(config: SimulationConfig, run_dir: Optional[Union[str, Path]] = None) -> Path:
    """Ejecuta un escenario y devuelve su directorio de salida"""
    return ScenarioRunner(config, run_dir).run()
