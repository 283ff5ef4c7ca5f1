"""
Datos de las figuras (fig1, fig2, fig3) a partir de los presets del
registry. Solo se emiten datos: un .dat por panel con cabeceras '#'.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from config.config_manager import registry
from qthermo.core.errors import ConfigError
from qthermo.core.log import banner, log
from qthermo.core.parallel import parallel_map

from .scenario import COLUMN_UNITS, ScenarioResult, ScenarioRunner
from .simulation_config import SimulationConfig, build_config


def _scenario_label(config: SimulationConfig) -> str:
    return f"kT0={config.kT0:g}"


def figure_configs(figure_id: str, out_dir: Union[str, Path],
                   overrides: Optional[Dict[str, Any]] = None) -> List[SimulationConfig]:
    """
    Configuraciones de los escenarios de una figura.

    Args:
        figure_id: 'fig1', 'fig2' o 'fig3'
        out_dir: Directorio de salida
        overrides: Claves que sustituyen a las del preset (ej: mallas reducidas)

    Raises:
        ConfigError: si la figura no existe en el registry
    """
    preset = registry.get_figure(figure_id)
    if preset is None:
        raise ConfigError.invalid_value('id', figure_id, ' | '.join(registry.list_figures()))

    configs = []
    for scenario in preset['scenarios']:
        data = {**scenario, 'stride': preset['stride'], 'output_dir': str(out_dir)}
        data.update(overrides or {})
        configs.append(build_config(data))
    return configs


def _panel_table(panel_id: str, columns: List[str], results: List[ScenarioResult]) -> pd.DataFrame:
    """t más una columna por (magnitud, escenario)"""
    frames = [r.to_frame(extra=True) for r in results]
    rows = min(f.shape[0] for f in frames)

    table = pd.DataFrame({'t': frames[0]['t'].to_numpy()[:rows]})
    for result, frame in zip(results, frames):
        suffix = f"[{_scenario_label(result.config)}]" if len(results) > 1 else ''
        for column in columns:
            table[f"{column}{suffix}"] = frame[column].to_numpy()[:rows]
    return table


def _panel_header(figure_id: str, panel_id: str, columns: List[str], units: List[str],
                  table: pd.DataFrame, results: List[ScenarioResult]) -> str:
    unit_of = dict(zip(columns, units))
    unit_of['t'] = COLUMN_UNITS['t']

    names = []
    for name in table.columns:
        base = name.split('[')[0]
        names.append(f"{name} ({unit_of.get(base, COLUMN_UNITS.get(base, '-'))})")

    lines = [
        f"{panel_id}: {registry.get_figure(figure_id)['description']}",
        "columns: " + "  ".join(names),
    ]
    for result in results:
        lines.append(f"config: {json.dumps(result.config.to_dict(), sort_keys=True)}")
    return "\n".join(lines)


def figure_data(figure_id: str, out_dir: Union[str, Path],
                overrides: Optional[Dict[str, Any]] = None,
                max_workers: Optional[int] = None) -> List[Path]:
    """
    Ejecuta los escenarios de una figura y escribe un .dat por panel.

    Args:
        figure_id: 'fig1', 'fig2' o 'fig3'
        out_dir: Directorio donde se escriben fig1a.dat, fig2a.dat...
        overrides: Sustituciones de claves de configuración
        max_workers: Hilos para el barrido (por defecto NONEQ_QTHERMO_THREADS)

    Returns:
        Rutas de los archivos escritos
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = figure_configs(figure_id, out_dir, overrides)

    banner(f"📊 Datos de {figure_id}: {len(configs)} escenario(s)")
    results = parallel_map(
        configs,
        lambda config: ScenarioRunner(config, out_dir).execute(),
        max_workers=max_workers,
        label=_scenario_label,
    )

    written = []
    for panel_id, panel in registry.get_figure(figure_id)['panels'].items():
        table = _panel_table(panel_id, panel['columns'], results)
        header = _panel_header(figure_id, panel_id, panel['columns'], panel['units'],
                               table, results)
        path = out_dir / f"{panel_id}.dat"
        np.savetxt(path, table.to_numpy(dtype=float), fmt='%.10e', header=header, comments='# ',
                   encoding='utf-8')
        log(f"{path.name}: {table.shape[0]} filas, {table.shape[1] - 1} curvas", "SAVE")
        written.append(path)

    log(f"{figure_id}: {len(written)} archivos en {out_dir}", "SUCCESS")
    return written
