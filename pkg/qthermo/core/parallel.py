"""
Utilidades para paralelizar barridos de escenarios (ej: las tres
temperaturas de la figura 2)
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, List, Optional

from .errors import ConfigError
from .log import log

THREADS_ENV_VAR = 'NONEQ_QTHERMO_THREADS'


def resolve_thread_count(default: int = 1) -> int:
    """
    Lee NONEQ_QTHERMO_THREADS.

    Args:
        default: Valor si la variable no está definida

    Returns:
        Número de hilos (entero positivo). 1 fuerza determinismo bit a bit.

    Raises:
        ConfigError: si la variable no es un entero positivo
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == '':
        return default

    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError.invalid_value(THREADS_ENV_VAR, raw, 'positive integer')

    if threads < 1:
        raise ConfigError.invalid_value(THREADS_ENV_VAR, raw, 'positive integer')
    return threads


def parallel_map(
    items: List[Any],
    worker_function: Callable,
    max_workers: Optional[int] = None,
    label: Callable[[Any], str] = str,
) -> List[Any]:
    """
    Ejecuta worker_function sobre cada item en un pool de hilos.

    Cada escenario escribe solo en su propio directorio, así que los
    workers no comparten estado. Las excepciones se propagan: un barrido
    con un escenario fallido falla entero.

    Args:
        items: Lista de items a procesar (ej: configuraciones)
        worker_function: Función que procesa cada item
        max_workers: Hilos en paralelo (por defecto NONEQ_QTHERMO_THREADS)
        label: Cómo nombrar cada item en el progreso

    Returns:
        Resultados en el mismo orden que items
    """
    if max_workers is None:
        max_workers = resolve_thread_count()

    if max_workers == 1 or len(items) <= 1:
        return [worker_function(item) for item in items]

    log(f"Procesando {len(items)} escenarios con {max_workers} workers...", "STEP")
    start_time = time.time()
    results: List[Any] = [None] * len(items)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        # Enviar todas las tareas
        future_to_index = {
            executor.submit(worker_function, item): index
            for index, item in enumerate(items)
        }

        # Recoger resultados a medida que terminan
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            try:
                results[index] = future.result()
                log(f"{label(items[index])}: OK", "SUCCESS", indent=1)
            except Exception as e:
                log(f"{label(items[index])}: {str(e)[:80]}", "ERROR", indent=1)
                raise

    elapsed = time.time() - start_time
    log(f"Completado en {elapsed:.2f}s", "TIME")
    return results
