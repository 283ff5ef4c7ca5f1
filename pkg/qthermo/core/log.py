"""
Logging por consola con marcadores emoji.

Uso:
    from qthermo.core.log import log, banner

    banner("ESCENARIO fig1")
    log("Kernels calculados", "SUCCESS")
"""

_LEVEL_PREFIX = {
    'INFO': 'ℹ️ ',
    'STEP': '📌',
    'SUCCESS': '✅',
    'WARNING': '⚠️ ',
    'ERROR': '❌',
    'SAVE': '💾',
    'SEARCH': '🔍',
    'TIME': '⏱️ ',
}

_state = {'verbose': True}


def set_verbose(verbose: bool) -> None:
    """Activa o silencia la salida por consola de todo el proceso"""
    _state['verbose'] = bool(verbose)


def is_verbose() -> bool:
    return _state['verbose']


def log(message: str, level: str = "INFO", indent: int = 0) -> None:
    """
    Imprime un mensaje con su nivel.

    Los avisos y errores se imprimen siempre; el resto solo en modo verbose.

    Args:
        message: Texto a mostrar
        level: INFO, STEP, SUCCESS, WARNING, ERROR, SAVE, SEARCH o TIME
        indent: Niveles de sangría (3 espacios cada uno)
    """
    if level not in ('WARNING', 'ERROR') and not _state['verbose']:
        return

    prefix = _LEVEL_PREFIX.get(level, '')
    print(f"{'   ' * indent}{prefix} {message}")


def banner(title: str, width: int = 80) -> None:
    """Cabecera de sección con separadores '='"""
    if not _state['verbose']:
        return

    print(f"\n{'=' * width}")
    print(title)
    print(f"{'=' * width}")
