"""
Interfaz de línea de comandos de noneq-qthermo.

Uso:
    noneq-qthermo run --config escenario.json
    noneq-qthermo validate [--fast]
    noneq-qthermo figure --id fig2 --out figuras/
"""

import argparse
import sys
from typing import List, Optional

from qthermo import __version__
from qthermo.core.errors import QThermoError
from qthermo.core.log import log, set_verbose


def cmd_run(args: argparse.Namespace) -> int:
    from .scenario import run_scenario
    from .simulation_config import load_config

    config = load_config(args.config)
    run_dir = run_scenario(config, args.out)
    print(f"\n📁 Resultados en: {run_dir}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    from .validator import InvariantValidator

    validator = InvariantValidator(fast=args.fast, dt_scale=args.dt_scale, verbose=args.verbose)
    return 0 if validator.run_all_validations() else 1


def cmd_figure(args: argparse.Namespace) -> int:
    from .figures import figure_data

    paths = figure_data(args.id, args.out)
    print(f"\n📁 {len(paths)} archivos en: {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='noneq-qthermo',
        description="Termodinámica cuántica fuera del equilibrio de un oscilador en un baño óhmico",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--quiet', '-q', action='store_true', help='Solo avisos y errores')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='Ejecuta un escenario desde un JSON de configuración')
    run.add_argument('--config', required=True, help='Ruta del JSON de configuración')
    run.add_argument('--out', default=None,
                     help='Directorio de la ejecución (por defecto output_dir/run_<hash>)')
    run.set_defaults(handler=cmd_run)

    validate = subparsers.add_parser('validate', help='Ejecuta la suite de invariantes')
    validate.add_argument('--fast', action='store_true', help='Mallas reducidas (perfil rápido)')
    validate.add_argument('--dt-scale', type=float, default=1.0,
                          help='Multiplica el paso de todas las mallas (default: 1)')
    validate.add_argument('--verbose', '-v', action='store_true', help='Mostrar información detallada')
    validate.set_defaults(handler=cmd_validate)

    figure = subparsers.add_parser('figure', help='Genera los datos de una figura')
    figure.add_argument('--id', required=True, choices=['fig1', 'fig2', 'fig3'])
    figure.add_argument('--out', required=True, help='Directorio de salida de los .dat')
    figure.set_defaults(handler=cmd_figure)

    return parser


def main(argv: Optional[List[str]] = None) -> None:
    """Punto de entrada del comando noneq-qthermo"""
    args = build_parser().parse_args(argv)
    if args.quiet:
        set_verbose(False)

    try:
        status = args.handler(args)
    except QThermoError as e:
        log(f"{type(e).__name__}: {e.message}", "ERROR")
        sys.exit(2)
    except KeyboardInterrupt:
        log("Interrumpido por el usuario", "ERROR")
        sys.exit(130)

    sys.exit(status)


if __name__ == "__main__":
    main()
