#!/usr/bin/env python3
"""
Script de validación end-to-end de noneq-qthermo.

Verifica en mallas reducidas:
1. Núcleos y solver (forma cerrada de g̃, sistema cerrado, convergencia, oráculo de v)
2. Equivalencia de las rutas de entropía Fock/gaussiana
3. Primera ley, termalización, balances y desigualdades del ledger

Uso:
    python scripts/validate_qthermo.py
    python scripts/validate_qthermo.py --fast
    python scripts/validate_qthermo.py --fast --verbose
"""

import sys
import argparse
from pathlib import Path

# Añadir el directorio raíz al PYTHONPATH
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from qthermo.cli.validator import InvariantValidator


def main():
    parser = argparse.ArgumentParser(
        description="Valida los invariantes físicos y numéricos de noneq-qthermo"
    )
    parser.add_argument(
        '--fast', '-f',
        action='store_true',
        help='Usar las mallas del perfil rápido'
    )
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Mostrar información detallada'
    )

    args = parser.parse_args()

    validator = InvariantValidator(fast=args.fast, verbose=args.verbose)
    success = validator.run_all_validations()

    sys.exit(0 if success else 1)


if __name__ == "__main__":
    main()
