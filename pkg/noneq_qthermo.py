#!/usr/bin/env python3
"""
Lanzador de noneq-qthermo sin instalar el paquete.

Uso:
    python noneq_qthermo.py run --config escenario.json
    python noneq_qthermo.py validate --fast
    python noneq_qthermo.py figure --id fig1 --out figuras/
"""

import sys
from pathlib import Path

# Añadir el directorio raíz al PYTHONPATH
sys.path.insert(0, str(Path(__file__).parent))

from qthermo.cli.main import main


if __name__ == "__main__":
    main()
