"""
noneq-qthermo: termodinámica cuántica fuera del equilibrio para un modo
bosónico acoplado a un baño térmico óhmico (modelo de Fano-Anderson).

Unidades: hbar = k = omega_0 = 1.
"""

__version__ = "1.0.0"

# Frecuencia del modo del sistema (unidad de frecuencia)
OMEGA_0 = 1.0
