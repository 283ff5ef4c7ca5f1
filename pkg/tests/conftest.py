"""
Configuración de pytest y fixtures compartidos
"""

import sys
from pathlib import Path

# Añadir el directorio raíz al PYTHONPATH para que funcionen los imports
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from qthermo.bath.base_bath import BathSpec
from qthermo.core.log import set_verbose
from qthermo.dynamics.coefficients import derive_coefficients
from qthermo.dynamics.propagator import TimeGrid, solve_propagator
from qthermo.states.fock_state import CoherentInit


@pytest.fixture(autouse=True)
def quiet_logging():
    """Silencia la salida por consola salvo avisos y errores"""
    set_verbose(False)
    yield
    set_verbose(True)


@pytest.fixture(scope="session")
def fig1_bath():
    """Baño de la figura 1: η = 0.1η_c, ω_c = 10ω₀, kT₀ = 20ħω₀"""
    return BathSpec.from_ratio(0.1, 10.0, 20.0)


@pytest.fixture(scope="session")
def coarse_grid():
    """Malla gruesa para tests rápidos: Δt = 0.01, t ∈ [0, 4]"""
    return TimeGrid.from_step(4.0, 0.01)


@pytest.fixture(scope="session")
def fig1_solution(fig1_bath, coarse_grid):
    """Propagador con parámetros de la figura 1 en la malla gruesa"""
    set_verbose(False)
    return solve_propagator(fig1_bath, coarse_grid)


@pytest.fixture(scope="session")
def fig1_coefficients(fig1_solution):
    return derive_coefficients(fig1_solution)


@pytest.fixture(scope="session")
def cold_solution(coarse_grid):
    """Propagador a kT₀ = 2ħω₀ (n_max moderado para el oráculo de Fock)"""
    set_verbose(False)
    return solve_propagator(BathSpec.from_ratio(0.1, 10.0, 2.0), coarse_grid)


@pytest.fixture(scope="session")
def closed_solution():
    """Sistema cerrado η = 0"""
    set_verbose(False)
    return solve_propagator(BathSpec(0.0, 10.0, 20.0), TimeGrid.from_step(10.0, 0.01))


@pytest.fixture
def coherent_init():
    """Estado coherente inicial α₀ = 1"""
    return CoherentInit(1.0 + 0.0j)
