"""
Termalización completa con los parámetros de la figura 2 (kT₀ = 20).

Tarda del orden de un minuto: pytest -m slow
"""

import math

import numpy as np
import pytest

from qthermo.bath import bose_occupation
from qthermo.cli.scenario import ScenarioRunner
from qthermo.cli.simulation_config import build_config
from qthermo.ledger import STABLE, transient_end
from config.config_manager import registry

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def thermalized(tmp_path_factory):
    config = build_config({
        "eta_over_eta_c": 0.1, "omega_c": 10.0, "kT0": 20.0,
        "alpha0_re": 1.0, "alpha0_im": 0.0, "dt": 0.01, "t_end": 120.0,
        "output_dir": str(tmp_path_factory.mktemp("runs")),
    })
    return ScenarioRunner(config).execute()


class TestThermalization:

    def test_occupation_reaches_bose(self, thermalized):
        n_bar = bose_occupation(1.0, 20.0)
        assert thermalized.ledger.occupation[-1] == pytest.approx(n_bar, rel=0.05)

    def test_entropy_reaches_thermal_value(self, thermalized):
        n_bar = bose_occupation(1.0, 20.0)
        expected = (n_bar + 1) * math.log(n_bar + 1) - n_bar * math.log(n_bar)
        assert thermalized.ledger.vn_entropy[-1] == pytest.approx(expected, rel=0.02)

    def test_temperature_approaches_bath(self, thermalized):
        ledger = thermalized.ledger
        stable = np.nonzero(ledger.temperature_flag == STABLE)[0]
        assert stable.size > 0
        assert ledger.temperature[stable[-1]] == pytest.approx(20.0, rel=0.1)

    def test_coherence_decays(self, thermalized):
        coherence = thermalized.ledger.coherence
        assert coherence[-1] < 1e-2 * coherence[0]
        assert coherence.min() >= -1e-6


class TestLedgerInvariants:

    def test_entropy_ordering(self, thermalized):
        """𝒮(t) >= S(t) en todo instante"""
        ledger = thermalized.ledger
        assert np.all(ledger.energy_entropy - ledger.vn_entropy >= -1e-6)

    def test_balance(self, thermalized):
        assert thermalized.ledger.report['balance']['passed']
        assert abs(thermalized.integrated_balance['residual']) <= 1e-6

    def test_integrated_first_law(self, thermalized):
        energy = thermalized.integrated_energy
        assert abs(energy['residual']) <= 1e-2 * abs(energy['delta_U'])

    def test_tail_mass(self, thermalized):
        assert thermalized.ledger.report['tail_mass_max'] <= 1e-10


class TestSecondLaw:
    """Criterios de segunda ley sobre la termalización completa"""

    def test_spohn(self, thermalized):
        """Φ_C >= 0 en todo instante"""
        tol = registry.get_tolerance('spohn')
        assert thermalized.ledger.flux_coherence.min() >= -tol

    def test_energy_entropy_non_decreasing(self, thermalized):
        tol = registry.get_tolerance('monotonic_step')
        assert np.diff(thermalized.ledger.energy_entropy).min() >= -tol

    def test_free_energy_non_increasing(self, thermalized):
        """F(t) solo se compara entre muestras con T estable"""
        ledger = thermalized.ledger
        tol = registry.get_tolerance('monotonic_step')
        stable = ledger.temperature_flag == STABLE
        steps = np.diff(ledger.free_energy)[stable[1:] & stable[:-1]]

        assert steps.size > 0
        assert steps.max() <= tol

    def test_flux_crossover(self, thermalized):
        """Φ_C domina al principio y Φ_Q a partir de t*"""
        ledger = thermalized.ledger
        difference = (ledger.flux_coherence - ledger.flux_heat)[1:]
        crossing = np.nonzero(difference <= 0)[0]

        assert crossing.size > 0
        assert crossing[0] > 0
        first = int(crossing[0])
        assert np.all(difference[first:first + 50] < 0)


class TestWorkRate:

    def test_transient_work_is_negative(self, thermalized):
        """El baño hace trabajo sobre el oscilador hasta el mínimo de ω(t)"""
        ledger = thermalized.ledger
        end = transient_end(thermalized.coefficients.omega_ren[:ledger.count])
        peak = np.max(np.abs(ledger.work_rate))

        assert end > 0
        assert np.max(ledger.work_rate[1:end + 1]) <= 1e-3 * peak

    def test_work_turns_after_minimum(self, thermalized):
        """Pasado el mínimo ω remonta y dW/dt cambia de signo"""
        ledger = thermalized.ledger
        omega = thermalized.coefficients.omega_ren[:ledger.count]
        end = transient_end(omega)

        assert end < ledger.count - 1
        assert np.max(ledger.work_rate[end + 1:]) > 0
