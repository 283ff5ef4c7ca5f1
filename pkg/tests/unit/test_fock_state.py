"""
Tests de la ruta de Fock: matriz densidad, poblaciones, entropías y
elección de n_max
"""

import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre
from scipy.stats import poisson

from qthermo.core.errors import (
    DomainError,
    InconsistencyError,
    NumericalError,
    TruncationError,
)
from qthermo.dynamics import PropagatorSolution, TimeGrid
from qthermo.states import (
    CoherentInit,
    choose_n_max,
    coherence_rel_entropy,
    density_matrix_at,
    displaced_thermal_matrix,
    displaced_thermal_populations,
    energy_entropy,
    energy_entropy_series,
    fock_moments,
    moments_at,
    populations_at,
    vn_entropy_series,
    von_neumann_fock,
    von_neumann_gaussian,
)


def make_solution(u, v):
    """Solución sintética con u y v fijados a mano"""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=float)
    grid = TimeGrid.from_step(0.1 * (u.shape[0] - 1), 0.1)
    return PropagatorSolution(grid=grid, u=u, u_dot=-1j * u, v=v, v_dot=np.zeros_like(v))


def brute_force_element(alpha, v, m, n):
    """⟨m|ρ|n⟩ del estado térmico desplazado con la suma finita directa"""
    total = 0j
    for k in range(min(m, n) + 1):
        coefficient = math.sqrt(math.factorial(m) * math.factorial(n)) / (
            math.factorial(m - k) * math.factorial(n - k) * math.factorial(k))
        total += (coefficient * alpha ** (m - k) * alpha.conjugate() ** (n - k)
                  * v ** k / (1.0 + v) ** (m + n + 1 - k))
    return math.exp(-abs(alpha) ** 2 / (1.0 + v)) * total


def poisson_entropy(mean, size=200):
    k = np.arange(size)
    pmf = poisson.pmf(k, mean)
    return float(-np.sum(pmf * poisson.logpmf(k, mean)))


class TestCoherentInit:

    def test_intensity(self):
        assert CoherentInit(3.0 + 4.0j).intensity == pytest.approx(25.0)

    @pytest.mark.parametrize("alpha0", [complex(float('nan'), 0.0), complex(0.0, float('inf'))])
    def test_non_finite(self, alpha0):
        with pytest.raises(DomainError, match="finito"):
            CoherentInit(alpha0)


class TestDisplacedThermalMatrix:
    """Elementos ⟨m|ρ|n⟩ en espacio logarítmico"""

    def test_coherent_state_at_t0(self):
        """α = 1, v = 0: ρ_mn = e^{−1}/√(m!n!)"""
        rho = displaced_thermal_matrix(1.0 + 0j, 0.0, 30)

        m = np.arange(31)
        expected = np.exp(-1.0) / np.sqrt(
            np.outer([math.factorial(k) for k in m], [math.factorial(k) for k in m]).astype(float))
        np.testing.assert_allclose(rho.real, expected, rtol=1e-12, atol=1e-300)
        assert np.max(np.abs(rho.imag)) < 1e-15

    def test_thermal_state(self):
        """α = 0, v = 1: diagonal 2^{−(n+1)} y coherencias nulas"""
        rho = displaced_thermal_matrix(0j, 1.0, 40)

        np.testing.assert_allclose(rho.diagonal().real, 0.5 ** (np.arange(41) + 1), rtol=1e-12)
        off_diagonal = rho - np.diag(rho.diagonal())
        assert not np.any(off_diagonal)

    @pytest.mark.parametrize("alpha,v", [(1.3 + 0.4j, 0.7), (-0.2 + 1.1j, 2.5), (0.9 + 0j, 1e-3)])
    def test_matches_direct_sum(self, alpha, v):
        """Coincide con la suma finita evaluada directamente (n <= 30)"""
        n_max = 30
        rho = displaced_thermal_matrix(alpha, v, n_max)

        expected = np.array([[brute_force_element(alpha, v, m, n) for n in range(n_max + 1)]
                             for m in range(n_max + 1)])
        scale = np.max(np.abs(expected))
        assert np.max(np.abs(rho - expected)) <= 1e-12 * scale

    def test_hermitian(self):
        rho = displaced_thermal_matrix(0.8 - 0.6j, 0.4, 25)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)

    def test_large_n_max_populations(self):
        """n_max ~ 1000 sin desbordamientos en la recurrencia"""
        p = displaced_thermal_populations(1.0, 20.0, 1000)
        assert np.all(np.isfinite(p))
        assert p.sum() == pytest.approx(1.0, abs=1e-10)


class TestPopulations:
    """Recurrencia de Laguerre para p_n"""

    def test_matches_laguerre(self):
        alpha, v = 1.0, 0.5
        n = np.arange(31)
        r = v / (1 + v)
        expected = (np.exp(-alpha**2 / (1 + v)) * r**n
                    * eval_genlaguerre(n, 0, -alpha**2 / (v * (1 + v))) / (1 + v))

        np.testing.assert_allclose(displaced_thermal_populations(alpha, v, 30), expected,
                                   rtol=1e-10)

    def test_poisson_when_pure(self):
        """v = 0: distribución de Poisson de media |α|²"""
        p = displaced_thermal_populations(2.0, 0.0, 60)
        np.testing.assert_allclose(p, poisson.pmf(np.arange(61), 4.0), rtol=1e-10, atol=1e-300)

    def test_vectorized_over_times(self):
        alpha = np.array([1.0, 0.5j, 0.0])
        v = np.array([0.0, 0.3, 1.0])
        table = displaced_thermal_populations(alpha, v, 20)

        assert table.shape == (3, 21)
        for i in range(3):
            np.testing.assert_allclose(table[i], displaced_thermal_populations(alpha[i], v[i], 20))

    def test_populations_match_diagonal(self):
        sol = make_solution([1.0, 0.7 + 0.3j], [0.0, 0.6])
        init = CoherentInit(1.5 + 0.5j)

        rho = density_matrix_at(sol, init, 1, 60)
        p = populations_at(sol, init, 1, 60)
        np.testing.assert_allclose(p, rho.populations, atol=1e-12)
        assert rho.time == pytest.approx(0.1)


class TestEntropies:

    def test_poisson_entropy(self):
        p = displaced_thermal_populations(2.0, 0.0, 80)
        assert energy_entropy(p) == pytest.approx(poisson_entropy(4.0), rel=1e-10)

    def test_uniform_entropy(self):
        assert energy_entropy(np.full(8, 1.0 / 8.0)) == pytest.approx(math.log(8.0), rel=1e-14)

    def test_zero_probability_convention(self):
        assert energy_entropy([1.0, 0.0, 0.0]) == 0.0

    def test_negative_probability_raises(self):
        with pytest.raises(NumericalError, match="Población negativa"):
            energy_entropy([0.5, 0.6, -1e-3])

    def test_pure_state_vn_entropy(self):
        sol = make_solution([1.0, 1.0], [0.0, 0.0])
        rho = density_matrix_at(sol, CoherentInit(1.0 + 0j), 0, 40)
        assert von_neumann_fock(rho) == pytest.approx(0.0, abs=1e-10)

    def test_thermal_vn_entropy(self):
        """Estado térmico con n̄ = 1: S = 2 ln 2 por ambas rutas"""
        sol = make_solution([1.0, 1.0], [1.0, 1.0])
        rho = density_matrix_at(sol, CoherentInit(0j), 0, 80)

        assert von_neumann_fock(rho) == pytest.approx(2.0 * math.log(2.0), abs=1e-10)
        assert von_neumann_gaussian(3.0) == pytest.approx(2.0 * math.log(2.0), rel=1e-14)
        assert energy_entropy(rho.populations) == pytest.approx(2.0 * math.log(2.0), abs=1e-10)

    def test_series_matches_pointwise(self):
        sol = make_solution([1.0, 0.9 - 0.2j, 0.6 + 0.5j], [0.0, 0.2, 0.9])
        init = CoherentInit(1.2 + 0j)

        S_energy, tail = energy_entropy_series(sol, init, 80)
        for i in range(3):
            p = populations_at(sol, init, i, 80)
            assert S_energy[i] == pytest.approx(energy_entropy(p), abs=1e-12)
        assert tail.max() < 1e-10

    def test_initial_coherence(self):
        """En t₀ el estado es puro: C = 𝒮 = entropía de Poisson(|α₀|²)"""
        sol = make_solution([1.0, 1.0], [0.0, 0.0])
        init = CoherentInit(1.0 + 0j)

        S_energy, _ = energy_entropy_series(sol, init, 60)
        _, S_vn = vn_entropy_series(sol, init)
        coherence = coherence_rel_entropy(S_energy, S_vn)
        assert coherence[0] == pytest.approx(poisson_entropy(1.0), rel=1e-10)


class TestCoherence:

    def test_scalar(self):
        assert coherence_rel_entropy(1.5, 1.0) == pytest.approx(0.5)

    def test_tolerated_rounding(self):
        """Negativos por encima de −1e−6 se aceptan"""
        assert coherence_rel_entropy(1.0, 1.0 + 5e-7) == pytest.approx(-5e-7)

    def test_negative_raises(self):
        with pytest.raises(InconsistencyError, match="Coherencia negativa"):
            coherence_rel_entropy(np.array([1.0, 1.0]), np.array([0.5, 1.1]))

    def test_array(self):
        result = coherence_rel_entropy(np.array([2.0, 1.0]), np.array([1.0, 1.0]))
        np.testing.assert_allclose(result, [1.0, 0.0])


class TestTruncation:

    def setup_method(self):
        # α₀ = 0 y v = 1: masa de cola 2^{−(n_max+1)}
        self.sol = make_solution([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        self.init = CoherentInit(0j)

    def test_tail_error(self):
        with pytest.raises(TruncationError) as excinfo:
            density_matrix_at(self.sol, self.init, 0, 5, tail_tol=1e-10)

        assert excinfo.value.n_max == 5
        assert excinfo.value.tail_mass == pytest.approx(0.5 ** 6, rel=1e-10)
        assert excinfo.value.to_record()['diagnostics']['tail_tol'] == 1e-10

    def test_auto_doubles(self):
        """10 → 20 → 40: la primera con cola <= 1e−10"""
        assert choose_n_max(self.sol, self.init, 1e-10) == 40

    def test_fixed_n_max_accepted(self):
        assert choose_n_max(self.sol, self.init, 1e-10, policy=60) == 60

    def test_fixed_n_max_too_small(self):
        with pytest.raises(TruncationError):
            choose_n_max(self.sol, self.init, 1e-10, policy=5)

    def test_negative_v_raises(self):
        sol = make_solution([1.0, 1.0], [0.0, -1e-3])
        with pytest.raises(NumericalError, match="v\\(t,t\\) negativo"):
            populations_at(sol, self.init, 1, 10)


class TestFockAgainstGaussian:
    """La ruta de Fock reproduce la gaussiana a kT₀ = 2"""

    def test_entropy(self, cold_solution, coherent_init):
        index = cold_solution.grid.count - 1
        n_max = choose_n_max(cold_solution, coherent_init, 1e-12)
        rho = density_matrix_at(cold_solution, coherent_init, index, n_max, tail_tol=1e-12)

        _, S_vn = vn_entropy_series(cold_solution, coherent_init)
        assert von_neumann_fock(rho) == pytest.approx(S_vn[index], abs=1e-4)

    def test_moments(self, cold_solution, coherent_init):
        index = 200
        n_max = choose_n_max(cold_solution, coherent_init, 1e-12)
        rho = density_matrix_at(cold_solution, coherent_init, index, n_max, tail_tol=1e-12)

        fock = fock_moments(rho)
        gaussian = moments_at(cold_solution, coherent_init, index)
        assert fock['mean_a'] == pytest.approx(gaussian.mean_a, abs=1e-8)
        assert fock['number'] == pytest.approx(gaussian.number, abs=1e-8)
        assert fock['anomalous'] == pytest.approx(gaussian.anomalous, abs=1e-8)
