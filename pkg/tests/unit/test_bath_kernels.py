"""
Tests del baño: densidad espectral, ocupación de Bose y núcleos g, g̃
"""

import math

import numpy as np
import pytest
from scipy.special import polygamma

from qthermo.bath import (
    BathFactory,
    BathSpec,
    QuadratureSettings,
    bose_occupation,
    build_kernel_tables,
    g_kernel,
    g_kernel_quadrature,
    g_tilde_kernel,
    spectral_density,
)
from qthermo.bath.bath_factory import spectral_for
from qthermo.bath.ohmic import OhmicSpectralDensity
from qthermo.core.errors import DomainError
from qthermo.dynamics.propagator import TimeGrid

# g̃(0) = ηT²ψ₁(1 + T/ω_c) con η = 0.01, T = 20, ω_c = 10
GTILDE_ZERO = 1.5797362673929057


class TestBathSpec:
    """Tests de los parámetros del baño"""

    def test_from_ratio(self):
        """η = 0.1η_c con ω_c = 10 da η = 0.01"""
        bath = BathSpec.from_ratio(0.1, 10.0, 20.0)

        assert bath.coupling_eta == pytest.approx(0.01)
        assert bath.critical_coupling == pytest.approx(0.1)
        assert bath.eta_over_eta_c == pytest.approx(0.1)
        assert bath.is_weak_coupling

    def test_strong_coupling_flag(self):
        assert not BathSpec.from_ratio(1.5, 10.0, 20.0).is_weak_coupling

    def test_zero_coupling_allowed(self):
        """η = 0 es el límite de sistema cerrado"""
        assert BathSpec(0.0, 10.0, 20.0).coupling_eta == 0.0

    @pytest.mark.parametrize("eta,cutoff,temperature,match", [
        (-0.01, 10.0, 20.0, "coupling_eta"),
        (0.01, 0.0, 20.0, "cutoff"),
        (0.01, 10.0, -1.0, "temperature"),
        (float('nan'), 10.0, 20.0, "finito"),
    ])
    def test_invalid_parameters(self, eta, cutoff, temperature, match):
        with pytest.raises(DomainError, match=match):
            BathSpec(eta, cutoff, temperature)

    def test_immutable(self):
        bath = BathSpec(0.01, 10.0, 20.0)
        with pytest.raises(Exception):
            bath.temperature = 5.0


class TestBathFactory:
    """Tests del factory de densidades espectrales"""

    def setup_method(self):
        self.factory = BathFactory()

    def test_list_supported(self):
        assert self.factory.list_supported() == ['ohmic']

    def test_create_ohmic(self):
        spectral = self.factory.create(BathSpec(0.01, 10.0, 20.0))
        assert isinstance(spectral, OhmicSpectralDensity)

    def test_create_unknown_raises(self):
        with pytest.raises(ValueError, match="no está en el registry"):
            self.factory.create(BathSpec(0.01, 10.0, 20.0, kind='lorentz'))

    def test_spectral_for_is_cached(self):
        bath = BathSpec(0.01, 10.0, 20.0)
        assert spectral_for(bath) is spectral_for(bath)


class TestSpectralDensity:
    """Tests de J(ω) = ηω e^{−ω/ω_c}"""

    def test_zero_frequency(self):
        assert spectral_density(0.0, BathSpec(0.3, 10.0, 20.0)) == 0.0

    def test_at_cutoff(self):
        """J(ω_c) con η = 1, ω_c = 10 es 10/e"""
        value = spectral_density(10.0, BathSpec(1.0, 10.0, 0.0))
        assert value == pytest.approx(10.0 * math.exp(-1.0), rel=1e-14)

    def test_fig1_coupling(self):
        """η = 0.1η_c en ω = ω_c da 0.1/e ≈ 0.036788"""
        value = spectral_density(10.0, BathSpec.from_ratio(0.1, 10.0, 20.0))
        assert value == pytest.approx(0.036788, abs=1e-6)

    def test_vectorized(self):
        omega = np.linspace(0.0, 50.0, 11)
        values = spectral_density(omega, BathSpec(0.01, 10.0, 20.0))
        assert values.shape == omega.shape

    def test_negative_frequency_raises(self):
        with pytest.raises(DomainError, match=">= 0"):
            spectral_density(-1.0, BathSpec(0.01, 10.0, 20.0))


class TestBoseOccupation:
    """Tests de n̄(ω, T₀)"""

    def test_zero_temperature(self):
        assert bose_occupation(1.0, 0.0) == 0.0

    def test_kT20(self):
        assert bose_occupation(1.0, 20.0) == pytest.approx(19.5042, abs=1e-4)

    def test_kT15(self):
        assert bose_occupation(1.0, 15.0) == pytest.approx(1.0 / math.expm1(1.0 / 15.0), rel=1e-14)
        assert bose_occupation(1.0, 15.0) == pytest.approx(14.5042, rel=1e-3)

    @pytest.mark.parametrize("omega", [0.0, -1.0])
    def test_non_positive_frequency_raises(self, omega):
        with pytest.raises(DomainError, match="> 0"):
            bose_occupation(omega, 20.0)

    def test_negative_temperature_raises(self):
        with pytest.raises(DomainError, match="temperatura"):
            bose_occupation(1.0, -1.0)


class TestMemoryKernel:
    """Tests de g(s) = ηω_c²/(1 + iω_c s)²"""

    def setup_method(self):
        self.bath = BathSpec(0.01, 10.0, 20.0)

    def test_value_at_zero(self):
        """g(0) = ηω_c²"""
        assert g_kernel(0.0, self.bath) == pytest.approx(1.0 + 0j, rel=1e-15)

    def test_unit_parameters(self):
        """η = 1, ω_c = 1, s = 1: 1/(1+i)² = −0.5i"""
        value = g_kernel(1.0, BathSpec(1.0, 1.0, 0.0))
        assert abs(value - (-0.5j)) < 1e-15

    def test_decays(self):
        assert abs(g_kernel(1e6, self.bath)) < 1e-10

    def test_hermitian_and_bounded(self):
        lags = np.linspace(0.0, 50.0, 501)
        forward = g_kernel(lags, self.bath)
        backward = g_kernel(-lags, self.bath)

        np.testing.assert_allclose(backward, np.conj(forward), rtol=1e-14)
        assert np.all(np.abs(forward) <= g_kernel(0.0, self.bath).real * (1 + 1e-14))

    @pytest.mark.parametrize("lag", [0.0, 0.1, 0.3])
    def test_closed_form_matches_quadrature(self, lag):
        """La forma cerrada coincide con la cuadratura directa"""
        closed = g_kernel(lag, self.bath)
        numeric = g_kernel_quadrature(lag, self.bath)
        assert abs(closed - numeric) <= 1e-8 * abs(closed)

    @pytest.mark.parametrize("lag", [1.0, 5.0, 50.0])
    def test_closed_form_matches_quadrature_long_lag(self, lag):
        """A retardos grandes el error se mide frente a g(0)"""
        closed = g_kernel(lag, self.bath)
        numeric = g_kernel_quadrature(lag, self.bath)
        assert abs(closed - numeric) <= 1e-8 * abs(g_kernel(0.0, self.bath))


class TestNoiseKernel:
    """Tests de g̃(s) = ∫ J n̄ e^{−iωs} dω"""

    def setup_method(self):
        self.bath = BathSpec(0.01, 10.0, 20.0)
        self.quad = QuadratureSettings.from_registry()

    def test_zero_temperature(self):
        assert g_tilde_kernel(0.0, BathSpec(0.01, 10.0, 0.0), self.quad) == 0j

    def test_low_frequency_limit(self):
        """J·n̄ → ηkT₀ = 0.2 en ω → 0"""
        weight = spectral_for(self.bath).thermal_weight(0.0)
        assert float(weight) == pytest.approx(0.2, rel=1e-15)

    def test_frozen_value_at_zero(self):
        """g̃(0) coincide con la forma cerrada ηT²ψ₁(1 + T/ω_c)"""
        expected = 0.01 * 20.0**2 * float(polygamma(1, 3.0))
        assert expected == pytest.approx(GTILDE_ZERO, rel=1e-14)

        value = g_tilde_kernel(0.0, self.bath, self.quad)
        assert abs(value.imag) < 1e-14
        assert value.real == pytest.approx(GTILDE_ZERO, rel=1e-8)

    @pytest.mark.parametrize("lag", [0.0, 0.37, 1.3, 4.0])
    def test_panels_match_adaptive(self, lag):
        """Dos esquemas de cuadratura independientes coinciden"""
        adaptive = QuadratureSettings.from_registry(scheme='adaptive')

        panels = g_tilde_kernel(lag, self.bath, self.quad)
        reference = g_tilde_kernel(lag, self.bath, adaptive)
        assert abs(panels - reference) <= 1e-8 * GTILDE_ZERO

    def test_hermitian_symmetry(self):
        value = g_tilde_kernel(0.8, self.bath, self.quad)
        mirrored = g_tilde_kernel(-0.8, self.bath, self.quad)
        assert mirrored == np.conj(value)

    def test_linear_in_coupling(self):
        """g̃ escala linealmente con η"""
        double = BathSpec(0.02, 10.0, 20.0)
        single_value = g_tilde_kernel(0.5, self.bath, self.quad)
        double_value = g_tilde_kernel(0.5, double, self.quad)
        assert abs(double_value - 2 * single_value) <= 1e-12 * abs(double_value)

    def test_invalid_scheme(self):
        with pytest.raises(DomainError, match="Esquema"):
            QuadratureSettings(scheme='montecarlo')


class TestKernelTables:
    """Tests de las tablas precalculadas en la malla"""

    def setup_method(self):
        self.bath = BathSpec(0.01, 10.0, 20.0)
        self.grid = TimeGrid.from_step(2.0, 0.02)
        self.tables = build_kernel_tables(self.bath, self.grid)

    def test_shapes(self):
        assert self.tables.count == self.grid.count
        assert self.tables.gtilde_samples.shape == (2 * self.grid.count - 1,)

    def test_negative_lags_are_conjugates(self):
        for j in (1, 7, self.grid.count - 1):
            assert self.tables.gtilde_at(-j) == np.conj(self.tables.gtilde_at(j))

    def test_zero_lag_real_positive(self):
        value = self.tables.gtilde_at(0)
        assert value.imag == 0.0
        assert value.real == pytest.approx(GTILDE_ZERO, rel=1e-8)

    def test_matches_pointwise_kernel(self):
        j = 37
        pointwise = g_tilde_kernel(j * self.grid.step, self.bath)
        assert abs(self.tables.gtilde_at(j) - pointwise) <= 1e-7 * GTILDE_ZERO

    def test_g_samples_closed_form(self):
        np.testing.assert_allclose(self.tables.g_samples,
                                   g_kernel(self.grid.times, self.bath), rtol=1e-12)

    def test_stats(self):
        stats = self.tables.stats
        assert stats['omega_max'] == pytest.approx(50.0 * 20.0)
        assert stats['panels'] >= 1
        assert stats['convergence_error'] <= 1e-8

    def test_zero_coupling_tables(self):
        tables = build_kernel_tables(BathSpec(0.0, 10.0, 20.0), self.grid)
        assert not np.any(tables.gtilde_samples)
        assert not np.any(tables.g_samples)
