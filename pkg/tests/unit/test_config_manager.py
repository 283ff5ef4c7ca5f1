"""
Tests unitarios para el gestor de configuración centralizado
"""

import pytest
from config.config_manager import QThermoRegistry, registry

SPEC_KEYS = [
    "eta_over_eta_c", "omega_c", "kT0", "alpha0_re", "alpha0_im", "dt", "t_end",
    "n_max", "tail_tol", "omega_max_factor", "stride", "format",
]


class TestQThermoRegistry:
    """Tests para el gestor de configuración centralizado"""

    def test_singleton_pattern(self):
        """Verifica que QThermoRegistry implementa el patrón Singleton"""
        instance1 = QThermoRegistry()
        instance2 = QThermoRegistry()

        assert instance1 is instance2, "Debe ser la misma instancia (Singleton)"

    def test_run_defaults_documented_values(self):
        """Verifica los valores por defecto documentados del JSON de configuración"""
        defaults = registry.get_run_defaults()

        assert defaults['dt'] == 0.001
        assert defaults['t_end'] == 30.0
        assert defaults['tail_tol'] == 1e-10
        assert defaults['n_max'] == 'auto'
        assert defaults['omega_max_factor'] == 50.0
        assert defaults['stride'] == 10
        assert defaults['format'] == 'csv'

    def test_run_defaults_has_every_config_key(self):
        """Todas las claves del JSON tienen valor por defecto"""
        keys = registry.list_config_keys()

        for key in SPEC_KEYS:
            assert key in keys, f"Falta la clave '{key}'"

    def test_run_defaults_returns_copy(self):
        """Modificar el diccionario devuelto no altera el registry"""
        defaults = registry.get_run_defaults()
        defaults['dt'] = 99.0

        assert registry.get_run_defaults()['dt'] == 0.001

    @pytest.mark.parametrize("name,expected", [
        ('contractivity', 1e-6),
        ('imag_v', 1e-10),
        ('population_floor', -1e-14),
        ('eigenvalue_floor', -1e-10),
        ('coherence_floor', -1e-6),
        ('first_law_rtol', 1e-6),
        ('clausius_rtol', 1e-8),
    ])
    def test_get_tolerance(self, name, expected):
        """Verifica las tolerancias congeladas"""
        assert registry.get_tolerance(name) == expected

    def test_get_tolerance_unknown_raises(self):
        """Una tolerancia inexistente lanza KeyError"""
        with pytest.raises(KeyError, match="no está en el registry"):
            registry.get_tolerance('inventada')

    def test_quadrature_settings(self):
        """Verifica los parámetros de cuadratura"""
        quad = registry.get_quadrature_settings()

        assert quad['order'] == 64
        assert quad['rtol'] == 1e-8
        assert quad['max_refinements'] >= 1

    def test_spectral_densities(self):
        """Solo la densidad óhmica está registrada"""
        assert registry.list_spectral_densities() == ['ohmic']

        info = registry.get_spectral_density_info('ohmic')
        assert info['module'] == 'qthermo.bath.ohmic'
        assert info['class'] == 'OhmicSpectralDensity'

    def test_spectral_density_unknown(self):
        """Devuelve None para densidades no registradas"""
        assert registry.get_spectral_density_info('lorentz') is None

    def test_list_figures(self):
        assert registry.list_figures() == ['fig1', 'fig2', 'fig3']

    def test_fig2_temperatures(self):
        """La figura 2 barre kT₀ = 15, 20, 25"""
        fig = registry.get_figure('fig2')

        temperatures = [s['kT0'] for s in fig['scenarios']]
        assert temperatures == [15.0, 20.0, 25.0]
        assert set(fig['panels']) == {'fig2a', 'fig2b', 'fig2c', 'fig2d'}

    def test_fig1_caption_parameters(self):
        """Parámetros de la figura 1: η = 0.1η_c, ω_c = 10, kT₀ = 20, α₀ = 1"""
        scenario = registry.get_figure('fig1')['scenarios'][0]

        assert scenario['eta_over_eta_c'] == 0.1
        assert scenario['omega_c'] == 10.0
        assert scenario['kT0'] == 20.0
        assert scenario['alpha0_re'] == 1.0

    def test_panel_columns_have_units(self):
        """Cada panel declara una unidad por columna"""
        for figure_id in registry.list_figures():
            for panel in registry.get_figure(figure_id)['panels'].values():
                assert len(panel['columns']) == len(panel['units'])

    def test_get_figure_nonexistent(self):
        assert registry.get_figure('fig9') is None

    def test_validation_profiles_share_checks(self):
        """Los perfiles full y fast tienen las mismas comprobaciones"""
        full = registry.get_validation_grids(fast=False)
        fast = registry.get_validation_grids(fast=True)

        assert set(full) == set(fast)

    def test_validation_grids_are_multiples(self):
        """t_end es múltiplo entero de dt en todas las mallas de validación"""
        for fast in (False, True):
            for name, grid in registry.get_validation_grids(fast).items():
                if isinstance(grid, dict) and 'dt' in grid:
                    steps = grid['t_end'] / grid['dt']
                    assert abs(steps - round(steps)) < 1e-6, name

    def test_metadata(self):
        """Verifica metadatos y unidades"""
        metadata = registry.get_metadata()

        assert metadata['project'] == 'noneq-qthermo'
        assert metadata['units']['energy'] == 'hbar*omega_0'

    def test_reload(self):
        """reload() vuelve a leer el YAML sin perder datos"""
        registry.reload()
        assert registry.get_tolerance('imag_v') == 1e-10
