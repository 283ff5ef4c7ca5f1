"""
Suite de invariantes del comando `validate`.

Ejecuta en mallas reducidas (config/qthermo_registry.yaml, sección
validation) todas las comprobaciones físicas y numéricas y emite una tabla
pass/fail con el valor medido frente a la tolerancia.

Uso:
    from qthermo.cli.validator import InvariantValidator

    validator = InvariantValidator(fast=True)
    ok = validator.run_all_validations()
"""

import math
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from scipy.special import polygamma

from config.config_manager import registry
from qthermo.bath.base_bath import BathSpec
from qthermo.bath.kernels import (
    QuadratureSettings,
    bose_occupation,
    build_kernel_tables,
    g_tilde_kernel,
)
from qthermo.core.log import is_verbose, set_verbose
from qthermo.core.parallel import parallel_map
from qthermo.dynamics.propagator import (
    TimeGrid,
    compute_v_diag,
    compute_v_diag_direct,
    solve_propagator,
    solve_u,
)
from qthermo.ledger.thermo_ledger import STABLE, transient_end
from qthermo.states.fock_state import (
    choose_n_max,
    density_matrix_at,
    energy_entropy,
    fock_moments,
    populations_at,
    von_neumann_fock,
)
from qthermo.states.gaussian_state import covariance_from_moments, moments_at, von_neumann_gaussian

from .scenario import ScenarioResult, ScenarioRunner
from .simulation_config import SimulationConfig, build_config

FIG2_TEMPERATURES = (15.0, 20.0, 25.0)
FIG1_PARAMETERS = {'eta_over_eta_c': 0.1, 'omega_c': 10.0, 'kT0': 20.0,
                   'alpha0_re': 1.0, 'alpha0_im': 0.0}


@dataclass
class CheckResult:
    """Fila de la tabla de validación"""
    name: str
    measured: float
    tolerance: str
    passed: bool
    detail: str = ''
    seconds: float = 0.0


class InvariantValidator:
    """Validador de invariantes físicos y numéricos"""

    def __init__(self, fast: bool = False, dt_scale: float = 1.0, verbose: bool = False):
        self.fast = fast
        self.dt_scale = dt_scale
        self.verbose = verbose
        self.grids = registry.get_validation_grids(fast)
        self.results: List[CheckResult] = []
        self.errors: List[str] = []
        self._fig2_cache: Optional[List[ScenarioResult]] = None

    def log(self, message: str, level: str = "INFO"):
        """Log message con nivel"""
        if level == "ERROR":
            print(f"❌ {message}")
            self.errors.append(message)
        elif level == "SUCCESS":
            print(f"✅ {message}")
        elif level == "FAIL":
            print(f"⚠️  {message}")
        elif self.verbose:
            print(f"ℹ️  {message}")

    # -----------------------------------------------------------------------
    # Utilidades
    # -----------------------------------------------------------------------

    def _config(self, grid_key: str, **overrides) -> SimulationConfig:
        grid = dict(self.grids[grid_key])
        data = dict(FIG1_PARAMETERS)
        data.update({'dt': grid['dt'] * self.dt_scale, 't_end': grid['t_end']})
        data.update(overrides)
        return build_config(data)

    def _execute(self, config: SimulationConfig) -> ScenarioResult:
        return ScenarioRunner(config).execute()

    def _fig2_runs(self) -> List[ScenarioResult]:
        """Los tres escenarios de temperatura, calculados una sola vez"""
        if self._fig2_cache is None:
            configs = [self._config('thermalization', kT0=kT) for kT in FIG2_TEMPERATURES]
            self._fig2_cache = parallel_map(configs, self._execute,
                                            label=lambda c: f"kT0={c.kT0:g}")
        return self._fig2_cache

    def record(self, name: str, measured: float, tolerance: str, passed: bool,
               detail: str = '', seconds: float = 0.0) -> bool:
        result = CheckResult(name, float(measured), tolerance, bool(passed), detail, seconds)
        self.results.append(result)
        level = "SUCCESS" if result.passed else "FAIL"
        self.log(f"{name}: {measured:.3e} ({tolerance}) {detail}".rstrip(), level)
        return result.passed

    def _run_check(self, name: str, check: Callable[[], Any]) -> None:
        """Ejecuta una comprobación; una excepción cuenta como fallo"""
        print(f"\n🔍 {name}...")
        start = time.time()
        first = len(self.results)
        try:
            check()
        except Exception as e:
            self.results.append(CheckResult(name, float('nan'), '-', False,
                                            f"{type(e).__name__}: {e}"[:120]))
            self.log(f"{name}: {type(e).__name__}: {e}", "ERROR")
        for result in self.results[first:]:
            result.seconds = time.time() - start

    # -----------------------------------------------------------------------
    # Comprobaciones
    # -----------------------------------------------------------------------

    def validate_kernel_constant(self) -> bool:
        """g̃(0) = ηT²ψ₁(1 + T/ω_c) frente a la cuadratura"""
        bath = BathSpec(0.01, 10.0, 20.0)
        expected = 0.01 * 20.0**2 * float(polygamma(1, 1.0 + 20.0 / 10.0))
        value = g_tilde_kernel(0.0, bath, QuadratureSettings.from_registry())
        error = abs(value - expected) / expected
        return self.record("g̃(0) forma cerrada", error, "<= 1e-8", error <= 1e-8)

    def validate_closed_system(self) -> bool:
        """Sistema cerrado η = 0"""
        result = self._execute(self._config('closed_system', eta_over_eta_c=0.0))
        ledger = result.ledger
        worst = max(
            float(np.max(np.abs(np.abs(result.solution.u) - 1.0))),
            float(np.max(np.abs(result.solution.v))),
            float(np.max(np.abs(ledger.heat_rate))),
            float(np.max(np.abs(ledger.work_rate))),
        )
        return self.record("Sistema cerrado (η=0)", worst, "<= 1e-8", worst <= 1e-8)

    def validate_convergence(self) -> bool:
        """Error O(Δt²) de u"""
        config = self._config('convergence')
        bath = config.bath
        coarse = config.grid
        middle = coarse.refined()
        fine = middle.refined()

        u_coarse, _ = solve_u(bath, coarse)
        u_middle, _ = solve_u(bath, middle)
        u_fine, _ = solve_u(bath, fine)

        delta_1 = float(np.max(np.abs(u_coarse - u_middle[::2])))
        delta_2 = float(np.max(np.abs(u_middle - u_fine[::2])))
        ratio = delta_1 / delta_2 if delta_2 > 0 else float('inf')
        return self.record(
            "Convergencia de segundo orden", ratio, "in [3.5, 4.5]", 3.5 <= ratio <= 4.5,
            f"Δ(h)={delta_1:.2e}, Δ(h/2)={delta_2:.2e}",
        )

    def validate_v_oracle(self) -> bool:
        """v incremental frente a la doble suma directa"""
        points = int(self.grids['oracle_points'])
        step = float(self.grids['oracle_dt'])
        grid = TimeGrid(0.0, step * (points - 1), step, points)
        bath = self._config('convergence').bath
        kernels = build_kernel_tables(bath, grid)
        u, _ = solve_u(bath, grid, kernels)

        fast_v = compute_v_diag(bath, u, grid, kernels)
        direct_v = compute_v_diag_direct(u, kernels, grid)
        error = float(np.max(np.abs(fast_v - direct_v)) / max(1e-300, np.max(np.abs(direct_v))))
        return self.record("Oráculo de v(t,t)", error, "<= 1e-10", error <= 1e-10)

    def validate_fock_gaussian(self) -> bool:
        """Entropía de Fock frente a gaussiana y oráculos cruzados de momentos y poblaciones"""
        settings = self.grids['fock_gaussian']
        config = self._config('fock_gaussian', kT0=settings['kT0'])
        sol = solve_propagator(config.bath, config.grid, config.quadrature)
        init = config.init

        indices = np.unique(np.linspace(0, config.grid.count - 1, int(settings['samples'])).astype(int))
        n_max = choose_n_max(sol, init, config.tail_tol)

        entropy_gap = moment_gap = population_gap = 0.0
        for index in indices:
            rho = density_matrix_at(sol, init, int(index), n_max)
            gaussian = moments_at(sol, init, int(index))
            entropy_gap = max(entropy_gap, abs(von_neumann_fock(rho)
                                               - von_neumann_gaussian(gaussian.symplectic_nu)))

            moments = fock_moments(rho)
            covariance = covariance_from_moments(**moments)
            moment_gap = max(moment_gap, float(np.max(np.abs(covariance - gaussian.covariance))))

            p = populations_at(sol, init, int(index), n_max)
            population_gap = max(population_gap, float(np.max(np.abs(p - rho.populations))))

        tol = registry.get_tolerance('fock_gaussian')
        ok = self.record("Entropía Fock vs gaussiana", entropy_gap, f"<= {tol:g}",
                         entropy_gap <= tol, f"{len(indices)} instantes, n_max={n_max}")
        ok &= self.record("Covarianza Fock vs gaussiana", moment_gap, "<= 1e-8", moment_gap <= 1e-8)
        ok &= self.record("populations_at vs diagonal", population_gap, "<= 1e-12",
                          population_gap <= 1e-12)
        return ok

    def validate_first_law(self) -> bool:
        """Primera ley puntual en los tres escenarios"""
        configs = [self._config('first_law', kT0=kT) for kT in FIG2_TEMPERATURES]
        results = parallel_map(configs, self._execute, label=lambda c: f"kT0={c.kT0:g}")
        worst = max(r.ledger.report['first_law']['measured'] for r in results)
        tol = registry.get_tolerance('first_law_rtol')
        return self.record("Primera ley", worst, f"<= {tol:g}·max(1,|dU/dt|)", worst <= tol)

    def validate_thermalization(self) -> bool:
        """T(t_end) → T₀ y n(t_end) → n̄(ω(t_end), T₀)"""
        worst_t = worst_n = 0.0
        for kT, result in zip(FIG2_TEMPERATURES, self._fig2_runs()):
            ledger = result.ledger
            worst_t = max(worst_t, abs(ledger.temperature[-1] - kT) / kT)
            omega_end = float(result.coefficients.omega_ren[-1])
            target = float(bose_occupation(omega_end, kT))
            worst_n = max(worst_n, abs(ledger.occupation[-1] - target) / target)

        ok = self.record("Termalización T(t_end)", worst_t, "<= 2%", worst_t <= 0.02)
        ok &= self.record("Termalización n(t_end)", worst_n, "<= 2%", worst_n <= 0.02)
        return ok

    def validate_entropy_ordering(self) -> bool:
        """𝒮 >= S y C(t_end) <= 1e−3"""
        coherence_min = min(float(r.ledger.coherence.min()) for r in self._fig2_runs())
        coherence_end = max(float(r.ledger.coherence[-1]) for r in self._fig2_runs())
        ok = self.record("𝒮(t) − S(t) >= 0", coherence_min, ">= -1e-6", coherence_min >= -1e-6)
        ok &= self.record("C(t_end)", coherence_end, "<= 1e-3", coherence_end <= 1e-3)
        return ok

    def validate_spohn(self) -> bool:
        """Φ_C >= 0, equivalente a Σ >= d𝒮/dt"""
        tol = registry.get_tolerance('spohn')
        worst = min(float(r.ledger.flux_coherence.min()) for r in self._fig2_runs())
        return self.record("Desigualdad de Spohn Φ_C >= 0", worst, f">= -{tol:g}", worst >= -tol)

    def validate_flux_crossover(self) -> bool:
        """Φ_C domina al principio y Φ_Q después"""
        result = self._execute(self._config('flux_window'))
        ledger = result.ledger
        difference = (ledger.flux_coherence - ledger.flux_heat)[1:]
        times = ledger.times[1:]

        crossing = np.nonzero(difference <= 0)[0]
        if crossing.size == 0 or crossing[0] == 0:
            return self.record("Cruce de flujos Φ_C/Φ_Q", float('nan'), "t* exists", False,
                               "sin cruce" if crossing.size == 0 else "Φ_Q domina desde t₀")
        first = int(crossing[0])
        window = difference[first:first + max(10, len(difference) // 20)]
        ok = bool(np.all(window < 0))
        return self.record("Cruce de flujos Φ_C/Φ_Q", float(times[first]), "t* exists", ok,
                           f"t* = {times[first]:.3f}")

    def validate_monotonicity(self) -> bool:
        """𝒮 no decreciente y F no creciente"""
        tol = registry.get_tolerance('monotonic_step')
        worst_s = worst_f = 0.0
        for result in self._fig2_runs():
            ledger = result.ledger
            worst_s = min(worst_s, float(np.diff(ledger.energy_entropy).min()))
            stable = ledger.temperature_flag == STABLE
            both = stable[1:] & stable[:-1]
            steps = np.diff(ledger.free_energy)[both]
            if steps.size:
                worst_f = max(worst_f, float(steps.max()))

        ok = self.record("𝒮(t) no decreciente", worst_s, f">= -{tol:g}", worst_s >= -tol)
        ok &= self.record("F(t) no creciente", worst_f, f"<= {tol:g}", worst_f <= tol)
        return ok

    def validate_work_rate(self) -> bool:
        """
        dW/dt <= 0 en el transitorio e insensible a T₀.

        El transitorio va de t₀ al mínimo de ω(t); después ω remonta
        ligeramente y dW/dt cambia de signo.
        """
        runs = self._fig2_runs()
        rows = min(r.ledger.count for r in runs)
        curves = np.array([r.ledger.work_rate[:rows] for r in runs])
        peak = float(np.max(np.abs(curves)))
        end = transient_end(runs[0].coefficients.omega_ren[:rows])

        positive = float(np.max(curves[:, 1:end + 1])) / peak if peak > 0 else 0.0
        spread = float(np.max(np.ptp(curves, axis=0))) / peak if peak > 0 else 0.0
        times = runs[0].ledger.times
        ok = self.record("dW/dt <= 0 en el transitorio", positive, "<= 1e-3·pico", positive <= 1e-3,
                         f"transitorio hasta t = {times[end]:.3f}")
        ok &= self.record("dW/dt insensible a T₀", spread, "< 5% del pico", spread < 0.05)
        return ok

    def validate_clausius(self) -> bool:
        """Relación de Clausius y balance de entropía (identidad contable)"""
        runs = self._fig2_runs()
        clausius = max(r.ledger.report['clausius']['measured'] for r in runs)
        balance = max(r.ledger.report['balance']['measured'] for r in runs)
        integrated = max(abs(r.integrated_balance['residual']) for r in runs)

        ok = self.record("Consistencia Clausius dQ = T d𝒮", clausius, "<= 1e-8", clausius <= 1e-8,
                         "identidad por construcción de T")
        ok &= self.record("Consistencia Σ = Φ_Q + Φ_C", balance, "<= 1e-10", balance <= 1e-10,
                          "identidad por construcción de Φ_Q y Φ_C")
        ok &= self.record("Consistencia ΔS = Δ𝒮 + ΔC", integrated, "<= 1e-6", integrated <= 1e-6,
                          "identidad de extremos de C = 𝒮 − S")
        return ok

    def validate_initial_coherence(self) -> bool:
        """C(t₀) coincide con la entropía de Poisson(|α₀|²)"""
        result = self._fig2_runs()[1]
        n = np.arange(60)
        poisson = np.exp(-1.0 - np.cumsum(np.log(np.maximum(n, 1))))
        expected = energy_entropy(poisson)
        error = abs(float(result.ledger.coherence[0]) - expected)
        return self.record("C(t₀) = entropía de Poisson(1)", error, "<= 1e-10", error <= 1e-10)

    # -----------------------------------------------------------------------
    # Ejecución y resumen
    # -----------------------------------------------------------------------

    def print_summary(self) -> bool:
        """Imprime la tabla pass/fail; True si todo pasa"""
        print("\n" + "=" * 96)
        print("📊 RESUMEN DE VALIDACIÓN")
        print("=" * 96)
        print(f"{'Comprobación':<40} {'Medido':>12}  {'Tolerancia':<28} {'':<6} {'Tiempo':>7}")
        print("-" * 96)
        for result in self.results:
            status = "PASS" if result.passed else "FAIL"
            measured = "nan" if math.isnan(result.measured) else f"{result.measured:.3e}"
            print(f"{result.name[:40]:<40} {measured:>12}  {result.tolerance[:28]:<28} {status:<6} {result.seconds:>6.1f}s")
            if result.detail and (not result.passed or self.verbose):
                print(f"   └─ {result.detail}")

        failed = [r for r in self.results if not r.passed]
        print("\n" + "=" * 96)
        if failed:
            print(f"\n❌ VALIDACIÓN FALLIDA ({len(failed)} de {len(self.results)})")
            return False
        print(f"\n✅ VALIDACIÓN EXITOSA - {len(self.results)} comprobaciones OK")
        return True

    def run_all_validations(self) -> bool:
        """Ejecuta todas las comprobaciones"""
        mode = "rápida" if self.fast else "completa"
        print(f"🚀 Iniciando validación {mode} de noneq-qthermo...")

        previous = is_verbose()
        set_verbose(self.verbose)
        try:
            # 1. Núcleos y solver
            self._run_check("g̃(0) frente a su forma cerrada", self.validate_kernel_constant)
            self._run_check("Límite de sistema cerrado", self.validate_closed_system)
            self._run_check("Convergencia del solver", self.validate_convergence)
            self._run_check("Oráculo de v(t,t)", self.validate_v_oracle)

            # 2. Estados
            self._run_check("Rutas de entropía Fock/gaussiana", self.validate_fock_gaussian)

            # 3. Ledger
            self._run_check("Primera ley", self.validate_first_law)
            self._run_check("Termalización", self.validate_thermalization)
            self._run_check("Orden de entropías", self.validate_entropy_ordering)
            self._run_check("Desigualdad de Spohn", self.validate_spohn)
            self._run_check("Cruce de flujos", self.validate_flux_crossover)
            self._run_check("Monotonía", self.validate_monotonicity)
            self._run_check("Tasa de trabajo", self.validate_work_rate)
            self._run_check("Consistencia de Clausius y balances", self.validate_clausius)
            self._run_check("Coherencia inicial", self.validate_initial_coherence)
        finally:
            set_verbose(previous)

        # 4. Resumen
        return self.print_summary()

    def report(self) -> List[Dict[str, Any]]:
        """Resultados como registros serializables"""
        return [vars(r) for r in self.results]
