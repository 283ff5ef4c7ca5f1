"""
Libro de cuentas termodinámico: energía, trabajo, calor, entropías,
flujos, temperatura dinámica y energía libre sobre la malla completa.

    U = ω n                        dW/dt = (dω/dt) n
    dQ/dt = ω (γ̃ − 2γ n)           Φ_Q = d𝒮/dt,  Φ_C = −dC/dt,  Σ = dS/dt
    T = (dQ/dt) / (d𝒮/dt)          F = U − T 𝒮

Todas las derivadas temporales usan la misma plantilla de segundo orden
(qthermo.core.stencils.time_derivative), de modo que los residuos de la
primera ley y del balance de entropía comparan tasas calculadas igual.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from config.config_manager import registry
from qthermo.core.errors import InconsistencyError
from qthermo.core.log import log
from qthermo.core.stencils import time_derivative
from qthermo.dynamics.coefficients import MasterCoefficients
from qthermo.dynamics.propagator import PropagatorSolution
from qthermo.states.fock_state import (
    CoherentInit,
    coherence_rel_entropy,
    energy_entropy_series,
)
from qthermo.states.gaussian_state import vn_entropy_series

STABLE = 'stable'
REGULARIZED = 'regularized'
EQUILIBRIUM_LIMIT = 'equilibrium-limit'


@dataclass(frozen=True)
class TemperaturePolicy:
    """
    Regularización de T = Q̇/𝒮̇ cuando 𝒮̇ cae bajo el suelo.

    Attributes:
        s_floor: |d𝒮/dt| mínimo para usar el cociente
        q_floor: |dQ/dt| bajo el cual el calor se considera nulo
        max_gap: Huecos de hasta max_gap muestras se puentean interpolando
    """
    s_floor: float = 1e-8
    q_floor: float = 1e-8
    max_gap: int = 50

    @classmethod
    def from_registry(cls, **overrides) -> 'TemperaturePolicy':
        defaults = registry.get_run_defaults()
        values = {
            's_floor': defaults['s_floor'],
            'q_floor': defaults['q_floor'],
            'max_gap': registry.get_tolerance('temperature_interp_max_gap'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class ThermoRecord:
    """Fila del ledger en un instante (unidades ħ = k = ω₀ = 1)"""
    time: float
    internal_energy: float
    occupation: float
    internal_energy_rate: float
    work_rate: float
    heat_rate: float
    energy_entropy: float
    vn_entropy: float
    coherence: float
    entropy_rate: float
    flux_heat: float
    flux_coherence: float
    temperature: float
    free_energy: float
    first_law_residual: float
    balance_residual: float
    temperature_flag: str


@dataclass
class LedgerSeries:
    """Todas las magnitudes del ledger como series sobre la malla"""
    times: np.ndarray
    occupation: np.ndarray
    internal_energy: np.ndarray
    internal_energy_rate: np.ndarray
    work_rate: np.ndarray
    heat_rate: np.ndarray
    energy_entropy: np.ndarray
    energy_entropy_rate: np.ndarray
    vn_entropy: np.ndarray
    coherence: np.ndarray
    entropy_rate: np.ndarray
    flux_heat: np.ndarray
    flux_coherence: np.ndarray
    temperature: np.ndarray
    temperature_flag: np.ndarray
    free_energy: np.ndarray
    first_law_residual: np.ndarray
    balance_residual: np.ndarray
    tail_mass: np.ndarray
    symplectic_nu: np.ndarray
    n_max: int
    warnings: List[Dict[str, Any]] = field(default_factory=list)
    report: Dict[str, Any] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return self.times.shape[0]

    def record(self, index: int) -> ThermoRecord:
        return ThermoRecord(
            time=float(self.times[index]),
            internal_energy=float(self.internal_energy[index]),
            occupation=float(self.occupation[index]),
            internal_energy_rate=float(self.internal_energy_rate[index]),
            work_rate=float(self.work_rate[index]),
            heat_rate=float(self.heat_rate[index]),
            energy_entropy=float(self.energy_entropy[index]),
            vn_entropy=float(self.vn_entropy[index]),
            coherence=float(self.coherence[index]),
            entropy_rate=float(self.entropy_rate[index]),
            flux_heat=float(self.flux_heat[index]),
            flux_coherence=float(self.flux_coherence[index]),
            temperature=float(self.temperature[index]),
            free_energy=float(self.free_energy[index]),
            first_law_residual=float(self.first_law_residual[index]),
            balance_residual=float(self.balance_residual[index]),
            temperature_flag=str(self.temperature_flag[index]),
        )

    def records(self, stride: int = 1) -> List[ThermoRecord]:
        return [self.record(i) for i in range(0, self.count, stride)]


# ---------------------------------------------------------------------------
# Energía (por índice y en serie)
# ---------------------------------------------------------------------------

def occupation_series(sol: PropagatorSolution, init: CoherentInit,
                      stop: Optional[int] = None) -> np.ndarray:
    """n(t) = |u|²|α₀|² + v(t,t)"""
    stop = sol.u.shape[0] if stop is None else stop
    return np.abs(sol.u[:stop]) ** 2 * init.intensity + sol.v[:stop]


def internal_energy(coeffs: MasterCoefficients, sol: PropagatorSolution,
                    init: CoherentInit, t_index: int) -> float:
    """U(t) = ω(t) n(t) en unidades ħω₀"""
    n = abs(sol.u[t_index]) ** 2 * init.intensity + sol.v[t_index]
    return float(coeffs.omega_ren[t_index] * n)


def work_rate(coeffs: MasterCoefficients, sol: PropagatorSolution,
              init: CoherentInit, t_index: int) -> float:
    """dW/dt = (dω/dt) n(t), con dω/dt por la plantilla compartida"""
    omega_dot = time_derivative(coeffs.omega_ren, coeffs.grid.step)
    n = abs(sol.u[t_index]) ** 2 * init.intensity + sol.v[t_index]
    return float(omega_dot[t_index] * n)


def heat_rate(coeffs: MasterCoefficients, sol: PropagatorSolution,
              init: CoherentInit, t_index: int) -> float:
    """dQ/dt = ω(t)[γ̃(t) − 2γ(t) n(t)]"""
    n = abs(sol.u[t_index]) ** 2 * init.intensity + sol.v[t_index]
    return float(coeffs.omega_ren[t_index]
                 * (coeffs.gamma_tilde[t_index] - 2.0 * coeffs.gamma[t_index] * n))


def energy_rates(coeffs: MasterCoefficients, occupation: np.ndarray
                 ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    (U, dU/dt, dW/dt, dQ/dt) sobre toda la serie.

    dU/dt se obtiene derivando U numéricamente; dW/dt y dQ/dt salen de las
    fórmulas de los coeficientes. Son rutas independientes.
    """
    step = coeffs.grid.step
    omega = coeffs.omega_ren
    energy = omega * occupation
    energy_dot = time_derivative(energy, step)
    work = time_derivative(omega, step) * occupation
    heat = omega * (coeffs.gamma_tilde - 2.0 * coeffs.gamma * occupation)
    return energy, energy_dot, work, heat


# ---------------------------------------------------------------------------
# Entropías
# ---------------------------------------------------------------------------

def entropy_rates(S_energy: np.ndarray, S_vn: np.ndarray, coherence: np.ndarray,
                  step: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Tasas de entropía con la plantilla compartida.

    Returns:
        (Σ = dS/dt, Φ_C = −dC/dt, d𝒮/dt)
    """
    sigma = time_derivative(S_vn, step)
    flux_coherence = -time_derivative(coherence, step)
    energy_entropy_rate = time_derivative(S_energy, step)
    return sigma, flux_coherence, energy_entropy_rate


def dynamical_temperature(heat: float, entropy_rate: float,
                          policy: Optional[TemperaturePolicy] = None,
                          last_stable: Optional[float] = None) -> Tuple[float, str]:
    """
    Temperatura dinámica en un instante aislado.

    Args:
        heat: dQ/dt
        entropy_rate: d𝒮/dt
        policy: Suelos de regularización
        last_stable: Último valor estable conocido (o None)

    Returns:
        (T, flag); sin valor estable previo T es NaN
    """
    policy = policy or TemperaturePolicy.from_registry()

    if abs(entropy_rate) >= policy.s_floor:
        return heat / entropy_rate, STABLE

    fallback = float('nan') if last_stable is None else last_stable
    if abs(heat) < policy.q_floor:
        return fallback, EQUILIBRIUM_LIMIT

    log(f"d𝒮/dt = {entropy_rate:.2e} bajo el suelo con dQ/dt = {heat:.2e}: "
        f"T divergería", "WARNING")
    return fallback, REGULARIZED


def dynamical_temperature_series(heat: np.ndarray, entropy_rate: np.ndarray,
                                 times: np.ndarray,
                                 policy: Optional[TemperaturePolicy] = None,
                                 origin_is_limit: bool = False
                                 ) -> Tuple[np.ndarray, np.ndarray, List[Dict[str, Any]]]:
    """
    T(t) con la política de regularización aplicada a toda la serie.

    - |d𝒮/dt| >= s_floor: cociente, flag stable.
    - Ambas tasas bajo sus suelos: último valor estable, flag
      equilibrium-limit (antes del primer estable se usa ese primero).
    - Cruce aislado de d𝒮/dt por cero con calor no nulo: interpolación
      lineal entre los vecinos estables, flag regularized y un registro
      de aviso.
    - Sin ningún instante estable (η = 0): T = NaN.

    Con origin_is_limit la primera muestra nunca es estable: en t₀ ambas
    tasas son nulas y el cociente es un límite 0/0 que el ruido de la
    plantilla falsea. Toma el primer valor estable con flag regularized
    y sin aviso.

    Returns:
        (T, flags, warnings)
    """
    policy = policy or TemperaturePolicy.from_registry()
    count = heat.shape[0]

    stable = np.abs(entropy_rate) >= policy.s_floor
    if origin_is_limit:
        stable[0] = False
    quiet_heat = np.abs(heat) < policy.q_floor
    flags = np.full(count, STABLE, dtype=object)
    temperature = np.full(count, np.nan)
    warnings: List[Dict[str, Any]] = []

    if not np.any(stable):
        flags[:] = EQUILIBRIUM_LIMIT
        return temperature, flags, warnings

    stable_idx = np.nonzero(stable)[0]
    temperature[stable] = heat[stable] / entropy_rate[stable]

    index = np.arange(count)
    prev_stable = np.maximum.accumulate(np.where(stable, index, -1))
    next_stable = np.minimum.accumulate(np.where(stable, index, count)[::-1])[::-1]
    first_value = temperature[stable_idx[0]]

    for i in np.nonzero(~stable)[0]:
        before, after = prev_stable[i], next_stable[i]
        last = temperature[before] if before >= 0 else first_value

        if origin_is_limit and i == 0:
            temperature[i] = first_value
            flags[i] = REGULARIZED
            continue

        if quiet_heat[i]:
            temperature[i] = last
            flags[i] = EQUILIBRIUM_LIMIT if before >= 0 else REGULARIZED
            continue

        flags[i] = REGULARIZED
        if before >= 0 and after < count and after - before - 1 <= policy.max_gap:
            temperature[i] = np.interp(times[i], [times[before], times[after]],
                                       [temperature[before], temperature[after]])
        else:
            temperature[i] = last
        warnings.append({
            'type': 'temperature',
            'message': (f"d𝒮/dt bajo el suelo con dQ/dt = {heat[i]:.2e} en "
                        f"t = {times[i]:.4f}: T regularizada"),
            'index': int(i),
        })

    if warnings:
        log(f"{len(warnings)} instantes con T regularizada (d𝒮/dt ≈ 0 y dQ/dt ≠ 0)",
            "WARNING")
    return temperature, flags, warnings


def free_energy(U, T, S_thermo):
    """F = U − T 𝒮"""
    return U - T * S_thermo


def transient_end(omega) -> int:
    """Índice del mínimo de ω(t): hasta ahí dω/dt <= 0 y el baño hace trabajo sobre el oscilador"""
    return int(np.argmin(np.asarray(omega)))


def clausius_flux(heat, temperature) -> np.ndarray:
    """Φ_Q = Q̇/T donde T es finita y no nula; NaN en el resto"""
    heat = np.asarray(heat, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    usable = np.isfinite(temperature) & (temperature != 0.0)
    flux = np.full(np.broadcast(heat, temperature).shape, np.nan)
    np.divide(heat, temperature, out=flux, where=usable)
    return flux


# ---------------------------------------------------------------------------
# Balances integrados
# ---------------------------------------------------------------------------

def integrate_balance(series: LedgerSeries, start: int = 0,
                      stop: Optional[int] = None) -> Dict[str, float]:
    """
    ΔS(τ) = Δ𝒮(τ) + ΔC(τ) entre los índices start y stop (incluido),
    con ΔC = C(t₀) − C(τ).

    Raises:
        InconsistencyError: si |ΔS − Δ𝒮 − ΔC| supera la tolerancia
    """
    stop = series.count - 1 if stop is None else stop
    delta_vn = float(series.vn_entropy[stop] - series.vn_entropy[start])
    delta_energy = float(series.energy_entropy[stop] - series.energy_entropy[start])
    delta_coherence = float(series.coherence[start] - series.coherence[stop])
    residual = delta_vn - delta_energy - delta_coherence

    tol = registry.get_tolerance('integrated_balance')
    if abs(residual) > tol:
        raise InconsistencyError(
            f"Balance integrado incumplido: residuo {residual:.3e} > {tol:g}",
            {'delta_S': delta_vn, 'delta_S_energy': delta_energy,
             'delta_C': delta_coherence, 'residual': residual},
        )
    return {
        'delta_S': delta_vn,
        'delta_S_energy': delta_energy,
        'delta_C': delta_coherence,
        'residual': residual,
    }


def integrate_energy(series: LedgerSeries, start: int = 0,
                     stop: Optional[int] = None) -> Dict[str, float]:
    """
    Primera ley integrada ΔU = ΔW + ΔQ; ΔW y ΔQ por trapecios acumulados
    de las tasas. El residuo es O(Δt²).
    """
    stop = series.count - 1 if stop is None else stop
    window = slice(start, stop + 1)
    step = float(series.times[1] - series.times[0])

    delta_u = float(series.internal_energy[stop] - series.internal_energy[start])
    if stop == start:
        delta_w = delta_q = 0.0
    else:
        delta_w = float(cumulative_trapezoid(series.work_rate[window], dx=step)[-1])
        delta_q = float(cumulative_trapezoid(series.heat_rate[window], dx=step)[-1])

    return {
        'delta_U': delta_u,
        'delta_W': delta_w,
        'delta_Q': delta_q,
        'residual': delta_u - delta_w - delta_q,
    }


# ---------------------------------------------------------------------------
# Ensamblado
# ---------------------------------------------------------------------------

def _tolerance_report(series: LedgerSeries) -> Dict[str, Any]:
    tolerances = registry.get_tolerances()
    stable = series.temperature_flag == STABLE

    first_law_ratio = np.abs(series.first_law_residual) / np.maximum(
        1.0, np.abs(series.internal_energy_rate))
    worst_first_law = float(first_law_ratio.max()) if first_law_ratio.size else 0.0
    worst_balance = float(np.abs(series.balance_residual).max())

    clausius = 0.0
    if np.any(stable):
        heat = series.heat_rate[stable]
        mismatch = np.abs(heat - series.temperature[stable] * series.energy_entropy_rate[stable])
        clausius = float((mismatch / np.maximum(1.0, np.abs(heat))).max())

    report = {
        'first_law': {'measured': worst_first_law, 'tolerance': tolerances['first_law_rtol'],
                      'passed': worst_first_law <= tolerances['first_law_rtol']},
        'balance': {'measured': worst_balance, 'tolerance': tolerances['balance'],
                    'passed': worst_balance <= tolerances['balance']},
        'clausius': {'measured': clausius, 'tolerance': tolerances['clausius_rtol'],
                     'passed': clausius <= tolerances['clausius_rtol']},
        'coherence_min': {'measured': float(series.coherence.min()),
                          'tolerance': tolerances['coherence_floor'],
                          'passed': bool(series.coherence.min() >= tolerances['coherence_floor'])},
        'spohn': {'measured': float(series.flux_coherence.min()),
                  'tolerance': -tolerances['spohn'],
                  'passed': bool(series.flux_coherence.min() >= -tolerances['spohn'])},
        'tail_mass_max': float(series.tail_mass.max()),
        'n_max': series.n_max,
    }
    return report


def build_ledger(sol: PropagatorSolution, coeffs: MasterCoefficients,
                 init: CoherentInit, n_max: int,
                 policy: Optional[TemperaturePolicy] = None) -> LedgerSeries:
    """
    Calcula todas las magnitudes del ledger sobre la malla completa.

    Si los coeficientes están truncados por el suelo de |u|, el ledger se
    limita al mismo tramo.

    Args:
        sol: Solución del propagador
        coeffs: Coeficientes de la ecuación maestra
        init: Estado coherente inicial
        n_max: Truncación de Fock para 𝒮(t)
        policy: Regularización de la temperatura

    Returns:
        LedgerSeries con informe de tolerancias en .report
    """
    stop = coeffs.count
    step = coeffs.grid.step
    times = coeffs.grid.times[:stop]

    occupation = occupation_series(sol, init, stop)
    energy, energy_dot, work, heat = energy_rates(coeffs, occupation)

    S_energy, tail = energy_entropy_series(sol, init, n_max, stop)
    nu, S_vn = vn_entropy_series(sol, init, stop)
    coherence = coherence_rel_entropy(S_energy, S_vn)

    sigma, flux_coherence, energy_entropy_rate = entropy_rates(S_energy, S_vn, coherence, step)
    flux_heat = energy_entropy_rate
    temperature, flags, warnings = dynamical_temperature_series(
        heat, energy_entropy_rate, times, policy, origin_is_limit=True)

    series = LedgerSeries(
        times=times,
        occupation=occupation,
        internal_energy=energy,
        internal_energy_rate=energy_dot,
        work_rate=work,
        heat_rate=heat,
        energy_entropy=S_energy,
        energy_entropy_rate=energy_entropy_rate,
        vn_entropy=S_vn,
        coherence=coherence,
        entropy_rate=sigma,
        flux_heat=flux_heat,
        flux_coherence=flux_coherence,
        temperature=temperature,
        temperature_flag=flags,
        free_energy=free_energy(energy, temperature, S_energy),
        first_law_residual=energy_dot - work - heat,
        balance_residual=sigma - flux_heat - flux_coherence,
        tail_mass=tail,
        symplectic_nu=nu,
        n_max=n_max,
        warnings=warnings,
    )
    series.report = _tolerance_report(series)

    for name in ('first_law', 'balance', 'clausius', 'spohn'):
        entry = series.report[name]
        if not entry['passed']:
            log(f"{name}: {entry['measured']:.3e} fuera de tolerancia ({entry['tolerance']:g})",
                "WARNING")
    return series
