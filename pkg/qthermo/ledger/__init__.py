"""Ledger termodinámico"""

from .thermo_ledger import (
    EQUILIBRIUM_LIMIT,
    REGULARIZED,
    STABLE,
    LedgerSeries,
    TemperaturePolicy,
    ThermoRecord,
    build_ledger,
    clausius_flux,
    dynamical_temperature,
    dynamical_temperature_series,
    energy_rates,
    entropy_rates,
    free_energy,
    heat_rate,
    integrate_balance,
    integrate_energy,
    internal_energy,
    occupation_series,
    transient_end,
    work_rate,
)

__all__ = [
    'EQUILIBRIUM_LIMIT',
    'REGULARIZED',
    'STABLE',
    'LedgerSeries',
    'TemperaturePolicy',
    'ThermoRecord',
    'build_ledger',
    'clausius_flux',
    'dynamical_temperature',
    'dynamical_temperature_series',
    'energy_rates',
    'entropy_rates',
    'free_energy',
    'heat_rate',
    'integrate_balance',
    'integrate_energy',
    'internal_energy',
    'occupation_series',
    'transient_end',
    'work_rate',
]
