"""Entanglement spreading in single-excitation XXZ spin chains.

Simulation and analysis toolkit: exact Bessel-function dynamics for ordered
chains, Chebyshev propagation for disordered ones, concurrence spreading
moments, bound and asymptote verification, and power-law exponent extraction.
"""

__version__ = "0.1.0"

from .analysis import (
    BoundsReport,
    MomentSeries,
    PowerLawFit,
    fit_emission,
    fit_power_law,
    local_exponent,
    time_average,
    verify_bounds,
)
from .analytic import (
    EmissionModel,
    asymptotes_ordered,
    emission_amplitude,
    infinite_amplitude,
    infinite_state,
    m_d_bound,
    m_o_asymptote,
    semi_infinite_amplitude,
    w_bounds_ordered,
    wavefront_approximation,
)
from .bessel import BesselRow, bessel_j, bessel_j_series_oracle, bessel_row, bessel_rows
from .chain import (
    ChainSpec,
    DisorderSpec,
    Hamiltonian,
    build_hamiltonian,
    derive_seed,
    sample_disorder,
    spectral_bounds,
)
from .observables import (
    MomentSample,
    concurrence_pair,
    moment_m,
    moment_w,
    reduced_density_pair,
    wootters_concurrence,
)
from .propagator import (
    ReflectionBudgetWarning,
    WaveState,
    basis_state,
    evolve_chebyshev,
    evolve_diagonalization,
    evolve_series,
)

__all__ = [
    "__version__",
    "BesselRow",
    "bessel_j",
    "bessel_j_series_oracle",
    "bessel_row",
    "bessel_rows",
    "ChainSpec",
    "DisorderSpec",
    "Hamiltonian",
    "build_hamiltonian",
    "derive_seed",
    "sample_disorder",
    "spectral_bounds",
    "WaveState",
    "basis_state",
    "evolve_chebyshev",
    "evolve_diagonalization",
    "evolve_series",
    "ReflectionBudgetWarning",
    "EmissionModel",
    "infinite_amplitude",
    "infinite_state",
    "semi_infinite_amplitude",
    "emission_amplitude",
    "w_bounds_ordered",
    "asymptotes_ordered",
    "m_o_asymptote",
    "m_d_bound",
    "wavefront_approximation",
    "MomentSample",
    "reduced_density_pair",
    "wootters_concurrence",
    "concurrence_pair",
    "moment_w",
    "moment_m",
    "MomentSeries",
    "PowerLawFit",
    "BoundsReport",
    "time_average",
    "fit_power_law",
    "local_exponent",
    "verify_bounds",
    "fit_emission",
]
