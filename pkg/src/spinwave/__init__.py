"""Traveling-wave response of a locally driven periodic anisotropic XY ring."""

from .engine import (
    AppliedPulse,
    PulseTrain,
    ScanGrid,
    SpinTrace,
    dirichlet_factor,
    profile_at_time,
    pulse_train_response,
    pulse_train_terms,
    run_transport_protocol,
    scan,
    solve_transport_field,
    timeseries_at_site,
    total_response,
)
from .errors import (
    ConfigError,
    OutputError,
    ParameterError,
    SpinwaveError,
    TransportNodeError,
)
from .kernel import (
    ModePairEntry,
    PulseSpec,
    ResponseKernel,
    build_kernel,
    derive_v2_elements,
    first_order_response,
    response_amplitudes,
    second_order_strengths,
    zeroth_order,
)
from .spectrum import (
    ChainParams,
    ModeLevel,
    Spectrum,
    bandwidth_sum,
    build_spectrum,
    exact_ground_energy,
    quasiparticle_energy,
    sector_ground_energies,
)
from .velocity import (
    PAULI_ENERGY_SCALE,
    DispersionTable,
    GroupVelocityCurve,
    LRBoundResult,
    build_dispersion,
    compare_velocities,
    group_velocities,
    hamiltonian_norm,
    lr_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AppliedPulse",
    "ChainParams",
    "ConfigError",
    "DispersionTable",
    "GroupVelocityCurve",
    "LRBoundResult",
    "ModeLevel",
    "ModePairEntry",
    "OutputError",
    "PAULI_ENERGY_SCALE",
    "ParameterError",
    "PulseSpec",
    "PulseTrain",
    "ResponseKernel",
    "ScanGrid",
    "SpinTrace",
    "SpinwaveError",
    "Spectrum",
    "TransportNodeError",
    "bandwidth_sum",
    "build_dispersion",
    "build_kernel",
    "build_spectrum",
    "compare_velocities",
    "derive_v2_elements",
    "dirichlet_factor",
    "exact_ground_energy",
    "first_order_response",
    "group_velocities",
    "hamiltonian_norm",
    "lr_bound",
    "profile_at_time",
    "pulse_train_response",
    "pulse_train_terms",
    "quasiparticle_energy",
    "response_amplitudes",
    "run_transport_protocol",
    "scan",
    "second_order_strengths",
    "sector_ground_energies",
    "solve_transport_field",
    "timeseries_at_site",
    "total_response",
    "zeroth_order",
]
