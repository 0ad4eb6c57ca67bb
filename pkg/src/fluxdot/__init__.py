"""Flux-controlled double-dot interferometer simulator."""

__version__ = "0.1.0"

from .core import (
    BathParams,
    DegenerateScale,
    DeviceParams,
    InvalidOccupation,
    NotDegenerate,
    PhaseUndefined,
    QuadratureNotConverged,
    UnitarityViolation,
    ValidationReport,
    fermi,
    phase_from_flux,
    require_valid,
    validate,
)
from .propagator import (
    STEADY,
    DecayMatrix,
    OccupationMatrix,
    QuadratureSpec,
    decay_matrix,
    lead_matrices,
    occupation_v,
    retarded_u,
    steady_v,
    windowed_u,
)
from .state import (
    BlochState,
    ReducedDensityMatrix,
    assemble_rho,
    bloch_vector,
    coherence_phase,
    fidelity_to_target,
)
from .analytics import (
    SpectralScales,
    large_bias_rho21,
    spectral_scales,
    steady_current,
    steady_rho21_closed,
    transmission,
)
from .oracle import (
    CorrelationMatrix,
    DiscretizedLeadModel,
    build_model,
    comparison_window,
    dot_occupation,
    evolve,
    reduced_rho,
)
