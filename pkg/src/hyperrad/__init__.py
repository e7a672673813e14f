"""Steady states, squeezing and radiance of two coherently driven qubits in a cavity."""

__version__ = "0.1.0"

from .operators import (
    DensityMatrix,
    DimensionError,
    Operator,
    SpaceDescriptor,
    SpaceMismatchError,
    StateValidationError,
    cavity_annihilator,
    embed,
    expect,
    fock_annihilation,
    partial_trace,
    qubit_lowering,
    tensor,
    trace_distance,
)
from .models import (
    DISSIPATOR_CONVENTION,
    LindbladModel,
    ModelParams,
    TruncationError,
    build_single_qubit_model,
    build_two_qubit_model,
    coherent_state,
    default_n_max,
)
from .steady import (
    ConvergenceError,
    DegenerateSteadyStateError,
    Liouvillian,
    SteadyStateReport,
    StiffnessError,
    build_liouvillian,
    devectorize,
    solve_model,
    steady_state,
    time_evolve,
    vectorize,
)
from .observables import (
    KlyshkoResult,
    PhotonDistribution,
    RadianceResult,
    SqueezingResult,
    UndefinedWitnessError,
    WignerGrid,
    cavity_moments,
    klyshko,
    min_squeezing,
    photon_distribution,
    principal_axes,
    radiance_components,
    radiance_witness,
    squeezing_parameter,
    wigner,
    wigner_point_reference,
)
from .dressed import (
    ManifoldSpectrum,
    PathwayElement,
    collective_state,
    interaction_hamiltonian,
    interference_amplitude,
    manifold_spectrum,
    pathway_amplitudes,
)
from .sweep import (
    ObservablesRecord,
    SweepConfig,
    SweepConfigError,
    export_klyshko,
    export_wigner,
    run_point,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
