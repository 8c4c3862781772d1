"""Simulator of the optimal universal 1-to-2 qubit cloning machine.

Two independent tiers realize the same machine: an abstract qubit gate
network and a single-photon linear-optics train (polarization plus beam
paths), cross-checked against a closed-form oracle. A tomography stack
reconstructs the replicas from simulated photon counts, and an error model
compares waveplate-jitter perturbation sweeps against the analytic bound.
"""

from .angles import PrepAngles, SolverError, prep_circuit, solve_prep_angles
from .gates import CNOT, CSWAP, SWAP, Circuit, Rotation, apply_circuit, circuit_unitary, gate_unitary
from .hilbert import (
    AUX,
    DensityMatrix,
    LabelError,
    PureState,
    fidelity,
    partial_trace,
    random_pure_state,
    stokes_compose,
    stokes_decompose,
    tensor_product,
)
from .network import (
    CLONER_PREP_TARGET,
    TRIPLICATOR_FIDELITY,
    TRIPLICATOR_PREP_TARGET,
    CloneResult,
    build_cloning_circuit,
    build_cloning_network,
    build_measurement_circuit,
    build_preparation_circuit,
    clone,
    cloner_prep_angles,
    input_state,
    optimal_fidelity,
    reference_clone_output,
    triplicate,
    triplicator_prep_angles,
)
from .optics import (
    AJWP,
    BS,
    HWP,
    PBS,
    QWP,
    EquivalenceReport,
    LossyTrainError,
    ModeSpace,
    OpticalTrain,
    PhaseShift,
    PhotonState,
    Polarizer,
    apply_train,
    build_cloner_train,
    crot_path_controls_polarization,
    crot_polarization_controls_path,
    element_matrix,
    modes_to_qubits,
    optical_measurement_state,
    qubits_to_modes,
    source_photon,
    verify_equivalence,
)
from .tomography import (
    BASES,
    CountsRecord,
    DetectorModel,
    FidelityReport,
    ReconstructionError,
    attach_aux_cswap,
    exact_report,
    fidelity_report,
    measurement_state,
    montecarlo_report,
    path_distribution,
    reconstruct_replica,
    reconstruct_single_qubit,
    replicas_from_state,
    signal_probabilities,
    simulate_counts,
)
from .errormodel import (
    ErrorBudget,
    PerturbationResult,
    fidelity_error_bound,
    perturbation_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
