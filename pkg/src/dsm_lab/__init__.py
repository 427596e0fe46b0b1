"""Simulation lab for direct density-matrix measurement on qubit registers.

The package simulates probe-coupled measurement protocols (projective,
finite-angle rotation, and the small-angle limit without the diagonal
repair term), samples detector statistics under an optional readout
noise model, reconstructs the state row by row, and scores the result
against the ideal target. Experiment drivers batch trials into CSV
files that downstream tooling can consume without importing this
package.
"""

from .confidence import (
    ConfidenceRegion,
    ConfidenceSpec,
    InfeasibleRegionError,
    coverage_ratio,
    lambda_squared,
    region,
    solve_threshold,
)
from .harness import (
    ExperimentConfig,
    StateSpec,
    TrialRecord,
    build_target_state,
    derive_trial_seed,
    expand_cells,
    parse_protocol,
    protocol_to_text,
    run_experiment,
    run_trial,
)
from .noise import (
    NoiseModel,
    apply_detector_noise,
    apply_postselection_noise,
    crosstalk_weight,
    kernel_matrix,
)
from .protocol import (
    BASIS_LABELS,
    OutcomeDistribution,
    ProbeBlock,
    Protocol,
    ProtocolKind,
    branch_operators,
    epsilon_theta,
    outcome_distribution,
    probe_block_closed_form,
    probe_block_oracle,
    probe_blocks_for_row,
    vnm_unitary,
)
from .qcore import (
    conjugate_basis_matrix,
    conjugate_basis_vector,
    dicke_state,
    fidelity_general,
    fidelity_pure,
    ghz_state,
    hermitize,
    is_density_matrix,
    mix_white_noise,
)
from .recon import (
    DegenerateEstimateError,
    RawEstimate,
    SummaryStats,
    physicality_projection,
    reconstruct_type1,
    reconstruct_type2,
    reconstruct_weak,
    summarize,
)
from .sampler import (
    CountsTable,
    SeedSpec,
    estimate_probabilities,
    estimate_probe_block,
    estimate_probe_blocks_all,
    fold_stream,
    sample_counts,
)

__version__ = "0.1.0"

__all__ = [
    "BASIS_LABELS",
    "ConfidenceRegion",
    "ConfidenceSpec",
    "CountsTable",
    "DegenerateEstimateError",
    "ExperimentConfig",
    "InfeasibleRegionError",
    "NoiseModel",
    "OutcomeDistribution",
    "ProbeBlock",
    "Protocol",
    "ProtocolKind",
    "RawEstimate",
    "SeedSpec",
    "StateSpec",
    "SummaryStats",
    "TrialRecord",
    "apply_detector_noise",
    "apply_postselection_noise",
    "branch_operators",
    "build_target_state",
    "conjugate_basis_matrix",
    "conjugate_basis_vector",
    "coverage_ratio",
    "crosstalk_weight",
    "derive_trial_seed",
    "dicke_state",
    "epsilon_theta",
    "estimate_probabilities",
    "estimate_probe_block",
    "estimate_probe_blocks_all",
    "expand_cells",
    "fidelity_general",
    "fidelity_pure",
    "fold_stream",
    "ghz_state",
    "hermitize",
    "is_density_matrix",
    "kernel_matrix",
    "lambda_squared",
    "mix_white_noise",
    "outcome_distribution",
    "parse_protocol",
    "physicality_projection",
    "probe_block_closed_form",
    "probe_block_oracle",
    "probe_blocks_for_row",
    "protocol_to_text",
    "reconstruct_type1",
    "reconstruct_type2",
    "reconstruct_weak",
    "region",
    "run_experiment",
    "run_trial",
    "sample_counts",
    "solve_threshold",
    "summarize",
    "vnm_unitary",
]
