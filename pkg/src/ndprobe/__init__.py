"""Non-demolition probing simulator and correlation-analysis toolkit."""

from .correlations import (
    CorrelationReport,
    MeasurementBasis,
    classical_correlation,
    correlation_panel,
    cq_residual,
    cq_residual_min,
    geometric_discord,
    geometric_discord_bruteforce,
    geometric_discord_closed_form,
    mutual_information,
    negativity,
    quantum_discord,
)
from .linalg import (
    EigDecomposition,
    commutator,
    frobenius_distance,
    hermitian_eig,
    partial_trace,
    partial_transpose,
    tensor_product,
    unitary_exp,
)
from .probing import (
    GeneralizedProbeSpec,
    ValidationReport,
    build_generalized,
    discord_witness,
    estimate_x,
    estimate_x_sampled,
    evolve_generalized,
    evolve_joint,
    first_order_delta,
    generalized_probed_state,
    probed_state,
    validate_hamiltonian,
    xx_final_state,
    xx_hamiltonian,
    xx_probe_state,
)
from .states import (
    DensityMatrix,
    MeasurementSummary,
    PauliDecomposition,
    bloch_vector,
    measurement_sample,
    pauli_decompose,
    pauli_recompose,
    validate_density,
    von_neumann_entropy,
)

__all__ = [
    "CorrelationReport",
    "DensityMatrix",
    "EigDecomposition",
    "GeneralizedProbeSpec",
    "MeasurementBasis",
    "MeasurementSummary",
    "PauliDecomposition",
    "ValidationReport",
    "bloch_vector",
    "build_generalized",
    "classical_correlation",
    "commutator",
    "correlation_panel",
    "cq_residual",
    "cq_residual_min",
    "discord_witness",
    "estimate_x",
    "estimate_x_sampled",
    "evolve_generalized",
    "evolve_joint",
    "first_order_delta",
    "frobenius_distance",
    "generalized_probed_state",
    "geometric_discord",
    "geometric_discord_bruteforce",
    "geometric_discord_closed_form",
    "hermitian_eig",
    "measurement_sample",
    "mutual_information",
    "negativity",
    "partial_trace",
    "partial_transpose",
    "pauli_decompose",
    "pauli_recompose",
    "probed_state",
    "quantum_discord",
    "tensor_product",
    "unitary_exp",
    "validate_density",
    "validate_hamiltonian",
    "von_neumann_entropy",
    "xx_final_state",
    "xx_hamiltonian",
    "xx_probe_state",
]

__version__ = "0.1.0"
