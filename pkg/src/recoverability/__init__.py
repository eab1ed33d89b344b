"""Numerics for approximate recoverability of tripartite states: recovery
channels, one-shot relative entropies, invariant-deviation quantities, and a
verification harness for the bounds connecting them."""

from .states import (
    ClassicalJoint,
    DensityOperator,
    MarkovBlock,
    MarkovChainSpec,
    assemble_markov,
    from_classical,
    marginal,
    random_classical,
    random_density,
    random_markov_spec,
    slater_state,
)
from .entropies import (
    binary_entropy,
    classical_cmi,
    classical_d_alpha,
    classical_d_max,
    classical_relative_entropy,
    cmi,
    d_alpha,
    d_max,
    d_measured_bounds,
    d_min,
    fidelity,
    log_euclidean_alpha,
    petz_renyi_2,
    relative_entropy,
    shannon_entropy,
    trace_distance,
    von_neumann,
)
from .channels import (
    ClassicalChannel,
    QuantumChannel,
    apply,
    averaged_rotated_petz,
    beta0_quadrature,
    classical_channel_apply,
    classical_to_quantum,
    compose,
    mix_channels,
    petz_map,
    random_channel,
    restrict_output,
    rotated_petz_map,
)
from .invariance import (
    FixedPointSet,
    LambdaResult,
    LambdaSolverError,
    MarkovBoundCertificate,
    fixed_point_basis,
    lambda_alpha_upper,
    lambda_max,
    lambda_max_classical_lp,
    lift_fixed_points,
    markov_dmax_bound,
    max_support_fixed_state,
)
from .harness import TrialConfig, VerificationReport, run_casebook

__version__ = "0.1.0"
