/*!
Rate functions and exact identities of the first and second moment method.

Exact identities are evaluated in big rationals; rate functions return the
leading-order coefficient of `n` as an `f64`.
*/

mod info;
mod partition;
mod rates;

pub use info::{
    binary_kl, binomial_ldp_rate, chernoff_bounds, chernoff_multiplicative_upper, chernoff_phi,
    entropy, entropy_of, kl_divergence, kl_of, xlogx, ChernoffBounds, Distribution,
};
pub use partition::{
    admissible_edge_matrices, exact_partition_probability, expected_proper_colorings,
    log_expected_partitions, log_expected_partitions_offdiag, log_partition_probability,
    validate_admissible, AdmissiblePair,
};
pub use rates::{
    balanced_first_moment, compatible_rate, dplus, first_moment_rate, first_moment_rate_profile,
    maximize_rainbow_h, profile_components, rainbow_h, rainbow_h_argmax, rainbow_h_max,
    rainbow_h_slope, rainbow_rate, rho_hat, second_moment_rate, stochastic_residuals,
    subgraph_constants, CompatiblePair, SubgraphConstants,
};

pub(crate) use rates::{check_doubly_stochastic, f_unchecked};
