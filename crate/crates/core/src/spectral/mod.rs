//! Linearised operators on the junction and their low-lying spectrum.

pub mod analysis;
pub mod assemble;
pub mod eigen;

pub use analysis::{
    analytic_kernel_vectors, form_decomposition_p, growing_mode_rate, growth_from_eigenvalue,
    negativity_witness_kink, quadratic_form, rayleigh_quotient, GrowthPrediction,
};
pub use assemble::{assemble, AssembledOperator, DofMap, OperatorSpec, Potential};
pub use eigen::{
    count_below, default_kernel_tol, lowest_eigenpairs, lowest_eigenpairs_with_tol, morse_and_kernel,
    SpectrumReport,
};
