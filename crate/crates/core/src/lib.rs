//! Graded multi-index matrices, their convolution product, the weighted
//! rho-norm family, and Cauchy-Hadamard-type radius estimation for power
//! series in many variables.
//!
//! The crate is organized around five layers:
//!
//! - [`multiindex`]: exponent tuples, the graded order, and ranked slice
//!   enumeration.
//! - [`matrix`]: dense matrices indexed by graded slices, the ordinary
//!   product, and the graded convolution product with its closed-form
//!   powers of rows and columns.
//! - [`norm`]: the weighted rho-norms, their overflow-safe log variants,
//!   and conjugate exponents.
//! - [`series`]: truncated power series as homogeneous blocks, evaluation,
//!   radius estimation, convergence verdicts, and the indeterminacy layer.
//! - [`extremal`]: seeded derivative-free search for the best constant in
//!   the lower norm bound and for multilinear operator norms.
//!
//! [`checks`] bundles the randomized verification suite behind the CLI's
//! `verify` subcommand.

pub mod checks;
pub mod error;
pub mod extremal;
pub mod matrix;
pub mod multiindex;
pub mod norm;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use matrix::{h_power_closed, v_power_closed, GradedMatrix};
pub use multiindex::{
    compare, enumerate_slice, log_multifactorial, multibinomial, multifactorial, GradedSlice,
    MultiIndex,
};
pub use norm::{ell_norm, log_rho_norm, rho_norm, RhoExponent};
pub use scalar::{Field, Scalar};
pub use series::{
    BlockSeries, Certificate, CoefficientMap, ConvergenceOptions, ConvergenceVerdict,
    IndeterminacyLayer, RadiusEstimate, VerdictStatus, WitnessPoint, WitnessReport,
};
