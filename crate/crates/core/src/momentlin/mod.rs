//! Moments, Hankel truncations, Cholesky factorization and exact flow
//! derivatives of the tau functions.

mod fd;
mod hankel;
mod jet;
mod series;
mod tau;

pub use fd::{
    central_difference, central_difference_pair, derivative_fd_crosscheck, fd_convergence, FdConvergence, FdWitness,
};
pub use hankel::{
    cholesky, cholesky_unverified, factor_symmetric, gram_truncation, hankel_determinant, CholeskyFactorization,
    DeterminantVariant, HankelTruncation,
};
pub use jet::{covers, down_closure, log_tau_jet, Jet, Multi};
pub use series::{moment, weighted_sum, MomentTable};
pub use tau::{tau_derivative, Expansion, FlowMultiIndex, TauEngine};
