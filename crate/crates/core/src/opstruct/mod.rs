//! Structure matrices of the orthogonal polynomials: Pascal and dressed Pascal,
//! Jacobi, the Laguerre-Freud matrix `Psi`, and residual checks of the matrix
//! identities that relate them on finite truncations.

mod banded;
mod gram;
mod jacobi;
mod pascal;
mod pipeline;
mod psi;

pub use banded::BandedMatrix;
pub use gram::gram_pearson_residual;
pub use jacobi::{
    coefficient_sum_check, jacobi_matrix, polynomial_eval, recurrence_check, JacobiMatrix, PolynomialTable,
};
pub use pascal::{
    dressed_pascal, pascal_matrix, pascal_subdiagonal, pi_closed_form_check, s_inverse_expansion_check, DiagonalOps,
    LowerUnitriangular,
};
pub use pipeline::Pipeline;
pub use psi::{
    laguerre_freud_matrix, polynomial_shift_identity, psi_extreme_diagonals, psi_jacobi_identities, psi_route_check,
    psi_routes, psi_window, structure_cholesky, structure_shift_residual, LaguerreFreud, StructureCholesky,
    ROUTE_NAMES,
};
