//! Contiguous relations, the shift lattice, Toda flows and the KP equation.

mod contiguous;
mod flows;
mod lattice;
mod pearson_toda;

pub use contiguous::{contiguous_gram_residual, omega_connection, OmegaConnection};
pub use flows::{
    flow_fd_available, kp_residual, phi_fd_residual, sato_wilson_lax_check, tau_route_crosscheck, toda_residuals,
    FlowDerivatives,
};
pub use lattice::{nijhoff_capel_residual, nijhoff_capel_sweep, uv_system_residual, LatticePoint, ShiftLattice};
pub use pearson_toda::{pearson_toda_constant, pearson_toda_residual, pearson_toda_residuals};
