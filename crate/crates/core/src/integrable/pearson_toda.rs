//! Compatibility of the Pearson structure with the first Toda flow.
//!
//! With `X = Psi H^{-1}`, `Y = Psi^T H^{-1}` and `Phi = -J_-`:
//! `theta(eta^{-1} Y) = [Phi, eta^{-1} Y]`, `theta X = [Phi, X]`,
//! `theta Y = [J_+, Y]` and `theta(eta^{-1} X) = [J_+, eta^{-1} X]`.
//! The `eta` derivatives are central differences over full pipeline re-runs.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::momentlin::central_difference_pair;
use crate::opstruct::{psi_routes, psi_window, Pipeline};
use crate::report::{CheckResult, Residuals};

fn gauge_pair(p: &Pipeline) -> Result<(Mat, Mat)> {
    let psi = psi_routes(p)?.swap_remove(1);
    let hi = p.h_inv();
    Ok((psi.scale_cols(&hi), psi.transpose().scale_cols(&hi)))
}

/// Residuals of the four compatibility equations with central-difference step `step`.
pub fn pearson_toda_residuals(p: &Pipeline, step: &Rational) -> Result<Residuals> {
    let w = p.weight();
    if w.is_deformed() {
        return Err(Error::Precondition("Pearson-Toda compatibility needs an undeformed weight".into()));
    }
    let prec = p.prec();
    let k = p.size();
    let ctx = p.ctx();
    let window = psi_window(p).saturating_sub(1);
    if window == 0 {
        return Err(Error::Precondition(format!("k = {k} leaves an empty window")));
    }
    let (x, y) = gauge_pair(p)?;
    let ((xp, yp), (xm, ym)) = central_difference_pair(w, 1, step, |v| gauge_pair(&Pipeline::unverified(v, k, ctx)?))?;
    let inv_2h = Float::with_val(prec, 1u32 / (Float::with_val(prec, step) * 2u32));
    let dx = xp.sub(&xm).scale(&inv_2h);
    let dy = yp.sub(&ym).scale(&inv_2h);
    let eta_inv = Float::with_val(prec, 1u32 / ctx.rational(w.eta()));
    let jm = p.jacobi().to_mat();
    let phi = jm.strictly_lower().scale(&Float::with_val(prec, -1));
    let j_plus = jm.upper();
    // theta(eta^{-1} F) = eta^{-1} (theta F - F)
    let d_scaled = |d: &Mat, f: &Mat| d.sub(f).scale(&eta_inv);
    let mut r = Residuals::new(prec);
    let ys = y.scale(&eta_inv);
    let xs = x.scale(&eta_inv);
    r.compare_mat_with("1a", &d_scaled(&dy, &y), &phi.commutator(&ys), &ys, window);
    r.compare_mat_with("1b", &dx, &phi.commutator(&x), &x, window);
    r.compare_mat_with("2a", &dy, &j_plus.commutator(&y), &y, window);
    r.compare_mat_with("2b", &d_scaled(&dx, &x), &j_plus.commutator(&xs), &xs, window);
    Ok(r)
}

/// The four compatibility equations at the mandated step, judged against
/// `max(tol, 10 step^2)`.
pub fn pearson_toda_residual(p: &Pipeline, tol: &Float) -> Result<CheckResult> {
    let step = p.ctx().fd_step();
    let r = pearson_toda_residuals(p, &step)?;
    let h2 = Float::with_val(p.prec(), &step).square() * 10u32;
    let bound = if h2 > *tol { h2 } else { tol.clone() };
    let window = psi_window(p).saturating_sub(1);
    Ok(r.finish("pearson_toda", &bound, format!("leading {window}x{window}"), p.provenance()))
}

/// `C = residual / step^2` at `step`, the constant of the second-order bound.
pub fn pearson_toda_constant(p: &Pipeline, step: &Rational) -> Result<Float> {
    let r = pearson_toda_residuals(p, step)?;
    let h2 = Float::with_val(p.prec(), step).square();
    Ok(r.max_residual() / h2)
}
