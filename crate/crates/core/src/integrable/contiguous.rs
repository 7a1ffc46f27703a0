//! Contiguous relations of the moment matrix and the connection matrices `Omega`
//! between neighbouring parameter sets.

use rug::Float;

use crate::error::{Error, Result};
use crate::hyperweight::{HypergeometricWeight, Shift};
use crate::linalg::Mat;
use crate::momentlin::MomentTable;
use crate::opstruct::{pascal_matrix, LowerUnitriangular, Pipeline};
use crate::precision::PrecisionContext;
use crate::report::{CheckResult, Provenance, Residuals};

/// `(Lambda + a_i) G = a_i (iT G)`, `(Lambda + b_j - 1) G = (b_j - 1) (T_j G)` and
/// `Lambda G = eta kappa B (T G) B^T`, each on the leading `(k-1) x (k-1)` window,
/// with the shifted moment matrix taken from its own table.
pub fn contiguous_gram_residual(
    weight: &HypergeometricWeight,
    k: usize,
    shifts: &[Shift],
    ctx: &PrecisionContext,
    tol: &Float,
) -> Result<CheckResult> {
    if weight.is_deformed() {
        return Err(Error::Precondition("contiguous relations need an undeformed weight".into()));
    }
    let prec = ctx.mantissa_bits;
    let base = MomentTable::build(weight, 2 * k, ctx)?;
    let rho = base.values();
    let w = k - 1;
    let mut r = Residuals::new(prec);
    for &which in shifts {
        let shifted = weight.shift_parameter(which)?;
        let c = ctx.rational(&weight.shift_constant(which)?);
        let table = MomentTable::build(&shifted, 2 * k, ctx)?;
        let sr = table.values();
        let label = which.to_string();
        match which {
            Shift::A(_) | Shift::B(_) => {
                for n in 0..w {
                    for m in 0..w {
                        let i = n + m;
                        let lhs = Float::with_val(prec, &rho[i + 1] + &c * &rho[i].clone());
                        let rhs = Float::with_val(prec, &c * &sr[i]);
                        r.compare(&label, &lhs, &rhs);
                    }
                }
            }
            Shift::Total => {
                let eta = ctx.rational(weight.eta());
                let factor = Float::with_val(prec, &eta * &c);
                let b = pascal_matrix(k, 1).to_mat(prec);
                let g = Mat::from_fn(k, k, prec, |i, j| sr[i + j].clone());
                let rhs = b.mul(&g).mul(&b.transpose()).scale(&factor);
                let lhs = Mat::from_fn(k, k, prec, |i, j| rho[i + j + 1].clone());
                r.compare_mat(&label, &lhs, &rhs, w);
            }
        }
    }
    let prov = Provenance { weight: weight.to_string(), size: k, bits: prec };
    Ok(r.finish("contiguous", tol, format!("leading {w}x{w}"), prov))
}

/// `Omega = S (T S)^{-1}` for a single shift, as a bidiagonal matrix with
/// subdiagonal `H_{n+1} / (c (T H)_n)`, `c = a_i` or `b_j - 1`.
#[derive(Clone, Debug)]
pub struct OmegaConnection {
    pub omega: LowerUnitriangular<Float>,
    pub check: CheckResult,
}

/// Builds `Omega` from the subdiagonal formula and compares it with the direct
/// product `S (T S)^{-1}`: off-bidiagonal entries, the subdiagonal itself, and
/// the action `Omega (T P)(z) = P(z)` at the samples `zs`.
pub fn omega_connection(base: &Pipeline, which: Shift, zs: &[Float], tol: &Float) -> Result<OmegaConnection> {
    if matches!(which, Shift::Total) {
        return Err(Error::InvalidShift("connection matrices are defined for single shifts".into()));
    }
    let weight = base.weight();
    let k = base.size();
    let prec = base.prec();
    let c = base.ctx().rational(&weight.shift_constant(which)?);
    let shifted = Pipeline::new(&weight.shift_parameter(which)?, k, base.ctx())?;
    let direct = base.s().mul(&shifted.s().unit_lower_inverse());
    let h = base.chol().h();
    let th = shifted.chol().h();
    let omega = LowerUnitriangular::from_fn(k, |i, j| {
        if i == j + 1 {
            Float::with_val(prec, &h[i] / &th[j]) / &c
        } else {
            Float::new(prec)
        }
    });
    let mut r = Residuals::new(prec);
    let scale = direct.max_abs();
    let mut off = Float::new(prec);
    for i in 0..k {
        for j in 0..i.saturating_sub(1) {
            crate::precision::max_abs(&mut off, &direct[(i, j)]);
        }
    }
    r.bound("bidiagonal", &off, &scale);
    for n in 0..k - 1 {
        r.compare("subdiagonal", &omega.subdiagonal(1)[n], &direct[(n + 1, n)]);
    }
    for z in zs {
        let p = base.jacobi().polynomials_at(z, k);
        let tp = shifted.jacobi().polynomials_at(z, k);
        for n in 0..k {
            let mut rhs = tp[n].clone();
            let mut operand = tp[n].clone().abs();
            if n > 0 {
                let t = Float::with_val(prec, &omega.subdiagonal(1)[n - 1] * &tp[n - 1]);
                operand += &*t.as_abs();
                rhs += t;
            }
            r.compare_with("action", &p[n], &rhs, &operand);
        }
    }
    let check = r.finish("omega", tol, format!("{k}x{k}, shift {which}"), base.provenance());
    Ok(OmegaConnection { omega, check })
}
