//! Symmetry of the moment matrix under the Pearson equation:
//! `theta(Lambda) G = B sigma(Lambda) G B^T`.

use rug::Float;

use super::pascal::pascal_matrix;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::momentlin::MomentTable;
use crate::report::{CheckResult, Provenance, Residuals};

/// `p(Lambda) G` restricted to `k x k`: entry `(n, m)` is `sum_j p_j rho_{n+m+j}`.
fn poly_lambda_gram(table: &MomentTable, coeffs: &[Float], k: usize) -> Result<Mat> {
    let needed = 2 * k - 2 + coeffs.len().saturating_sub(1);
    if needed > table.m_max() {
        return Err(Error::IndexOutOfTable { needed, available: table.m_max() });
    }
    let rho = table.values();
    Ok(Mat::from_fn(k, k, table.prec(), |n, m| {
        let mut acc = Float::new(table.prec());
        for (j, c) in coeffs.iter().enumerate() {
            acc += Float::with_val(table.prec(), c * &rho[n + m + j]);
        }
        acc
    }))
}

/// Maximal relative residual of `theta(Lambda) G - B sigma(Lambda) G B^T` on the
/// `k x k` window. `B` is lower triangular on the left and upper on the right,
/// so the window is exact; the shifts only deepen the moment demand.
pub fn gram_pearson_residual(table: &MomentTable, k: usize, tol: &Float, prov: Provenance) -> Result<CheckResult> {
    let w = table.weight();
    if w.is_deformed() {
        return Err(Error::Precondition("Pearson symmetry needs an undeformed weight".into()));
    }
    let prec = table.prec();
    let pp = w.pearson_polynomials();
    let to_f = |c: &[rug::Rational]| c.iter().map(|q| Float::with_val(prec, q)).collect::<Vec<_>>();
    let lhs = poly_lambda_gram(table, &to_f(pp.theta.coeffs()), k)?;
    let x = poly_lambda_gram(table, &to_f(pp.sigma.coeffs()), k)?;
    let b = pascal_matrix(k, 1).to_mat(prec);
    let rhs = b.mul(&x).mul(&b.transpose());
    let mut r = Residuals::new(prec);
    r.compare_mat("symmetry", &lhs, &rhs, k);
    Ok(r.finish("gram_pearson", tol, format!("leading {k}x{k}"), prov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperweight::HypergeometricWeight;
    use crate::precision::PrecisionContext;
    use rug::Rational;

    fn prov() -> Provenance {
        Provenance { weight: String::new(), size: 0, bits: 256 }
    }

    #[test]
    fn charlier_and_meixner_windows() {
        let ctx = PrecisionContext::new(256);
        let tol = Float::with_val(256, 1e-50);
        for w in [
            HypergeometricWeight::charlier(Rational::from((7, 10))),
            HypergeometricWeight::meixner(Rational::from(2), Rational::from((1, 3))),
        ] {
            let t = MomentTable::build(&w, 20, &ctx).unwrap();
            let c = gram_pearson_residual(&t, 8, &tol, prov()).unwrap();
            assert!(c.pass, "{w}: {}", c.max_residual);
            // k = 1 compares two scalars.
            assert!(gram_pearson_residual(&t, 1, &tol, prov()).unwrap().pass);
        }
    }

    #[test]
    fn deformed_is_rejected() {
        let ctx = PrecisionContext::new(128);
        let w = HypergeometricWeight::charlier(Rational::from((1, 2)))
            .with_deformation(Rational::from((9, 10)), Rational::from(1))
            .unwrap();
        let t = MomentTable::build(&w, 10, &ctx).unwrap();
        assert!(matches!(
            gram_pearson_residual(&t, 3, &Float::with_val(128, 1e-20), prov()),
            Err(Error::Precondition(_))
        ));
    }
}
