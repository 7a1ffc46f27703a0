//! The Laguerre-Freud structure matrix `Psi` and its identities.
//!
//! With `deg theta = N + 1` and `deg sigma = M`, the truncated products are exact
//! only away from the lower-right corner. Everything here is compared on the
//! leading window `w = k - (N + 1 + M + 1)`, shrunk further where a check
//! multiplies by another banded factor.

use rug::Float;

use super::banded::BandedMatrix;
use super::pascal::{dressed_pascal, LowerUnitriangular};
use super::pipeline::Pipeline;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::momentlin::factor_symmetric;
use crate::precision::fmt_digits;
use crate::report::{CheckResult, Residuals};

/// Names of the six routes to `Psi`, in the order [`psi_routes`] returns them.
pub const ROUTE_NAMES: [&str; 6] = [
    "Pi^-1 H theta(J^T)",
    "sigma(J) H Pi^T",
    "Pi^-1 theta(J) H",
    "H sigma(J^T) Pi^T",
    "theta(J+I) Pi^-1 H",
    "H Pi^T sigma(J^T-I)",
];

fn degrees(p: &Pipeline) -> (usize, usize) {
    (p.weight().n(), p.weight().m())
}

/// Leading window on which `Psi` is exact.
pub fn psi_window(p: &Pipeline) -> usize {
    let (n, m) = degrees(p);
    p.size().saturating_sub(n + 1 + m + 1)
}

/// Polynomials of the Jacobi matrix, by Horner on banded storage.
struct JPolys {
    theta_j: Mat,
    sigma_j: Mat,
    theta_j_plus: Mat,
    sigma_j_minus: Mat,
}

fn j_polys(p: &Pipeline) -> JPolys {
    let (theta, sigma) = p.pearson_coeffs();
    let j = p.jacobi().to_banded();
    let one = Float::with_val(p.prec(), 1);
    let j_plus = j.add_identity(&one);
    let j_minus = j.add_identity(&Float::with_val(p.prec(), -1));
    JPolys {
        theta_j: j.poly(&theta).to_mat(),
        sigma_j: j.poly(&sigma).to_mat(),
        theta_j_plus: j_plus.poly(&theta).to_mat(),
        sigma_j_minus: j_minus.poly(&sigma).to_mat(),
    }
}

/// The six truncated products that all represent `Psi`.
pub fn psi_routes(p: &Pipeline) -> Result<Vec<Mat>> {
    if p.weight().is_deformed() {
        return Err(Error::Precondition("the structure matrix needs an undeformed weight".into()));
    }
    let s = p.s();
    let pi = dressed_pascal(&s, 1);
    let pi_inv = dressed_pascal(&s, -1);
    let h = p.h_mat();
    let jp = j_polys(p);
    let pi_t = pi.transpose();
    Ok(vec![
        pi_inv.mul(&h).mul(&jp.theta_j.transpose()),
        jp.sigma_j.mul(&h).mul(&pi_t),
        pi_inv.mul(&jp.theta_j).mul(&h),
        h.mul(&jp.sigma_j.transpose()).mul(&pi_t),
        jp.theta_j_plus.mul(&pi_inv).mul(&h),
        h.mul(&pi_t).mul(&jp.sigma_j_minus.transpose()),
    ])
}

/// `Psi` with its band and the route-agreement check.
#[derive(Clone, Debug)]
pub struct LaguerreFreud {
    /// Dense `k x k` product `sigma(J) H Pi^T`.
    pub psi: Mat,
    /// Band `[-M, N+1]` of `psi`.
    pub banded: BandedMatrix,
    pub window: usize,
    pub check: CheckResult,
}

/// Pairwise agreement of the six routes and vanishing of the out-of-band
/// entries, relative to `max |Psi|` on the window.
pub fn psi_route_check(p: &Pipeline, routes: &[Mat], tol: &Float) -> CheckResult {
    let (n, m) = degrees(p);
    let w = psi_window(p);
    let mut r = Residuals::new(p.prec());
    let scale = routes[1].max_abs_window(w);
    for a in 0..routes.len() {
        for b in a + 1..routes.len() {
            r.compare_mat_with("routes", &routes[a], &routes[b], &routes[1], w);
        }
    }
    r.bound("band", &BandedMatrix::out_of_band(&routes[1], m, n + 1, w), &scale);
    r.finish("psi_routes", tol, format!("leading {w}x{w}"), p.provenance())
}

/// Builds `Psi`; fails with `RouteMismatch` when two routes disagree beyond `tol`.
pub fn laguerre_freud_matrix(p: &Pipeline, tol: &Float) -> Result<LaguerreFreud> {
    let routes = psi_routes(p)?;
    let check = psi_route_check(p, &routes, tol);
    let w = psi_window(p);
    for a in 0..routes.len() {
        for b in a + 1..routes.len() {
            let mut r = Residuals::new(p.prec());
            r.compare_mat_with("pair", &routes[a], &routes[b], &routes[1], w);
            let c = &r.components()[0];
            if c.max_residual.is_nan() || c.max_residual > *tol {
                return Err(Error::RouteMismatch {
                    first: ROUTE_NAMES[a].into(),
                    second: ROUTE_NAMES[b].into(),
                    residual: fmt_digits(&c.max_residual, 6),
                });
            }
        }
    }
    let (n, m) = degrees(p);
    let psi = routes[1].clone();
    let banded = BandedMatrix::from_mat(&psi, m, n + 1);
    Ok(LaguerreFreud { psi, banded, window: w, check })
}

fn gamma_product(p: &Pipeline, from: usize, to: usize) -> Float {
    let mut acc = Float::with_val(p.prec(), 1);
    for j in from..=to {
        acc *= &p.jacobi().gamma()[j];
    }
    acc
}

/// `psi^(-M)_n = eta H_n prod_{j=n+1}^{n+M} gamma_j` and
/// `psi^(N+1)_n = H_n prod_{j=n+1}^{n+N+1} gamma_j`.
pub fn psi_extreme_diagonals(lf: &LaguerreFreud, p: &Pipeline, tol: &Float) -> CheckResult {
    let (n_deg, m_deg) = degrees(p);
    let prec = p.prec();
    let eta = p.ctx().rational(p.weight().eta());
    let h = p.h();
    let mut r = Residuals::new(prec);
    for (n, hn) in h.iter().enumerate().take(lf.window.saturating_sub(m_deg)) {
        let expect = Float::with_val(prec, &eta * hn) * gamma_product(p, n + 1, n + m_deg);
        r.compare("lowest", &lf.psi[(n + m_deg, n)], &expect);
    }
    for (n, hn) in h.iter().enumerate().take(lf.window.saturating_sub(n_deg + 1)) {
        let expect = Float::with_val(prec, hn * gamma_product(p, n + 1, n + n_deg + 1));
        r.compare("highest", &lf.psi[(n, n + n_deg + 1)], &expect);
    }
    r.finish("psi_extreme", tol, format!("n < {}", lf.window), p.provenance())
}

/// `theta(z) P(z-1) = Psi H^{-1} P(z)` and `sigma(z) P(z+1) = Psi^T H^{-1} P(z)`
/// at each sample `z`. The scale of each row includes `sum_j |X_{nj} P_j(z)|`.
pub fn structure_shift_residual(lf: &LaguerreFreud, p: &Pipeline, zs: &[Float], tol: &Float) -> CheckResult {
    let (n_deg, m_deg) = degrees(p);
    let prec = p.prec();
    let k = p.size();
    let pp = p.weight().pearson_polynomials();
    let hinv = p.h_inv();
    let x = lf.psi.scale_cols(&hinv);
    let y = lf.psi.transpose().scale_cols(&hinv);
    let rows = lf.window.saturating_sub(n_deg.max(m_deg) + 1);
    let one = Float::with_val(prec, 1);
    let mut r = Residuals::new(prec);
    for z in zs {
        let pz = p.jacobi().polynomials_at(z, k);
        let pm = p.jacobi().polynomials_at(&Float::with_val(prec, z - &one), k);
        let pp1 = p.jacobi().polynomials_at(&Float::with_val(prec, z + &one), k);
        let theta_z = pp.theta.eval(z);
        let sigma_z = pp.sigma.eval(z);
        for (label, a, shifted, mat) in [("theta", &theta_z, &pm, &x), ("sigma", &sigma_z, &pp1, &y)] {
            for n in 0..rows {
                let lhs = Float::with_val(prec, a * &shifted[n]);
                let mut rhs = Float::new(prec);
                let mut operand = Float::new(prec);
                for j in 0..k {
                    let t = Float::with_val(prec, &mat[(n, j)] * &pz[j]);
                    operand += &*t.as_abs();
                    rhs += t;
                }
                r.compare_with(label, &lhs, &rhs, &operand);
            }
        }
    }
    r.finish("psi_shift", tol, format!("rows n < {rows}, {} samples", zs.len()), p.provenance())
}

/// `[Psi H^{-1}, J] = Psi H^{-1}`, `[J, Psi^T H^{-1}] = Psi^T H^{-1}`,
/// `sigma(J) theta(J+I) = Psi H^{-1} Psi^T H^{-1}` and
/// `theta(J) sigma(J-I) = Psi^T H^{-1} Psi H^{-1}`.
pub fn psi_jacobi_identities(lf: &LaguerreFreud, p: &Pipeline, tol: &Float) -> CheckResult {
    let (n_deg, m_deg) = degrees(p);
    let hinv = p.h_inv();
    let x = lf.psi.scale_cols(&hinv);
    let y = lf.psi.transpose().scale_cols(&hinv);
    let j = p.jacobi().to_mat();
    let jp = j_polys(p);
    let w = lf.window.saturating_sub(n_deg.max(m_deg) + 1);
    let mut r = Residuals::new(p.prec());
    r.compare_mat("commutator_psi", &x.commutator(&j), &x, w);
    r.compare_mat("commutator_psi_t", &j.commutator(&y), &y, w);
    r.compare_mat("product_sigma_theta", &jp.sigma_j.mul(&jp.theta_j_plus), &x.mul(&y), w);
    r.compare_mat("product_theta_sigma", &jp.theta_j.mul(&jp.sigma_j_minus), &y.mul(&x), w);
    r.finish("psi_jacobi", tol, format!("leading {w}x{w}"), p.provenance())
}

/// Factors of `H theta(J^T) = Theta^{-1} h Theta^{-T}` and
/// `sigma(J) H = Sigma^{-1} h Sigma^{-T}`.
#[derive(Clone, Debug)]
pub struct StructureCholesky {
    pub theta_inv: LowerUnitriangular<Float>,
    pub sigma_inv: LowerUnitriangular<Float>,
    pub h: Vec<Float>,
    pub check: CheckResult,
}

/// Factors both symmetric products and checks the band limits of the factors,
/// `Pi = Theta^{-1} Sigma`, equal diagonal parts, and `Psi = Sigma^{-1} h Theta^{-T}`.
pub fn structure_cholesky(lf: &LaguerreFreud, p: &Pipeline, tol: &Float) -> Result<StructureCholesky> {
    let (n_deg, m_deg) = degrees(p);
    let k = p.size();
    let prec = p.prec();
    let jp = j_polys(p);
    let h = p.h_mat();
    let kt = k.saturating_sub(n_deg + 2);
    let ks = k.saturating_sub(m_deg + 1);
    let a1 = h.mul(&jp.theta_j.transpose()).leading(kt, kt);
    let a2 = jp.sigma_j.mul(&h).leading(ks, ks);
    let mut r = Residuals::new(prec);
    for (label, a, size) in [("symmetry_theta", &a1, kt), ("symmetry_sigma", &a2, ks)] {
        r.compare_mat(label, a, &a.transpose(), size);
    }
    let (theta, d1) = factor_symmetric(&a1, p.ctx().mantissa_bits)?;
    let (sigma, d2) = factor_symmetric(&a2, p.ctx().mantissa_bits)?;
    let l1 = theta.unit_lower_inverse();
    let l2 = sigma.unit_lower_inverse();
    r.bound("band_theta", &BandedMatrix::out_of_band(&l1, n_deg + 1, 0, kt), &l1.max_abs());
    r.bound("band_sigma", &BandedMatrix::out_of_band(&l2, m_deg, 0, ks), &l2.max_abs());
    let kk = kt.min(ks).saturating_sub(2);
    let pi = dressed_pascal(&p.s(), 1);
    let pi_f = l1.leading(kk, kk).mul(&sigma.leading(kk, kk));
    r.compare_mat("pascal", &pi_f, &pi, kk);
    for n in 0..kk {
        r.compare("h", &d1[n], &d2[n]);
    }
    let hd = Mat::diagonal(&d1[..kk], prec);
    let psi_f = l2.leading(kk, kk).mul(&hd).mul(&l1.leading(kk, kk).transpose());
    let wpsi = kk.saturating_sub(2).min(lf.window);
    r.compare_mat_with("psi", &psi_f, &lf.psi, &lf.psi, wpsi);
    let check =
        r.finish("structure_cholesky", tol, format!("factors {kt}/{ks}, identities on {kk}x{kk}"), p.provenance());
    Ok(StructureCholesky {
        theta_inv: LowerUnitriangular::from_mat(&l1),
        sigma_inv: LowerUnitriangular::from_mat(&l2),
        h: d1,
        check,
    })
}

/// `R(J) Pi^{+-1} = Pi^{+-1} R(J +- I)` for the polynomial with ascending
/// coefficients `r_coeffs`.
pub fn polynomial_shift_identity(p: &Pipeline, r_coeffs: &[Float], tol: &Float) -> CheckResult {
    let prec = p.prec();
    let s = p.s();
    let j = p.jacobi().to_banded();
    let deg = r_coeffs.len().saturating_sub(1);
    let w = p.size().saturating_sub(deg + 1);
    let rj = j.poly(r_coeffs).to_mat();
    let mut r = Residuals::new(prec);
    for (label, sign) in [("plus", 1i32), ("minus", -1i32)] {
        let pi = dressed_pascal(&s, sign);
        let shifted = j.add_identity(&Float::with_val(prec, sign)).poly(r_coeffs).to_mat();
        r.compare_mat(label, &rj.mul(&pi), &pi.mul(&shifted), w);
    }
    r.finish("pascal_shift", tol, format!("leading {w}x{w}, deg R = {deg}"), p.provenance())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperweight::HypergeometricWeight;
    use crate::precision::PrecisionContext;
    use rug::Rational;

    fn tol() -> Float {
        Float::with_val(256, 1e-40)
    }

    fn pipe(w: HypergeometricWeight, k: usize) -> Pipeline {
        Pipeline::new(&w, k, &PrecisionContext::new(256)).unwrap()
    }

    #[test]
    fn charlier_diagonal_is_eta_h() {
        let p = pipe(HypergeometricWeight::charlier(Rational::from((1, 2))), 10);
        let lf = laguerre_freud_matrix(&p, &tol()).unwrap();
        assert!(lf.check.pass, "{}", lf.check.max_residual);
        assert_eq!((lf.banded.lower(), lf.banded.upper()), (0, 1));
        for n in 0..lf.window {
            let expect = Float::with_val(256, &p.h()[n] / 2u32);
            let rel = Float::with_val(256, &lf.psi[(n, n)] - &expect).abs() / &expect;
            assert!(rel < 1e-40);
        }
    }

    #[test]
    fn generalized_meixner_identities() {
        let w = HypergeometricWeight::generalized_meixner(
            Rational::from((3, 2)),
            Rational::from((5, 2)),
            Rational::from((1, 3)),
        )
        .unwrap();
        let p = pipe(w, 12);
        let lf = laguerre_freud_matrix(&p, &tol()).unwrap();
        assert_eq!((lf.banded.lower(), lf.banded.upper()), (1, 2));
        assert!(psi_extreme_diagonals(&lf, &p, &tol()).pass);
        let zs: Vec<Float> = [0.0, 1.0, 2.5].iter().map(|&z| Float::with_val(256, z)).collect();
        let c = structure_shift_residual(&lf, &p, &zs, &tol());
        assert!(c.pass, "{}", c.max_residual);
        let c = psi_jacobi_identities(&lf, &p, &tol());
        assert!(c.pass, "{:?}", c.components);
        let sc = structure_cholesky(&lf, &p, &tol()).unwrap();
        assert!(sc.check.pass, "{:?}", sc.check.components);
        assert!(sc.theta_inv.bandwidth(|x| x.clone().abs() < 1e-40) <= 2);
        let r = [Float::with_val(256, 1), Float::with_val(256, -2), Float::with_val(256, 1)];
        assert!(polynomial_shift_identity(&p, &r, &tol()).pass);
    }

    #[test]
    fn commutator_trace_matches() {
        let p = pipe(HypergeometricWeight::meixner(Rational::from(2), Rational::from((1, 3))), 10);
        let lf = laguerre_freud_matrix(&p, &tol()).unwrap();
        let x = lf.psi.scale_cols(&p.h_inv());
        let c = x.commutator(&p.jacobi().to_mat());
        let w = lf.window - 2;
        let (mut a, mut b) = (Float::new(256), Float::new(256));
        for i in 0..w {
            a += &c[(i, i)];
            b += &x[(i, i)];
        }
        assert!(Float::with_val(256, &a - &b).abs() < Float::with_val(256, b.abs() * 1e-40));
    }

    #[test]
    fn constant_polynomial_is_exact() {
        let p = pipe(HypergeometricWeight::charlier(Rational::from((7, 10))), 8);
        let c = polynomial_shift_identity(&p, &[Float::with_val(256, 3)], &tol());
        assert!(c.max_residual.is_zero());
    }
}
