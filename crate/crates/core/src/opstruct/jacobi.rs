//! Recursion coefficients, the Jacobi matrix and the monic orthogonal polynomials.

use rug::Float;

use super::banded::BandedMatrix;
use crate::error::Result;
use crate::hyperweight::HypergeometricWeight;
use crate::linalg::Mat;
use crate::momentlin::{weighted_sum, CholeskyFactorization};
use crate::precision::PrecisionContext;
use crate::report::{CheckResult, Provenance, Residuals};

/// Tridiagonal `J` with diagonal `beta_0..beta_{k-1}`, unit superdiagonal and
/// subdiagonal `gamma_1..gamma_{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiMatrix {
    beta: Vec<Float>,
    // gamma[n] = gamma_n; gamma[0] is the conventional 0.
    gamma: Vec<Float>,
}

/// Recursion coefficients from a factorization. A `K x K` factorization yields a
/// Jacobi matrix of size `K - 1`, since `beta_n` needs row `n + 1` of `S`.
pub fn jacobi_matrix(chol: &CholeskyFactorization) -> JacobiMatrix {
    let k = chol.size() - 1;
    let prec = chol.prec();
    let beta = (0..k).map(|n| chol.coefficient(1, n) - chol.coefficient(1, n + 1)).collect();
    let h = chol.h();
    let gamma =
        (0..=k).map(|n| if n == 0 { Float::new(prec) } else { Float::with_val(prec, &h[n] / &h[n - 1]) }).collect();
    let j = JacobiMatrix { beta, gamma };
    debug_assert!(j.jh_asymmetry(h) <= Float::with_val(prec, &h[0] * 1e-20));
    j
}

impl JacobiMatrix {
    pub fn new(beta: Vec<Float>, gamma: Vec<Float>) -> Self {
        assert_eq!(beta.len() + 1, gamma.len(), "gamma runs over 0..=k");
        Self { beta, gamma }
    }

    pub fn size(&self) -> usize {
        self.beta.len()
    }

    pub fn prec(&self) -> u32 {
        self.beta[0].prec()
    }

    pub fn beta(&self) -> &[Float] {
        &self.beta
    }

    /// `gamma_0 = 0, gamma_1, ..., gamma_k`; one more than the matrix uses.
    pub fn gamma(&self) -> &[Float] {
        &self.gamma
    }

    pub fn to_banded(&self) -> BandedMatrix {
        BandedMatrix::from_mat(&self.to_mat(), 1, 1)
    }

    pub fn to_mat(&self) -> Mat {
        let k = self.size();
        let prec = self.prec();
        Mat::from_fn(k, k, prec, |i, j| {
            if i == j {
                self.beta[i].clone()
            } else if j == i + 1 {
                Float::with_val(prec, 1)
            } else if i == j + 1 {
                self.gamma[i].clone()
            } else {
                Float::new(prec)
            }
        })
    }

    /// `max |(JH)_{n,n+1} - (JH)_{n+1,n}|`.
    pub fn jh_asymmetry(&self, h: &[Float]) -> Float {
        let mut worst = Float::new(self.prec());
        for n in 0..self.size().saturating_sub(1) {
            let up = h[n + 1].clone();
            let down = Float::with_val(self.prec(), &self.gamma[n + 1] * &h[n]);
            crate::precision::max_abs(&mut worst, &(up - down));
        }
        worst
    }

    /// `P_0(z), ..., P_{len-1}(z)` by the three-term recurrence; `len <= size + 1`.
    pub fn polynomials_at(&self, z: &Float, len: usize) -> Vec<Float> {
        assert!(len <= self.size() + 1);
        let prec = self.prec();
        let mut p: Vec<Float> = Vec::with_capacity(len);
        for n in 0..len {
            let v = match n {
                0 => Float::with_val(prec, 1),
                1 => Float::with_val(prec, z - &self.beta[0]),
                _ => {
                    let a = Float::with_val(prec, z - &self.beta[n - 1]) * &p[n - 1];
                    a - Float::with_val(prec, &self.gamma[n - 1] * &p[n - 2])
                }
            };
            p.push(v);
        }
        p
    }
}

/// `P_n(z)` with `P_{-1} = 0`, `P_0 = 1`.
pub fn polynomial_eval(j: &JacobiMatrix, n: usize, z: &Float) -> Float {
    j.polynomials_at(z, n + 1).pop().unwrap()
}

/// Coefficients `p^d_n` (`P_n(z) = sum_d p^d_n z^{n-d}`), read from the rows of `S`.
#[derive(Clone, Debug)]
pub struct PolynomialTable {
    s: Mat,
}

impl PolynomialTable {
    pub fn from_cholesky(chol: &CholeskyFactorization) -> Self {
        Self { s: chol.s().clone() }
    }

    pub fn len(&self) -> usize {
        self.s.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.s.rows() == 0
    }

    /// `p^d_n`, zero for `d > n`.
    pub fn coefficient(&self, d: usize, n: usize) -> Float {
        if d > n {
            Float::new(self.s.prec())
        } else {
            self.s[(n, n - d)].clone()
        }
    }

    pub fn abs_coefficient_sum(&self, n: usize) -> Float {
        let mut acc = Float::new(self.s.prec());
        for d in 0..=n {
            acc += self.coefficient(d, n).abs();
        }
        acc
    }

    /// `P_n(z)` from its coefficients (Horner in `z`).
    pub fn eval(&self, n: usize, z: &Float) -> Float {
        let mut acc = Float::new(self.s.prec());
        for d in 0..=n {
            acc *= z;
            acc += self.coefficient(d, n);
        }
        acc
    }
}

/// Residuals of the coefficient sums
/// `p^1_{n+1} = -sum_{k<=n} beta_k`,
/// `p^2_{n+1} = -sum_{1<=k<=n} gamma_k + sum_{0<=l<k<=n} beta_k beta_l` and
/// `p^3_{n+2} - p^3_{n+3} = beta_{n+2} p^2_{n+2} + gamma_{n+2} p^1_{n+1}`.
pub fn coefficient_sum_check(j: &JacobiMatrix, polys: &PolynomialTable, tol: &Float, prov: Provenance) -> CheckResult {
    let prec = j.prec();
    let beta = j.beta();
    let gamma = j.gamma();
    let top = j.size().min(polys.len() - 1);
    let mut r = Residuals::new(prec);
    let mut sum_beta = Float::new(prec);
    let mut sum_gamma = Float::new(prec);
    let mut pairs = Float::new(prec);
    for n in 0..top {
        // pairs accumulates beta_n * sum_{l<n} beta_l before sum_beta absorbs beta_n.
        pairs += Float::with_val(prec, &beta[n] * &sum_beta);
        sum_beta += &beta[n];
        if n >= 1 {
            sum_gamma += &gamma[n];
        }
        r.compare_with("p1", &polys.coefficient(1, n + 1), &Float::with_val(prec, -&sum_beta), &sum_beta);
        let rhs = Float::with_val(prec, &pairs - &sum_gamma);
        let mut scale = pairs.clone().abs();
        crate::precision::max_abs(&mut scale, &sum_gamma);
        r.compare_with("p2", &polys.coefficient(2, n + 1), &rhs, &scale);
    }
    for n in 0..top.saturating_sub(2) {
        let lhs = polys.coefficient(3, n + 2) - polys.coefficient(3, n + 3);
        let a = Float::with_val(prec, &beta[n + 2] * &polys.coefficient(2, n + 2));
        let b = Float::with_val(prec, &gamma[n + 2] * &polys.coefficient(1, n + 1));
        let mut scale = a.clone().abs();
        crate::precision::max_abs(&mut scale, &b);
        r.compare_with("p3", &lhs, &Float::with_val(prec, &a + &b), &scale);
    }
    r.finish("coefficient_sums", tol, format!("n=0..{}", top.saturating_sub(1)), prov)
}

/// Three-term recurrence and coefficient extraction at the sample points `zs`,
/// plus the discrete orthogonality `sum_k P_n(k) P_m(k) w(k) = delta_{nm} H_n`
/// for `n, m < orth` by direct weighted summation.
#[allow(clippy::too_many_arguments)]
pub fn recurrence_check(
    weight: &HypergeometricWeight,
    j: &JacobiMatrix,
    polys: &PolynomialTable,
    h: &[Float],
    zs: &[Float],
    orth: usize,
    ctx: &PrecisionContext,
    tol: &Float,
    prov: Provenance,
) -> Result<CheckResult> {
    let prec = j.prec();
    let k = j.size();
    let mut r = Residuals::new(prec);
    for z in zs {
        let p = j.polynomials_at(z, k + 1);
        for n in 0..k {
            // z P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1}
            let lhs = Float::with_val(prec, z * &p[n]);
            let mut rhs = Float::with_val(prec, &p[n + 1] + &j.beta()[n] * &p[n].clone());
            if n > 0 {
                rhs += Float::with_val(prec, &j.gamma()[n] * &p[n - 1]);
            }
            r.compare("recurrence", &lhs, &rhs);
            r.compare("coefficients", &polys.eval(n, z), &p[n]);
        }
    }
    let orth = orth.min(k);
    for n in 0..orth {
        for m in n..orth {
            // |P_n(x)| <= (sum_d |p^d_n|) (x+1)^n bounds the summand for the tail estimate.
            let bound = polys.abs_coefficient_sum(n) * polys.abs_coefficient_sum(m);
            let s = weighted_sum(weight, ctx, (n + m) as u32, &bound, |x| {
                let p = j.polynomials_at(&Float::with_val(prec, x), m + 1);
                Float::with_val(prec, &p[n] * &p[m])
            })?;
            let expect = if n == m { h[n].clone() } else { Float::new(prec) };
            let norm = Float::with_val(prec, &h[n] * &h[m]).sqrt();
            r.compare_with("orthogonality", &s, &expect, &norm);
        }
    }
    Ok(r.finish("recurrence", tol, format!("n=0..{}, orthogonality n,m<{orth}", k - 1), prov))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_from_coefficients() {
        let prec = 64;
        let f = |v: f64| Float::with_val(prec, v);
        let j = JacobiMatrix::new(vec![f(1.0), f(2.0), f(3.0)], vec![f(0.0), f(0.5), f(1.5), f(2.0)]);
        let z = f(2.0);
        assert_eq!(polynomial_eval(&j, 0, &z), 1);
        assert_eq!(polynomial_eval(&j, 1, &z), 1);
        // P_2 = (z - 2) P_1 - 0.5 P_0 = -0.5
        assert_eq!(polynomial_eval(&j, 2, &z), -0.5);
        assert_eq!(j.to_mat()[(1, 0)], 0.5);
        assert_eq!(j.to_mat()[(0, 1)], 1);
        assert_eq!(j.to_banded().to_mat(), j.to_mat());
    }
}
