//! Moment table, factorization and recursion coefficients of one weight,
//! computed once and shared by the checks.

use rug::Float;

use super::jacobi::{jacobi_matrix, JacobiMatrix, PolynomialTable};
use crate::error::Result;
use crate::hyperweight::HypergeometricWeight;
use crate::linalg::Mat;
use crate::momentlin::{cholesky, cholesky_unverified, gram_truncation, CholeskyFactorization, MomentTable};
use crate::precision::PrecisionContext;
use crate::report::Provenance;

/// Everything derived from one weight at truncation size `k`: the factorization
/// has size `k + 1` so that the Jacobi matrix has size `k`.
#[derive(Clone, Debug)]
pub struct Pipeline {
    weight: HypergeometricWeight,
    ctx: PrecisionContext,
    size: usize,
    table: MomentTable,
    chol: CholeskyFactorization,
    jacobi: JacobiMatrix,
}

impl Pipeline {
    /// Verified factorization, table depth `2k`.
    pub fn new(weight: &HypergeometricWeight, size: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::with_depth(weight, size, 2 * size, ctx, true)
    }

    /// Skips the doubled-precision confirmation; used inside finite differences.
    pub fn unverified(weight: &HypergeometricWeight, size: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::with_depth(weight, size, 2 * size, ctx, false)
    }

    pub fn with_depth(
        weight: &HypergeometricWeight,
        size: usize,
        depth: usize,
        ctx: &PrecisionContext,
        verify: bool,
    ) -> Result<Self> {
        ctx.validate()?;
        let table = MomentTable::build(weight, depth.max(2 * size), ctx)?;
        Self::from_table(table, size, ctx, verify)
    }

    pub fn from_table(table: MomentTable, size: usize, ctx: &PrecisionContext, verify: bool) -> Result<Self> {
        let g = gram_truncation(&table, size + 1)?;
        let chol = if verify { cholesky(&g, ctx)? } else { cholesky_unverified(&g)? };
        let jacobi = jacobi_matrix(&chol);
        Ok(Self { weight: table.weight().clone(), ctx: ctx.clone(), size, table, chol, jacobi })
    }

    pub fn weight(&self) -> &HypergeometricWeight {
        &self.weight
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn prec(&self) -> u32 {
        self.ctx.mantissa_bits
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self) -> &MomentTable {
        &self.table
    }

    /// The `(k+1) x (k+1)` factorization.
    pub fn chol(&self) -> &CholeskyFactorization {
        &self.chol
    }

    pub fn jacobi(&self) -> &JacobiMatrix {
        &self.jacobi
    }

    /// `S` truncated to `k x k`.
    pub fn s(&self) -> Mat {
        self.chol.s().leading(self.size, self.size)
    }

    /// `H_0, ..., H_{k-1}`.
    pub fn h(&self) -> &[Float] {
        &self.chol.h()[..self.size]
    }

    pub fn h_mat(&self) -> Mat {
        Mat::diagonal(self.h(), self.prec())
    }

    pub fn h_inv(&self) -> Vec<Float> {
        self.h().iter().map(|x| Float::with_val(x.prec(), 1u32 / x)).collect()
    }

    pub fn polys(&self) -> PolynomialTable {
        PolynomialTable::from_cholesky(&self.chol)
    }

    pub fn provenance(&self) -> Provenance {
        Provenance { weight: self.weight.to_string(), size: self.size, bits: self.ctx.mantissa_bits }
    }

    /// Coefficients of `theta` and `sigma` as floats, ascending.
    pub fn pearson_coeffs(&self) -> (Vec<Float>, Vec<Float>) {
        let pp = self.weight.pearson_polynomials();
        let conv = |c: &[rug::Rational]| c.iter().map(|q| self.ctx.rational(q)).collect::<Vec<_>>();
        (conv(pp.theta.coeffs()), conv(pp.sigma.coeffs()))
    }
}
