//! Hankel truncations of the moment matrix, their determinants and the
//! Cholesky factorization `G = S^{-1} H S^{-T}`.

use rug::{Assign, Float};

use super::series::MomentTable;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::precision::{pow2, PrecisionContext};

/// Leading `k x k` block of the moment matrix, `G_{n,m} = rho_{n+m}`.
#[derive(Clone, Copy, Debug)]
pub struct HankelTruncation<'a> {
    table: &'a MomentTable,
    size: usize,
}

impl<'a> HankelTruncation<'a> {
    pub fn new(table: &'a MomentTable, size: usize) -> Result<Self> {
        if size > 0 && 2 * size - 2 > table.m_max() {
            return Err(Error::IndexOutOfTable { needed: 2 * size - 2, available: table.m_max() });
        }
        if let Some(q) = table.support() {
            if size as u64 > q {
                return Err(Error::TruncationExceedsSupport { size, support: q });
            }
        }
        Ok(Self { table, size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self) -> &'a MomentTable {
        self.table
    }

    pub fn entry(&self, n: usize, m: usize) -> &'a Float {
        assert!(n < self.size && m < self.size, "entry outside truncation");
        &self.table.values()[n + m]
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_fn(self.size, self.size, self.table.prec(), |i, j| self.entry(i, j).clone())
    }
}

/// `G^{[k]}` of a table.
pub fn gram_truncation(table: &MomentTable, k: usize) -> Result<HankelTruncation<'_>> {
    HankelTruncation::new(table, k)
}

/// Which determinant [`hankel_determinant`] returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeterminantVariant {
    /// `Delta_k = det G^{[k]}`.
    Plain,
    /// `theta_eta Delta_k`: the last row's moment indices raised by one.
    Derivative,
}

/// Determinant of `k` moment rows whose leading indices are `starts`.
pub(crate) fn row_determinant(table: &MomentTable, starts: &[usize]) -> Result<Float> {
    let k = starts.len();
    if k == 0 {
        return Ok(Float::with_val(table.prec(), 1));
    }
    let top = starts.iter().max().copied().unwrap_or(0) + k - 1;
    if top > table.m_max() {
        return Err(Error::IndexOutOfTable { needed: top, available: table.m_max() });
    }
    let values = table.values();
    Ok(Mat::from_fn(k, k, table.prec(), |i, j| values[starts[i] + j].clone()).determinant())
}

pub fn hankel_determinant(table: &MomentTable, k: usize, variant: DeterminantVariant) -> Result<Float> {
    let mut starts: Vec<usize> = (0..k).collect();
    match variant {
        DeterminantVariant::Plain => {}
        DeterminantVariant::Derivative => {
            if k == 0 {
                return Ok(Float::new(table.prec()));
            }
            starts[k - 1] += 1;
        }
    }
    row_determinant(table, &starts)
}

/// `G = S^{-1} H S^{-T}` with `S` lower unitriangular and `H` diagonal.
#[derive(Clone, Debug)]
pub struct CholeskyFactorization {
    s: Mat,
    h: Vec<Float>,
    condition_estimate: Float,
    confirmed_bits: Option<u32>,
    low_confidence: bool,
}

impl CholeskyFactorization {
    pub fn size(&self) -> usize {
        self.h.len()
    }

    pub fn s(&self) -> &Mat {
        &self.s
    }

    pub fn h(&self) -> &[Float] {
        &self.h
    }

    pub fn prec(&self) -> u32 {
        self.s.prec()
    }

    /// `||G||_max * ||G^{-1}||_max`, with `G^{-1} = S^T H^{-1} S`.
    pub fn condition_estimate(&self) -> &Float {
        &self.condition_estimate
    }

    /// Bits on which the doubled-precision recomputation agreed, if it was run.
    pub fn confirmed_bits(&self) -> Option<u32> {
        self.confirmed_bits
    }

    pub fn low_confidence(&self) -> bool {
        self.low_confidence
    }

    /// `S^{-1} H S^{-T}`.
    pub fn reconstruct(&self) -> Mat {
        let l = self.s.unit_lower_inverse();
        l.scale_cols(&self.h).mul(&l.transpose())
    }

    /// `p^d_m = S_{m, m-d}`; zero when `d > m`.
    pub fn coefficient(&self, d: usize, m: usize) -> Float {
        if d > m {
            Float::new(self.prec())
        } else {
            self.s[(m, m - d)].clone()
        }
    }

    /// Truncates to the leading `k x k` block (a valid factorization of `G^{[k]}`).
    pub fn leading(&self, k: usize) -> CholeskyFactorization {
        assert!(k <= self.size());
        CholeskyFactorization {
            s: self.s.leading(k, k),
            h: self.h[..k].to_vec(),
            condition_estimate: self.condition_estimate.clone(),
            confirmed_bits: self.confirmed_bits,
            low_confidence: self.low_confidence,
        }
    }
}

/// LDL^T without row exchanges; returns `(L, D)`.
fn ldl(g: &Mat, bits: u32) -> Result<(Mat, Vec<Float>)> {
    let k = g.rows();
    let prec = g.prec();
    let scale = g.max_abs();
    let floor = pow2(prec, -((bits / 2) as i64)) * &scale;
    let mut l = Mat::identity(k, prec);
    let mut d = vec![Float::new(prec); k];
    for j in 0..k {
        let mut dj = g[(j, j)].clone();
        for t in 0..j {
            let x = Float::with_val(prec, &l[(j, t)] * &l[(j, t)]);
            dj -= x * &d[t];
        }
        if *dj.as_abs() <= *floor.as_abs() {
            return Err(Error::SingularTruncation(j));
        }
        for i in j + 1..k {
            let mut acc = g[(i, j)].clone();
            for t in 0..j {
                let x = Float::with_val(prec, &l[(i, t)] * &l[(j, t)]);
                acc -= x * &d[t];
            }
            l[(i, j)].assign(acc / &dj);
        }
        d[j] = dj;
    }
    Ok((l, d))
}

/// Factorizes a symmetric matrix as `S^{-1} H S^{-T}` without pivoting.
pub fn factor_symmetric(g: &Mat, bits: u32) -> Result<(Mat, Vec<Float>)> {
    let (l, d) = ldl(g, bits)?;
    Ok((l.unit_lower_inverse(), d))
}

fn condition(g: &Mat, s: &Mat, h: &[Float]) -> Float {
    let inv_h: Vec<Float> = h.iter().map(|x| Float::with_val(x.prec(), 1u32 / x)).collect();
    let ginv = s.transpose().scale_cols(&inv_h).mul(s);
    g.max_abs() * ginv.max_abs()
}

fn factor(g: &HankelTruncation<'_>) -> Result<CholeskyFactorization> {
    let m = g.to_mat();
    let (s, h) = factor_symmetric(&m, g.table().prec())?;
    let condition_estimate = condition(&m, &s, &h);
    Ok(CholeskyFactorization { s, h, condition_estimate, confirmed_bits: None, low_confidence: false })
}

/// Relative agreement between two factorizations, in bits.
fn agreement_bits(a: &CholeskyFactorization, b: &CholeskyFactorization, cap: u32) -> u32 {
    let mut worst = cap;
    let k = a.size();
    let mut compare = |x: &Float, y: &Float, scale: &Float| {
        let diff = Float::with_val(y.prec(), x - y).abs();
        if diff.is_zero() || scale.is_zero() {
            return;
        }
        let rel = diff / scale;
        let bits = (-rel.log2()).to_f64().floor().clamp(0.0, cap as f64) as u32;
        worst = worst.min(bits);
    };
    for i in 0..k {
        compare(&a.h[i], &b.h[i], &b.h[i].clone().abs());
        let mut row_scale = Float::new(b.prec());
        for j in 0..=i {
            crate::precision::max_abs(&mut row_scale, &b.s[(i, j)]);
        }
        for j in 0..i {
            compare(&a.s[(i, j)], &b.s[(i, j)], &row_scale);
        }
    }
    worst
}

/// Cholesky factorization of a Hankel truncation. The factorization is repeated
/// from freshly summed moments at `ctx.verify_bits`; agreement below
/// `mantissa_bits - 64` bits marks the result low-confidence.
pub fn cholesky(g: &HankelTruncation<'_>, ctx: &PrecisionContext) -> Result<CholeskyFactorization> {
    let mut f = factor(g)?;
    let wide_ctx = ctx.doubled();
    let wide_table = MomentTable::build(g.table().weight(), 2 * g.size().saturating_sub(1), &wide_ctx)?;
    let wide = factor(&HankelTruncation::new(&wide_table, g.size())?)?;
    let bits = agreement_bits(&f, &wide, ctx.mantissa_bits);
    f.confirmed_bits = Some(bits);
    f.low_confidence = bits + 64 < ctx.mantissa_bits;
    Ok(f)
}

/// Cholesky factorization without the confirmation pass, for inner loops such as
/// finite differences.
pub fn cholesky_unverified(g: &HankelTruncation<'_>) -> Result<CholeskyFactorization> {
    factor(g)
}
