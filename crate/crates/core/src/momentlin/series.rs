//! Moment series `rho_m = sum_k k^m w(k)` with a rigorous geometric tail bound.
//!
//! Terms are summed in increasing `k`. After term `k` the remaining tail of a
//! series whose terms grow at most like `(j+1)^d |w(j)|` is bounded by
//! `t_{k+1} / (1 - r)` with `r = ((k+2)/(k+1))^d * R`, where `R` bounds the
//! weight ratio `|w(j+1)/w(j)|` for `j > k`. Summation stops once that bound
//! falls below `series_tol` times the reference magnitude.

use std::io::Write;

use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::hyperweight::{ConvergenceClass, HypergeometricWeight};
use crate::precision::{fmt_float, PrecisionContext};

/// Walks `w(0), w(1), ...` through the term ratio and answers tail-bound queries.
struct TermWalker<'a> {
    weight: &'a HypergeometricWeight,
    prec: u32,
    k: u64,
    /// `w(k)`.
    current: Float,
    /// `|w(k+1)/w(k)|` and `|w(k+2)/w(k+1)|`.
    ratios: [Float; 2],
    limit: Float,
    k_min: u64,
}

impl<'a> TermWalker<'a> {
    fn new(weight: &'a HypergeometricWeight, prec: u32) -> Self {
        let limit = match weight.deformation() {
            Some(d) if d.eta2.clone().abs() < 1 || d.eta3.clone().abs() < 1 => Float::new(prec),
            _ if weight.m() == weight.n() + 1 => Float::with_val(prec, weight.eta()).abs(),
            _ => Float::new(prec),
        };
        let mut biggest = Float::with_val(prec, 1);
        for p in weight.a().iter().chain(weight.b()) {
            let v = Float::with_val(prec, p).abs();
            if v > biggest {
                biggest = v;
            }
        }
        let k_min = (biggest * 2u32).ceil().to_f64() as u64 + 2;
        let r0 = weight.weight_ratio(0, prec).abs();
        let r1 = weight.weight_ratio(1, prec).abs();
        Self { weight, prec, k: 0, current: Float::with_val(prec, 1), ratios: [r0, r1], limit, k_min }
    }

    /// Moves from `w(k)` to `w(k+1)`.
    fn advance(&mut self) {
        let signed = self.weight.weight_ratio(self.k, self.prec);
        self.current *= signed;
        self.k += 1;
        let next = self.weight.weight_ratio(self.k + 1, self.prec).abs();
        let [_, r1] = std::mem::replace(&mut self.ratios, [Float::new(self.prec), Float::new(self.prec)]);
        self.ratios = [r1, next];
    }

    /// `|w(k+1)|`, the first weight of the tail.
    fn next_weight(&self) -> Float {
        Float::with_val(self.prec, &self.current * &self.ratios[0]).abs()
    }

    /// Bound on the tail after term `k` for terms majorized by `(j+1)^d |w(j)|`,
    /// or `None` if no geometric bound is available yet.
    fn tail_bound(&self, d: u32) -> Option<Float> {
        let next = self.next_weight();
        if next.is_zero() {
            return Some(next);
        }
        if self.k + 1 < self.k_min {
            return None;
        }
        let mut r = self.ratios[0].clone();
        if self.ratios[1] > r {
            r.assign(&self.ratios[1]);
        }
        if self.limit > r {
            r.assign(&self.limit);
        }
        let growth = Float::with_val(self.prec, self.k + 3) / Float::with_val(self.prec, self.k + 2);
        r *= growth.pow(d);
        if r >= 1 {
            return None;
        }
        let first = next * Float::with_val(self.prec, self.k + 2).pow(d);
        let one_minus = Float::with_val(self.prec, 1u32 - &r);
        Some(first / one_minus)
    }
}

fn ensure_convergent(weight: &HypergeometricWeight) -> Result<()> {
    if weight.classify_convergence() == ConvergenceClass::Divergent {
        return Err(Error::DivergentSeries { weight: weight.to_string() });
    }
    Ok(())
}

/// `sum_k f(k) w(k)` where `|f(k)| <= bound * (k+1)^degree`. The series stops when
/// the tail falls below `series_tol` times the sum of absolute terms so far.
pub fn weighted_sum(
    weight: &HypergeometricWeight,
    ctx: &PrecisionContext,
    degree: u32,
    bound: &Float,
    mut f: impl FnMut(u64) -> Float,
) -> Result<Float> {
    ensure_convergent(weight)?;
    let prec = ctx.mantissa_bits;
    let mut walker = TermWalker::new(weight, prec);
    let mut sum = Float::new(prec);
    let mut reference = Float::new(prec);
    for _ in 0..ctx.max_terms {
        let term = Float::with_val(prec, f(walker.k) * &walker.current);
        reference += &*term.as_abs();
        sum += &term;
        if let Some(tail) = walker.tail_bound(degree) {
            let tail = tail * bound;
            if tail.is_zero() || tail <= Float::with_val(prec, &ctx.series_tol * &reference) {
                return Ok(sum);
            }
        }
        walker.advance();
    }
    Err(Error::TermBudgetExceeded { budget: ctx.max_terms })
}

/// A single moment `rho_m`.
pub fn moment(weight: &HypergeometricWeight, m: u32, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.mantissa_bits;
    let one = Float::with_val(prec, 1);
    weighted_sum(weight, ctx, m, &one, |k| Float::with_val(prec, k).pow(m))
}

/// Moments `rho_0 ..= rho_{m_max}` of one weight, computed in a single pass.
#[derive(Clone, Debug)]
pub struct MomentTable {
    weight: HypergeometricWeight,
    values: Vec<Float>,
    prec: u32,
    terms: u64,
}

impl MomentTable {
    pub fn build(weight: &HypergeometricWeight, m_max: usize, ctx: &PrecisionContext) -> Result<Self> {
        ctx.validate()?;
        ensure_convergent(weight)?;
        let prec = ctx.mantissa_bits;
        let mut walker = TermWalker::new(weight, prec);
        let mut values = vec![Float::new(prec); m_max + 1];
        let mut abs_sums = vec![Float::new(prec); m_max + 1];
        for _ in 0..ctx.max_terms {
            let kf = Float::with_val(prec, walker.k);
            let mut term = walker.current.clone();
            for m in 0..=m_max {
                if m > 0 {
                    term *= &kf;
                }
                values[m] += &term;
                abs_sums[m] += &*term.as_abs();
            }
            let done = (0..=m_max).all(|m| match walker.tail_bound(m as u32) {
                Some(t) => t.is_zero() || t <= Float::with_val(prec, &ctx.series_tol * &abs_sums[m]),
                None => false,
            });
            if done {
                return Ok(Self { weight: weight.clone(), values, prec, terms: walker.k + 1 });
            }
            walker.advance();
        }
        Err(Error::TermBudgetExceeded { budget: ctx.max_terms })
    }

    pub fn weight(&self) -> &HypergeometricWeight {
        &self.weight
    }

    pub fn m_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Number of series terms that were summed.
    pub fn terms_used(&self) -> u64 {
        self.terms
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn get(&self, m: usize) -> Result<&Float> {
        self.values.get(m).ok_or(Error::IndexOutOfTable { needed: m, available: self.m_max() })
    }

    /// `theta_1^{o1} theta_2^{o2} theta_3^{o3} rho_m`, which is the moment with index
    /// raised by `o1 + 2 o2 + 3 o3`.
    pub fn moment_flow_shifted(&self, m: usize, d: super::FlowMultiIndex) -> Result<&Float> {
        self.get(m + d.shift())
    }

    /// Support size when the weight has finite support.
    pub fn support(&self) -> Option<u64> {
        match self.weight.classify_convergence() {
            ConvergenceClass::FiniteSupport(q) => Some(q + 1),
            _ => None,
        }
    }

    /// Writes `m,rho_m` rows at full precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["m", "rho_m"]).map_err(csv_err)?;
        for (m, v) in self.values.iter().enumerate() {
            wtr.write_record([m.to_string(), fmt_float(v)]).map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn close(a: &Float, b: &Float, rel: f64) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        d <= b.clone().abs() * rel
    }

    #[test]
    fn trivial_moments() {
        let ctx = PrecisionContext::new(256);
        let c0 = HypergeometricWeight::charlier(q(0, 1));
        assert_eq!(moment(&c0, 0, &ctx).unwrap(), 1);
        let mx = HypergeometricWeight::meixner(q(1, 1), q(1, 2));
        assert!(close(&moment(&mx, 0, &ctx).unwrap(), &Float::with_val(256, 2), 1e-60));
    }

    #[test]
    fn charlier_at_one_is_e() {
        let ctx = PrecisionContext::new(512);
        let e = Float::with_val(512, 1).exp();
        let rho = moment(&HypergeometricWeight::charlier(q(1, 1)), 0, &ctx).unwrap();
        assert!(close(&rho, &e, 1e-140));
    }

    #[test]
    fn table_agrees_with_single_moments() {
        let ctx = PrecisionContext::new(256);
        let w = HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(1, 3)).unwrap();
        let t = MomentTable::build(&w, 10, &ctx).unwrap();
        for m in 0..=10 {
            assert!(close(t.get(m).unwrap(), &moment(&w, m as u32, &ctx).unwrap(), 1e-60));
        }
        assert!(matches!(t.get(11), Err(Error::IndexOutOfTable { needed: 11, available: 10 })));
    }

    #[test]
    fn finite_support_sums_exactly() {
        let ctx = PrecisionContext::new(128);
        let w = HypergeometricWeight::meixner(q(-3, 1), q(1, 2));
        let t = MomentTable::build(&w, 4, &ctx).unwrap();
        assert_eq!(t.terms_used(), 4);
        // (1 - 1/2)^3 from the binomial theorem.
        assert_eq!(*t.get(0).unwrap(), Float::with_val(128, 0.125));
    }

    #[test]
    fn meixner_half_converges() {
        let ctx = PrecisionContext::new(256);
        let w = HypergeometricWeight::meixner(q(2, 1), q(1, 2));
        let t = MomentTable::build(&w, 12, &ctx).unwrap();
        assert!(close(t.get(0).unwrap(), &Float::with_val(256, 4), 1e-60));
        // rho_1 = a eta / (1 - eta)^(a+1)
        assert!(close(t.get(1).unwrap(), &Float::with_val(256, 8), 1e-60));
    }

    #[test]
    fn divergent_is_an_error() {
        let w = HypergeometricWeight::meixner(q(1, 1), q(2, 1));
        let ctx = PrecisionContext::new(128);
        assert!(matches!(moment(&w, 0, &ctx), Err(Error::DivergentSeries { .. })));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut ctx = PrecisionContext::new(128);
        ctx.max_terms = 5;
        let w = HypergeometricWeight::meixner(q(1, 1), q(9, 10));
        assert!(matches!(moment(&w, 0, &ctx), Err(Error::TermBudgetExceeded { budget: 5 })));
    }

    #[test]
    fn csv_export() {
        let ctx = PrecisionContext::new(128);
        let t = MomentTable::build(&HypergeometricWeight::charlier(q(0, 1)), 2, &ctx).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "m,rho_m");
        assert!(lines[1].starts_with("0,1"));
        assert_eq!(lines.len(), 4);
    }
}
