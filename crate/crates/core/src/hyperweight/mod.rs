//! Hypergeometric Pearson weights.
//!
//! A weight is `w(k) = prod (a_i)_k * eta^k * eta2^(k^2) * eta3^(k^3) / (k! prod (b_j)_k)`
//! on the nonnegative integers. Without deformation it satisfies the discrete
//! Pearson equation `theta(k+1) w(k+1) = sigma(k) w(k)`.

mod grammar;

pub use grammar::parse_number;

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Toda/KP deformation parameters `(eta2, eta3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deformation {
    pub eta2: Rational,
    pub eta3: Rational,
}

impl Deformation {
    pub fn is_trivial(&self) -> bool {
        self.eta2 == 1 && self.eta3 == 1
    }
}

/// A weight given by its upper parameters `a`, lower parameters `b` and `eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergeometricWeight {
    a: Vec<Rational>,
    b: Vec<Rational>,
    eta: Rational,
    deformation: Option<Deformation>,
}

/// How the moment series of a weight behaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceClass {
    /// `M <= N`: converges for every `eta`.
    AllEta,
    /// Some `a_i = -q`; the weight lives on `0..=q`.
    FiniteSupport(u64),
    /// `M = N + 1` and `|eta| < 1`.
    UnitDisk,
    /// `M = N + 1`, `|eta| = 1` and `sum b - sum a > 0`.
    Boundary,
    Divergent,
}

impl ConvergenceClass {
    pub fn is_convergent(self) -> bool {
        !matches!(self, ConvergenceClass::Divergent)
    }
}

/// Parameter shift selector. Indices are zero-based; `Display` shows them one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shift {
    /// `a_i -> a_i + 1`.
    A(usize),
    /// `b_j -> b_j - 1`.
    B(usize),
    /// Every `a_i` and `b_j` raised by one.
    Total,
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shift::A(i) => write!(f, "A{}", i + 1),
            Shift::B(j) => write!(f, "B{}", j + 1),
            Shift::Total => write!(f, "T"),
        }
    }
}

impl std::str::FromStr for Shift {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("t") || s.eq_ignore_ascii_case("total") {
            return Ok(Shift::Total);
        }
        let (kind, rest) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let idx: usize = rest
            .trim_matches(|c| c == '(' || c == ')')
            .parse()
            .map_err(|_| Error::Parse(format!("bad shift `{s}`")))?;
        if idx == 0 {
            return Err(Error::Parse(format!("shift indices are 1-based: `{s}`")));
        }
        match kind {
            "A" | "a" => Ok(Shift::A(idx - 1)),
            "B" | "b" => Ok(Shift::B(idx - 1)),
            _ => Err(Error::Parse(format!("bad shift `{s}`"))),
        }
    }
}

/// `theta(z) = z prod (z + b_j - 1)` and `sigma(z) = eta prod (z + a_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PearsonPolynomials {
    pub theta: Poly,
    pub sigma: Poly,
}

impl PearsonPolynomials {
    pub fn theta_degree(&self) -> usize {
        self.theta.degree()
    }

    pub fn sigma_degree(&self) -> usize {
        self.sigma.degree()
    }
}

/// `alpha (alpha + 1) ... (alpha + k - 1)`, exactly.
pub fn pochhammer(alpha: &Rational, k: u32) -> Rational {
    let mut acc = Rational::from(1);
    let mut x = alpha.clone();
    for _ in 0..k {
        acc *= &x;
        x += 1;
    }
    acc
}

/// Rising factorial at the precision of `alpha`.
pub fn pochhammer_real(alpha: &Float, k: u32) -> Float {
    let mut acc = Float::with_val(alpha.prec(), 1);
    let mut x = alpha.clone();
    for _ in 0..k {
        acc *= &x;
        x += 1;
    }
    acc
}

fn is_nonpositive_integer(x: &Rational) -> bool {
    *x.denom() == 1 && *x <= 0
}

impl HypergeometricWeight {
    pub fn new(a: Vec<Rational>, b: Vec<Rational>, eta: Rational) -> Result<Self> {
        if let Some(j) = b.iter().position(is_nonpositive_integer) {
            return Err(Error::Precondition(format!("b_{} = {} is a nonpositive integer", j + 1, b[j])));
        }
        Ok(Self { a, b, eta, deformation: None })
    }

    /// Attaches Toda/KP deformation parameters.
    pub fn with_deformation(mut self, eta2: Rational, eta3: Rational) -> Result<Self> {
        if eta2.clone().abs() > 1 || eta3.clone().abs() > 1 {
            return Err(Error::Precondition("deformation parameters must satisfy |eta2|, |eta3| <= 1".into()));
        }
        let d = Deformation { eta2, eta3 };
        if d.is_trivial() {
            self.deformation = None;
            return Ok(self);
        }
        self.deformation = Some(d);
        Ok(self)
    }

    pub fn charlier(eta: Rational) -> Self {
        Self::new(Vec::new(), Vec::new(), eta).expect("no lower parameters")
    }

    pub fn meixner(a: Rational, eta: Rational) -> Self {
        Self::new(vec![a], Vec::new(), eta).expect("no lower parameters")
    }

    pub fn generalized_charlier(b: Rational, eta: Rational) -> Result<Self> {
        Self::new(Vec::new(), vec![b], eta)
    }

    pub fn generalized_meixner(a: Rational, b: Rational, eta: Rational) -> Result<Self> {
        Self::new(vec![a], vec![b], eta)
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn eta(&self) -> &Rational {
        &self.eta
    }

    /// Number of upper parameters.
    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// Number of lower parameters.
    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn deformation(&self) -> Option<&Deformation> {
        self.deformation.as_ref()
    }

    pub fn is_deformed(&self) -> bool {
        self.deformation.is_some()
    }

    /// `eta_l` for flow `l` in `1..=3`; undeformed flows report 1.
    pub fn flow_parameter(&self, l: usize) -> Rational {
        match (l, &self.deformation) {
            (1, _) => self.eta.clone(),
            (2, Some(d)) => d.eta2.clone(),
            (3, Some(d)) => d.eta3.clone(),
            _ => Rational::from(1),
        }
    }

    /// Copy with flow parameter `eta_l` replaced. No validation of the deformation
    /// bound is done here, so callers may probe slightly outside it.
    pub fn with_flow_parameter(&self, l: usize, value: Rational) -> Self {
        let mut w = self.clone();
        match l {
            1 => w.eta = value,
            2 | 3 => {
                let mut d =
                    w.deformation.take().unwrap_or(Deformation { eta2: Rational::from(1), eta3: Rational::from(1) });
                if l == 2 {
                    d.eta2 = value;
                } else {
                    d.eta3 = value;
                }
                w.deformation = if d.is_trivial() { None } else { Some(d) };
            }
            _ => panic!("flow index {l} outside 1..=3"),
        }
        w
    }

    pub fn with_eta(&self, eta: Rational) -> Self {
        self.with_flow_parameter(1, eta)
    }

    /// Undeformed copy.
    pub fn base(&self) -> Self {
        let mut w = self.clone();
        w.deformation = None;
        w
    }

    /// `prod a_i / prod b_j`.
    pub fn kappa(&self) -> Rational {
        let mut k = Rational::from(1);
        for a in &self.a {
            k *= a;
        }
        for b in &self.b {
            k /= b;
        }
        k
    }

    /// `w(k)` at `prec` bits.
    pub fn weight_value(&self, k: u64, prec: u32) -> Result<Float> {
        let kk = u32::try_from(k).map_err(|_| Error::Precondition("k too large".into()))?;
        let mut w = Float::with_val(prec, 1);
        for a in &self.a {
            w *= pochhammer_real(&Float::with_val(prec, a), kk);
        }
        for (j, b) in self.b.iter().enumerate() {
            let p = pochhammer_real(&Float::with_val(prec, b), kk);
            if p.is_zero() {
                return Err(Error::UndefinedWeight { index: j + 1, k });
            }
            w /= p;
        }
        w *= Float::with_val(prec, &self.eta).pow(kk);
        w /= Float::with_val(prec, Float::factorial(kk));
        if let Some(d) = &self.deformation {
            let k = Integer::from(k);
            let k2 = Integer::from(&k * &k);
            let k3 = Integer::from(&k2 * &k);
            w *= Float::with_val(prec, &d.eta2).pow(&k2);
            w *= Float::with_val(prec, &d.eta3).pow(&k3);
        }
        Ok(w)
    }

    /// Exact `w(k)` for small `k`.
    pub fn weight_exact(&self, k: u32) -> Result<Rational> {
        let mut w = Rational::from(1);
        for a in &self.a {
            w *= pochhammer(a, k);
        }
        for (j, b) in self.b.iter().enumerate() {
            let p = pochhammer(b, k);
            if p == 0 {
                return Err(Error::UndefinedWeight { index: j + 1, k: k.into() });
            }
            w /= p;
        }
        w *= self.eta.clone().pow(k);
        w /= Integer::from(Integer::factorial(k));
        if let Some(d) = &self.deformation {
            w *= d.eta2.clone().pow(k * k);
            w *= d.eta3.clone().pow(k * k * k);
        }
        Ok(w)
    }

    /// Ratio `w(k+1) / w(k)` as a float, assuming `w(k) != 0`.
    pub(crate) fn weight_ratio(&self, k: u64, prec: u32) -> Float {
        let kf = Float::with_val(prec, k);
        let mut r = Float::with_val(prec, &self.eta);
        for a in &self.a {
            r *= Float::with_val(prec, a + &kf);
        }
        for b in &self.b {
            r /= Float::with_val(prec, b + &kf);
        }
        r /= Float::with_val(prec, &kf + 1u32);
        if let Some(d) = &self.deformation {
            let k = Integer::from(k);
            let e2 = Integer::from(2u32 * &k) + 1u32;
            let e3 = Integer::from(&k * &k) * 3u32 + Integer::from(3u32 * &k) + 1u32;
            r *= Float::with_val(prec, &d.eta2).pow(&e2);
            r *= Float::with_val(prec, &d.eta3).pow(&e3);
        }
        r
    }

    /// `theta(k+1) w(k+1) - sigma(k) w(k)`.
    pub fn pearson_residual(&self, k: u64, prec: u32) -> Result<Float> {
        if self.is_deformed() {
            return Err(Error::Precondition("the Pearson equation holds only for undeformed weights".into()));
        }
        let (lhs, rhs) = self.pearson_sides(k, prec)?;
        Ok(lhs - rhs)
    }

    pub(crate) fn pearson_sides(&self, k: u64, prec: u32) -> Result<(Float, Float)> {
        let p = self.pearson_polynomials();
        let kf = Float::with_val(prec, k);
        let lhs = p.theta.eval(&Float::with_val(prec, &kf + 1u32)) * self.weight_value(k + 1, prec)?;
        let rhs = p.sigma.eval(&kf) * self.weight_value(k, prec)?;
        Ok((lhs, rhs))
    }

    pub fn classify_convergence(&self) -> ConvergenceClass {
        let finite = self
            .a
            .iter()
            .filter(|a| is_nonpositive_integer(a))
            .map(|a| Integer::from(-a.numer()).to_u64().unwrap_or(u64::MAX))
            .min();
        if let Some(q) = finite {
            return ConvergenceClass::FiniteSupport(q);
        }
        if let Some(d) = &self.deformation {
            if d.eta2.clone().abs() < 1 || d.eta3.clone().abs() < 1 {
                return ConvergenceClass::AllEta;
            }
        }
        let (m, n) = (self.m(), self.n());
        if m <= n {
            return ConvergenceClass::AllEta;
        }
        if self.eta == 0 {
            return ConvergenceClass::FiniteSupport(0);
        }
        if m > n + 1 {
            return ConvergenceClass::Divergent;
        }
        let abs_eta = self.eta.clone().abs();
        if abs_eta < 1 {
            return ConvergenceClass::UnitDisk;
        }
        if abs_eta == 1 {
            let excess: Rational = self.b.iter().sum::<Rational>() - self.a.iter().sum::<Rational>();
            if excess > 0 {
                return ConvergenceClass::Boundary;
            }
        }
        ConvergenceClass::Divergent
    }

    /// Constant paired with a shift: `a_i` for `A(i)`, `b_j - 1` for `B(j)`.
    pub fn shift_constant(&self, which: Shift) -> Result<Rational> {
        match which {
            Shift::A(i) => {
                self.a.get(i).cloned().ok_or_else(|| Error::InvalidShift(format!("no parameter a_{}", i + 1)))
            }
            Shift::B(j) => self
                .b
                .get(j)
                .map(|b| Rational::from(b - 1))
                .ok_or_else(|| Error::InvalidShift(format!("no parameter b_{}", j + 1))),
            Shift::Total => Ok(self.kappa()),
        }
    }

    pub fn shift_parameter(&self, which: Shift) -> Result<Self> {
        let mut w = self.clone();
        match which {
            Shift::A(i) => {
                let a = w.a.get_mut(i).ok_or_else(|| Error::InvalidShift(format!("no parameter a_{}", i + 1)))?;
                *a += 1;
            }
            Shift::B(j) => {
                let b = w.b.get_mut(j).ok_or_else(|| Error::InvalidShift(format!("no parameter b_{}", j + 1)))?;
                *b -= 1;
                if is_nonpositive_integer(b) {
                    return Err(Error::InvalidShift(format!("b_{} would become the nonpositive integer {}", j + 1, b)));
                }
            }
            Shift::Total => {
                for a in &mut w.a {
                    *a += 1;
                }
                for b in &mut w.b {
                    *b += 1;
                }
            }
        }
        Ok(w)
    }

    /// Shifts that are valid for this weight, excluding `Total`.
    pub fn single_shifts(&self) -> Vec<Shift> {
        let mut v: Vec<Shift> = (0..self.m()).map(Shift::A).collect();
        v.extend((0..self.n()).map(Shift::B));
        v.retain(|s| {
            self.shift_parameter(*s).map(|w| w.classify_convergence().is_convergent()).unwrap_or(false)
                && self.shift_constant(*s).map(|c| c != 0).unwrap_or(false)
        });
        v
    }

    pub fn pearson_polynomials(&self) -> PearsonPolynomials {
        let mut theta = Poly::z();
        for b in &self.b {
            theta = theta.mul(&Poly::linear(Rational::from(b - 1)));
        }
        let mut sigma = Poly::constant(self.eta.clone());
        for a in &self.a {
            sigma = sigma.mul(&Poly::linear(a.clone()));
        }
        PearsonPolynomials { theta, sigma }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(pochhammer(&q(7, 3), 0), 1);
        assert_eq!(pochhammer(&q(3, 1), 4), 360);
        assert_eq!(pochhammer(&q(-2, 1), 4), 0);
        assert_eq!(pochhammer_real(&Float::with_val(64, 3), 4), 360);
    }

    #[test]
    fn weight_values() {
        let c = HypergeometricWeight::charlier(q(1, 1));
        assert_eq!(c.weight_exact(3).unwrap(), q(1, 6));
        let m = HypergeometricWeight::meixner(q(2, 1), q(1, 2));
        assert_eq!(m.weight_value(2, 128).unwrap(), 0.75);
        let g = HypergeometricWeight::generalized_charlier(q(1, 1), q(2, 5)).unwrap();
        for k in 0..6u32 {
            let fact = Integer::from(Integer::factorial(k));
            let expect = q(2, 5).pow(k) / Rational::from(Integer::from(&fact * &fact));
            assert_eq!(g.weight_exact(k).unwrap(), expect);
        }
    }

    #[test]
    fn float_weight_matches_exact() {
        let w = HypergeometricWeight::new(vec![q(3, 2), q(1, 3)], vec![q(5, 2)], q(1, 3))
            .unwrap()
            .with_deformation(q(9, 10), q(4, 5))
            .unwrap();
        for k in 0..8u32 {
            let exact = Float::with_val(256, &w.weight_exact(k).unwrap());
            let f = w.weight_value(k.into(), 256).unwrap();
            let diff = Float::with_val(256, &f - &exact).abs();
            assert!(diff <= exact.abs() * Float::with_val(256, 1e-70));
        }
    }

    #[test]
    fn ratio_matches_consecutive_values() {
        let w = HypergeometricWeight::new(vec![q(3, 2)], vec![q(5, 2)], q(1, 3))
            .unwrap()
            .with_deformation(q(9, 10), q(9, 10))
            .unwrap();
        for k in 0..6u64 {
            let r = w.weight_ratio(k, 256);
            let exact = w.weight_value(k + 1, 256).unwrap() / w.weight_value(k, 256).unwrap();
            let diff = Float::with_val(256, &r - &exact).abs();
            assert!(diff < 1e-70);
        }
    }

    #[test]
    fn pearson_holds_for_undeformed() {
        for w in [
            HypergeometricWeight::charlier(q(7, 10)),
            HypergeometricWeight::meixner(q(3, 2), q(1, 3)),
            HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(1, 3)).unwrap(),
        ] {
            for k in 0..20u32 {
                let p = w.pearson_polynomials();
                let lhs = p.theta.eval_rational(&q(k as i64 + 1, 1)) * w.weight_exact(k + 1).unwrap();
                let rhs = p.sigma.eval_rational(&q(k as i64, 1)) * w.weight_exact(k).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn pearson_rejects_deformed() {
        let w = HypergeometricWeight::charlier(q(1, 2)).with_deformation(q(9, 10), q(1, 1)).unwrap();
        assert!(matches!(w.pearson_residual(1, 128), Err(Error::Precondition(_))));
    }

    #[test]
    fn classification_cases() {
        let gm = HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(7, 1)).unwrap();
        assert_eq!(gm.classify_convergence(), ConvergenceClass::AllEta);
        let fs = HypergeometricWeight::meixner(q(-3, 1), q(1, 2));
        assert_eq!(fs.classify_convergence(), ConvergenceClass::FiniteSupport(3));
        let dv = HypergeometricWeight::meixner(q(1, 2), q(2, 1));
        assert_eq!(dv.classify_convergence(), ConvergenceClass::Divergent);
        let ud = HypergeometricWeight::meixner(q(1, 2), q(1, 2));
        assert_eq!(ud.classify_convergence(), ConvergenceClass::UnitDisk);
        let bd = HypergeometricWeight::new(vec![q(1, 2), q(1, 3)], vec![q(2, 1)], q(1, 1)).unwrap();
        assert_eq!(bd.classify_convergence(), ConvergenceClass::Boundary);
        let bd_fail = HypergeometricWeight::new(vec![q(2, 1), q(1, 1)], vec![q(2, 1)], q(-1, 1)).unwrap();
        assert_eq!(bd_fail.classify_convergence(), ConvergenceClass::Divergent);
        let deformed = HypergeometricWeight::new(vec![q(1, 1), q(1, 1), q(1, 1)], vec![], q(3, 1))
            .unwrap()
            .with_deformation(q(1, 2), q(1, 2))
            .unwrap();
        assert_eq!(deformed.classify_convergence(), ConvergenceClass::AllEta);
    }

    #[test]
    fn shifts() {
        let w = HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(1, 3)).unwrap();
        let a = w.shift_parameter(Shift::A(0)).unwrap();
        assert_eq!(a.a(), &[q(5, 2)]);
        assert_eq!(a.b(), &[q(5, 2)]);
        let b = w.shift_parameter(Shift::B(0)).unwrap();
        assert_eq!(b.b(), &[q(3, 2)]);
        let t = HypergeometricWeight::generalized_meixner(q(1, 1), q(2, 1), q(1, 3))
            .unwrap()
            .shift_parameter(Shift::Total)
            .unwrap();
        assert_eq!((t.a(), t.b()), (&[q(2, 1)][..], &[q(3, 1)][..]));
        let bad = HypergeometricWeight::generalized_charlier(q(1, 1), q(1, 2)).unwrap();
        assert!(matches!(bad.shift_parameter(Shift::B(0)), Err(Error::InvalidShift(_))));
        assert!(matches!(w.shift_parameter(Shift::A(3)), Err(Error::InvalidShift(_))));
    }

    #[test]
    fn shift_labels_round_trip() {
        for s in [Shift::A(0), Shift::B(2), Shift::Total] {
            assert_eq!(s.to_string().parse::<Shift>().unwrap(), s);
        }
    }

    #[test]
    fn pearson_polynomial_shapes() {
        let c = HypergeometricWeight::charlier(q(7, 10)).pearson_polynomials();
        assert_eq!(c.theta, Poly::z());
        assert_eq!(c.sigma, Poly::constant(q(7, 10)));
        let gm = HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(1, 3)).unwrap().pearson_polynomials();
        assert_eq!(gm.theta.coeffs(), &[q(0, 1), q(3, 2), q(1, 1)]);
        assert_eq!(gm.sigma.coeffs(), &[q(1, 2), q(1, 3)]);
        let gc = HypergeometricWeight::generalized_charlier(q(2, 1), q(1, 4)).unwrap().pearson_polynomials();
        assert_eq!(gc.theta.coeffs(), &[q(0, 1), q(1, 1), q(1, 1)]);
        assert_eq!(gc.sigma.coeffs(), &[q(1, 4)]);
    }
}
