//! Truncated Taylor series in the three flow variables.
//!
//! With `eta_l = exp(t_l)` the operator `theta_l` is `d/dt_l`, so a function's
//! mixed flow derivatives are its Taylor coefficients times `alpha!`. A jet keeps
//! the coefficients on a down-closed set of multi-indices; products and the
//! logarithm stay exact on such a set.

use std::collections::BTreeSet;

use rug::{Assign, Float, Integer};

use super::tau::{FlowMultiIndex, TauEngine};
use crate::error::Result;

pub type Multi = [u32; 3];

fn factorial_product(a: Multi) -> Integer {
    a.iter().map(|&x| Integer::from(Integer::factorial(x))).fold(Integer::from(1), |acc, f| acc * f)
}

fn leq(a: &Multi, b: &Multi) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Down-closure of a set of multi-indices, sorted.
pub fn down_closure(generators: &[Multi]) -> Vec<Multi> {
    let mut set = BTreeSet::new();
    for g in generators {
        for i in 0..=g[0] {
            for j in 0..=g[1] {
                for l in 0..=g[2] {
                    set.insert([i, j, l]);
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Taylor coefficients indexed by a down-closed support.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    support: Vec<Multi>,
    coeffs: Vec<Float>,
}

impl Jet {
    pub fn zero(support: &[Multi], prec: u32) -> Self {
        Self { support: support.to_vec(), coeffs: vec![Float::new(prec); support.len()] }
    }

    /// Builds a jet from derivative values `theta^alpha f`.
    pub fn from_derivatives(support: &[Multi], prec: u32, mut f: impl FnMut(Multi) -> Result<Float>) -> Result<Self> {
        let mut jet = Self::zero(support, prec);
        for (i, a) in support.iter().enumerate() {
            jet.coeffs[i] = f(*a)? / factorial_product(*a);
        }
        Ok(jet)
    }

    pub fn support(&self) -> &[Multi] {
        &self.support
    }

    fn position(&self, a: &Multi) -> Option<usize> {
        self.support.binary_search(a).ok()
    }

    pub fn coefficient(&self, a: Multi) -> Option<&Float> {
        self.position(&a).map(|i| &self.coeffs[i])
    }

    /// `theta^alpha` of the function at the expansion point.
    pub fn derivative(&self, a: Multi) -> Float {
        let c = self.coefficient(a).unwrap_or_else(|| panic!("multi-index {a:?} outside jet support"));
        Float::with_val(c.prec(), c * factorial_product(a))
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let prec = self.coeffs[0].prec();
        let mut out = Jet::zero(&self.support, prec);
        for (i, a) in self.support.iter().enumerate() {
            for (j, b) in other.support.iter().enumerate() {
                let c = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                if let Some(p) = out.position(&c) {
                    out.coeffs[p] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let mut out = self.clone();
        for (i, c) in other.coeffs.iter().enumerate() {
            out.coeffs[i] += c;
        }
        out
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        let mut out = self.clone();
        for (i, c) in other.coeffs.iter().enumerate() {
            out.coeffs[i] -= c;
        }
        out
    }

    /// Natural logarithm (of the absolute value of the constant term).
    pub fn ln(&self) -> Jet {
        let prec = self.coeffs[0].prec();
        let a0 = self.coeffs[0].clone();
        let mut u = self.clone();
        for c in &mut u.coeffs {
            *c /= &a0;
        }
        u.coeffs[0].assign(0);
        let degree = self.support.iter().map(|a| a.iter().sum::<u32>()).max().unwrap_or(0);
        let mut out = Jet::zero(&self.support, prec);
        out.coeffs[0] = a0.abs().ln();
        let mut power = u.clone();
        for j in 1..=degree {
            let sign: i32 = if j % 2 == 1 { 1 } else { -1 };
            for (i, c) in power.coeffs.iter().enumerate() {
                out.coeffs[i] += Float::with_val(prec, c * sign) / j;
            }
            power = power.mul(&u);
        }
        out
    }
}

/// Jet of `log tau_k` over the down-closure of `generators`.
pub fn log_tau_jet(engine: &TauEngine<'_>, k: usize, generators: &[Multi]) -> Result<Jet> {
    let support = down_closure(generators);
    let prec = engine.table().prec();
    Jet::from_derivatives(&support, prec, |a| engine.tau_derivative(k, FlowMultiIndex::from_array(a))).map(|j| j.ln())
}

/// Whether `a` lies in the down-closure of `generators`.
pub fn covers(generators: &[Multi], a: &Multi) -> bool {
    generators.iter().any(|g| leq(a, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn closure_contains_all_lower_indices() {
        let s = down_closure(&[[2, 0, 1], [0, 1, 0]]);
        assert_eq!(s.len(), 7);
        assert!(s.contains(&[1, 0, 1]));
        assert!(!s.contains(&[1, 1, 0]));
        assert!(covers(&[[2, 0, 1]], &[2, 0, 0]));
    }

    #[test]
    fn log_of_exponential_series() {
        // f = exp(2 t1 + 3 t2) has derivatives 2^i 3^j f(0); log f = 2 t1 + 3 t2 + const.
        let support = down_closure(&[[3, 2, 0]]);
        let jet = Jet::from_derivatives(&support, 128, |a| {
            let v = Integer::from(2).pow(a[0]) * Integer::from(3).pow(a[1]) * 5u32;
            Ok(Float::with_val(128, v))
        })
        .unwrap();
        let l = jet.ln();
        assert_eq!(l.derivative([1, 0, 0]), 2);
        assert_eq!(l.derivative([0, 1, 0]), 3);
        for a in &support {
            if a.iter().sum::<u32>() >= 2 {
                assert!(l.derivative(*a).abs() < 1e-30, "{a:?}");
            }
        }
    }

    #[test]
    fn product_rule() {
        let support = down_closure(&[[2, 0, 0]]);
        // f = 1 + t, g = 1 + 2t  =>  fg = 1 + 3t + 2t^2, second derivative 4.
        let f =
            Jet::from_derivatives(&support, 64, |a| Ok(Float::with_val(64, if a[0] <= 1 { 1 } else { 0 }))).unwrap();
        let g = Jet::from_derivatives(&support, 64, |a| {
            Ok(Float::with_val(
                64,
                match a[0] {
                    0 => 1,
                    1 => 2,
                    _ => 0,
                },
            ))
        })
        .unwrap();
        let fg = f.mul(&g);
        assert_eq!(fg.derivative([1, 0, 0]), 3);
        assert_eq!(fg.derivative([2, 0, 0]), 4);
    }
}
