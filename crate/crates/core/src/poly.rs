//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;

use rug::{Float, Rational};

/// Coefficients in ascending order; trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Self::new(vec![Rational::new(), Rational::from(1)])
    }

    /// `z + c`.
    pub fn linear(c: Rational) -> Self {
        Self::new(vec![c, Rational::from(1)])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    /// `p(z + s)` by repeated synthetic division.
    pub fn shifted(&self, s: &Rational) -> Poly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = Rational::from(&c[j + 1] * s);
                c[j] += t;
            }
        }
        Poly::new(c)
    }

    pub fn eval_rational(&self, z: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    /// Horner evaluation at the precision of `z`.
    pub fn eval(&self, z: &Float) -> Float {
        let mut acc = Float::new(z.prec());
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn product_and_eval() {
        let p = Poly::z().mul(&Poly::linear(q(3, 2)));
        assert_eq!(p.coeffs(), &[q(0, 1), q(3, 2), q(1, 1)]);
        assert_eq!(p.eval_rational(&q(2, 1)), q(7, 1));
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn shift_matches_substitution() {
        let p = Poly::new(vec![q(1, 1), q(-2, 1), q(0, 1), q(5, 3)]);
        let s = q(-1, 2);
        let ps = p.shifted(&s);
        for z in [-3, 0, 2, 7] {
            let z = q(z, 1);
            assert_eq!(ps.eval_rational(&z), p.eval_rational(&Rational::from(&z + &s)));
        }
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Poly::new(vec![q(1, 1), q(0, 1)]);
        assert_eq!(p.degree(), 0);
        assert!(Poly::new(vec![q(0, 1)]).is_zero());
    }
}
