//! Working-precision settings and small helpers around [`rug::Float`].

use rug::{Assign, Float, Rational};

use crate::error::{Error, Result};

/// Default mantissa width in bits.
pub const DEFAULT_BITS: u32 = 512;

/// Precision settings threaded through every computation.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionContext {
    pub mantissa_bits: u32,
    /// Relative tail bound at which moment series stop.
    pub series_tol: Float,
    pub max_terms: usize,
    /// Precision used when a result is recomputed for confirmation.
    pub verify_bits: u32,
}

impl PrecisionContext {
    pub fn new(mantissa_bits: u32) -> Self {
        Self {
            mantissa_bits,
            series_tol: pow2(mantissa_bits, -(mantissa_bits as i64 - 32)),
            max_terms: 100_000,
            verify_bits: 2 * mantissa_bits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mantissa_bits < 64 {
            return Err(Error::Precondition(format!("mantissa_bits must be at least 64, got {}", self.mantissa_bits)));
        }
        if self.verify_bits <= self.mantissa_bits {
            return Err(Error::Precondition("verify_bits must exceed mantissa_bits".into()));
        }
        if self.series_tol <= 0 {
            return Err(Error::Precondition("series_tol must be positive".into()));
        }
        if self.max_terms == 0 {
            return Err(Error::Precondition("max_terms must be positive".into()));
        }
        Ok(())
    }

    /// The context used for confirmation runs: mantissa widened to `verify_bits`.
    pub fn doubled(&self) -> Self {
        let mut ctx = Self::new(self.verify_bits);
        ctx.max_terms = self.max_terms;
        ctx
    }

    pub fn bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn zero(&self) -> Float {
        Float::new(self.mantissa_bits)
    }

    pub fn one(&self) -> Float {
        Float::with_val(self.mantissa_bits, 1)
    }

    pub fn rational(&self, q: &Rational) -> Float {
        Float::with_val(self.mantissa_bits, q)
    }

    pub fn int(&self, v: i64) -> Float {
        Float::with_val(self.mantissa_bits, v)
    }

    /// Default check tolerance `2^-(bits/4)`.
    pub fn default_tolerance(&self) -> Float {
        pow2(self.mantissa_bits, -((self.mantissa_bits / 4) as i64))
    }

    /// Central-difference step `2^-(bits/4)`, exact.
    pub fn fd_step(&self) -> Rational {
        Rational::from((1, 1)) >> (self.mantissa_bits / 4)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(DEFAULT_BITS)
    }
}

/// `2^e` at the given precision.
pub fn pow2(prec: u32, e: i64) -> Float {
    let one = Float::with_val(prec, 1);
    if e >= 0 {
        one << (e as u32)
    } else {
        one >> ((-e) as u32)
    }
}

/// Full-precision decimal rendering that round-trips through [`parse_float`].
pub fn fmt_float(x: &Float) -> String {
    x.to_string_radix(10, None)
}

/// Decimal rendering with a fixed number of significant digits.
pub fn fmt_digits(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

pub fn parse_float(s: &str, prec: u32) -> Result<Float> {
    Float::parse(s).map(|p| Float::with_val(prec, p)).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

/// Tolerance literal: a decimal (`1e-40`) or a power of two (`2^-128`).
pub fn parse_tolerance(s: &str, prec: u32) -> Result<Float> {
    let s = s.trim();
    let t = match s.strip_prefix("2^") {
        Some(e) => pow2(
            prec,
            e.trim_matches(|c| c == '(' || c == ')')
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?,
        ),
        None => parse_float(s, prec)?,
    };
    if t.is_nan() || t <= 0 {
        return Err(Error::Parse(format!("tolerance must be positive, got `{s}`")));
    }
    Ok(t)
}

/// Raises `acc` to `|x|` if that is larger.
pub fn max_abs(acc: &mut Float, x: &Float) {
    let a = x.as_abs();
    if *a > *acc {
        acc.assign(&*a);
    }
}
