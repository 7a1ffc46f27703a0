//! Text form of a weight: `a=3/2,1; b=5/2; eta=1/3; eta2=0.9; eta3=0.9`.
//!
//! Numbers are rationals (`3/2`, `-4`) or decimals (`0.9`, `1e-3`), and are
//! stored exactly. Missing `a` or `b` means an empty list; `eta` is required.

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};

use super::HypergeometricWeight;
use crate::error::{Error, Result};

/// Parses a rational or decimal literal exactly.
pub fn parse_number(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if s.contains('/') {
        return s.parse::<Rational>().map_err(|_| Error::Parse(format!("bad rational `{s}`")));
    }
    let bad = || Error::Parse(format!("bad number `{s}`"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => {
            let e: i32 = s[p + 1..].parse().map_err(|_| bad())?;
            (&s[..p], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let numer: Integer = if all.is_empty() { Integer::new() } else { all.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i32;
    let mut q = Rational::from(numer);
    let power = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        q *= power;
    } else {
        q /= power;
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

fn parse_list(s: &str) -> Result<Vec<Rational>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_number).collect()
}

impl FromStr for HypergeometricWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut eta = None;
        let mut eta2 = None;
        let mut eta3 = None;
        for field in s.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) =
                field.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{field}`")))?;
            match key.trim() {
                "a" => a = parse_list(value)?,
                "b" => b = parse_list(value)?,
                "eta" => eta = Some(parse_number(value)?),
                "eta2" => eta2 = Some(parse_number(value)?),
                "eta3" => eta3 = Some(parse_number(value)?),
                other => return Err(Error::Parse(format!("unknown field `{other}`"))),
            }
        }
        let eta = eta.ok_or_else(|| Error::Parse("missing `eta`".into()))?;
        let w = HypergeometricWeight::new(a, b, eta)?;
        if eta2.is_some() || eta3.is_some() {
            w.with_deformation(eta2.unwrap_or_else(|| Rational::from(1)), eta3.unwrap_or_else(|| Rational::from(1)))
        } else {
            Ok(w)
        }
    }
}

fn join(v: &[Rational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for HypergeometricWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.a.is_empty() {
            parts.push(format!("a={}", join(&self.a)));
        }
        if !self.b.is_empty() {
            parts.push(format!("b={}", join(&self.b)));
        }
        parts.push(format!("eta={}", self.eta));
        if let Some(d) = &self.deformation {
            parts.push(format!("eta2={}", d.eta2));
            parts.push(format!("eta3={}", d.eta3));
        }
        write!(f, "{}", parts.join("; "))
    }
}
