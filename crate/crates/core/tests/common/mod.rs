//! Exact-rational oracles shared by the integration tests.
#![allow(dead_code)]

use pearson_core::HypergeometricWeight;
use rug::{Float, Integer, Rational};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// The four undeformed test families.
pub fn families() -> Vec<(&'static str, HypergeometricWeight)> {
    vec![
        ("charlier", HypergeometricWeight::charlier(q(7, 10))),
        ("meixner", HypergeometricWeight::meixner(q(2, 1), q(1, 3))),
        ("generalized_charlier", HypergeometricWeight::generalized_charlier(q(3, 2), q(7, 10)).unwrap()),
        ("generalized_meixner", HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(1, 3)).unwrap()),
    ]
}

/// Charlier moments divided by `e^eta`: Touchard polynomials `sum_j S(m, j) eta^j`.
pub fn charlier_reduced_moments(eta: &Rational, count: usize) -> Vec<Rational> {
    // Stirling numbers of the second kind, row by row.
    let mut row = vec![Integer::from(1)];
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let mut acc = Rational::new();
        let mut power = Rational::from(1);
        for s in &row {
            acc += Rational::from(s * &power);
            power *= eta;
        }
        out.push(acc);
        let mut next = vec![Integer::new(); m + 2];
        for (j, s) in row.iter().enumerate() {
            next[j] += Integer::from(s * j as u32);
            next[j + 1] += s;
        }
        if m == 0 {
            next[0] = Integer::new();
        }
        row = next;
    }
    out
}

/// Meixner moments divided by `(1 - eta)^{-a}`: with `y = eta / (1 - eta)`,
/// `r_0 = 1` and `r_{m+1}(y) = y (1 + y) r_m'(y) + a y r_m(y)`.
pub fn meixner_reduced_moments(a: &Rational, eta: &Rational, count: usize) -> Vec<Rational> {
    let y: Rational = eta.clone() / (1 - eta.clone());
    let mut poly = vec![Rational::from(1)];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut acc = Rational::new();
        let mut power = Rational::from(1);
        for c in &poly {
            acc += Rational::from(c * &power);
            power *= &y;
        }
        out.push(acc);
        let mut next = vec![Rational::new(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            // y(1+y) d/dy (c y^i) = i c y^i + i c y^{i+1}
            let ic = Rational::from(c * i as u32);
            next[i] += &ic;
            next[i + 1] += ic;
            next[i + 1] += Rational::from(a * c);
        }
        poly = next;
    }
    out
}

/// Exact recursion coefficients from Hankel elimination: `beta_n` for
/// `n < count` and `gamma_n` for `n <= count`.
pub struct ExactRecurrence {
    pub beta: Vec<Rational>,
    pub gamma: Vec<Rational>,
    pub h: Vec<Rational>,
}

/// Unpivoted `LDL^T` of the Hankel matrix of `moments` in exact arithmetic.
pub fn exact_recurrence(moments: &[Rational], count: usize) -> ExactRecurrence {
    let k = count + 2;
    assert!(moments.len() >= 2 * k - 1, "need {} moments", 2 * k - 1);
    let mut l = vec![vec![Rational::new(); k]; k];
    let mut d = vec![Rational::new(); k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = moments[i + j].clone();
            for m in 0..j {
                s -= Rational::from(&l[i][m] * &l[j][m]) * &d[m];
            }
            if i == j {
                d[i] = s;
                l[i][i] = Rational::from(1);
            } else {
                l[i][j] = s / &d[j];
            }
        }
    }
    // S = L^{-1}; p^1_n = S_{n, n-1} = -L_{n, n-1}.
    let p1: Vec<Rational> = (0..k).map(|n| if n == 0 { Rational::new() } else { -l[n][n - 1].clone() }).collect();
    let beta = (0..count).map(|n| Rational::from(&p1[n] - &p1[n + 1])).collect();
    let gamma = (0..=count).map(|n| if n == 0 { Rational::new() } else { Rational::from(&d[n] / &d[n - 1]) }).collect();
    ExactRecurrence { beta, gamma, h: d }
}

/// `|x - exact| / max(|exact|, 1e-300)`, zero when both vanish.
pub fn rel_err(x: &Float, exact: &Rational) -> Float {
    let prec = x.prec();
    let e = Float::with_val(prec, exact);
    let diff = Float::with_val(prec, x - &e).abs();
    if e.is_zero() {
        diff
    } else {
        diff / e.abs()
    }
}
