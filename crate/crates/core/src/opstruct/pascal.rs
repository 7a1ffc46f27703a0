//! Lower unitriangular matrices by subdiagonal, the Pascal matrix and its dressed
//! form, and the closed forms for their subdiagonals.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::linalg::Mat;
use crate::report::{CheckResult, Provenance, Residuals};

/// Unit lower triangular matrix kept as its subdiagonals `S^[1], ..., S^[k-1]`;
/// `S^[d]_n = S_{n+d, n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerUnitriangular<T> {
    size: usize,
    bands: Vec<Vec<T>>,
}

impl<T: Clone> LowerUnitriangular<T> {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let bands = (1..size).map(|d| (0..size - d).map(|n| f(n + d, n)).collect()).collect();
        Self { size, bands }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `S^[d]` for `1 <= d < size`.
    pub fn subdiagonal(&self, d: usize) -> &[T] {
        &self.bands[d - 1]
    }

    /// Number of nonzero subdiagonals, given a zero test.
    pub fn bandwidth(&self, is_zero: impl Fn(&T) -> bool) -> usize {
        (1..self.size).rev().find(|&d| !self.subdiagonal(d).iter().all(&is_zero)).unwrap_or(0)
    }
}

impl LowerUnitriangular<Float> {
    pub fn from_mat(m: &Mat) -> Self {
        Self::from_fn(m.rows(), |i, j| m[(i, j)].clone())
    }

    pub fn to_mat(&self, prec: u32) -> Mat {
        Mat::from_fn(self.size, self.size, prec, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => Float::with_val(prec, 1),
            std::cmp::Ordering::Less => Float::new(prec),
            std::cmp::Ordering::Greater => self.bands[i - j - 1][j].clone(),
        })
    }
}

impl LowerUnitriangular<Integer> {
    pub fn entry(&self, i: usize, j: usize) -> Integer {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Integer::from(1),
            std::cmp::Ordering::Less => Integer::new(),
            std::cmp::Ordering::Greater => self.bands[i - j - 1][j].clone(),
        }
    }

    /// Exact product.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.size, rhs.size);
        Self::from_fn(self.size, |i, j| {
            let mut acc = Integer::new();
            for t in j..=i {
                acc += self.entry(i, t) * rhs.entry(t, j);
            }
            acc
        })
    }

    pub fn is_identity(&self) -> bool {
        self.bands.iter().flatten().all(|x| *x == 0)
    }

    pub fn to_mat(&self, prec: u32) -> Mat {
        Mat::from_fn(self.size, self.size, prec, |i, j| Float::with_val(prec, self.entry(i, j)))
    }

    /// `M chi(z)` where `chi(z) = (1, z, z^2, ...)`.
    pub fn apply_monomials(&self, z: &Integer) -> Vec<Integer> {
        let chi: Vec<Integer> = (0..self.size).map(|n| z.clone().pow(n as u32)).collect();
        (0..self.size).map(|i| (0..=i).map(|j| self.entry(i, j) * &chi[j]).sum()).collect()
    }
}

/// `B` (`sign = 1`, entries `C(n, m)`) or `B^{-1}` (`sign = -1`, entries `(-1)^{n+m} C(n, m)`).
pub fn pascal_matrix(k: usize, sign: i32) -> LowerUnitriangular<Integer> {
    LowerUnitriangular::from_fn(k, |n, m| {
        let c = Integer::from(Integer::binomial_u(n as u32, m as u32));
        if sign < 0 && (n + m) % 2 == 1 {
            -c
        } else {
            c
        }
    })
}

/// `D^[k]_n = C(n + k, k)`; `D^[1] = diag(1, 2, 3, ...)`.
pub fn pascal_subdiagonal(k: usize, n: usize) -> Integer {
    Integer::from(Integer::binomial_u((n + k) as u32, k as u32))
}

/// Shifts of diagonal vectors. `T_-` drops leading entries,
/// `(T_-^j x)_n = x_{n+j}`; `T_+` prepends a zero, `(T_+ x)_n = x_{n-1}`.
pub struct DiagonalOps;

impl DiagonalOps {
    pub fn lower<T: Clone>(x: &[T], j: usize) -> Vec<T> {
        x.iter().skip(j).cloned().collect()
    }

    pub fn raise(x: &[Float]) -> Vec<Float> {
        let mut v = Vec::with_capacity(x.len() + 1);
        v.push(Float::new(x.first().map_or(53, Float::prec)));
        v.extend(x.iter().cloned());
        v
    }

    /// Entrywise product over the common length.
    pub fn mul(vs: &[&[Float]]) -> Vec<Float> {
        let len = vs.iter().map(|v| v.len()).min().unwrap_or(0);
        (0..len)
            .map(|i| {
                let mut acc = vs[0][i].clone();
                for v in &vs[1..] {
                    acc *= &v[i];
                }
                acc
            })
            .collect()
    }
}

/// `Pi^{+1} = S B S^{-1}` or `Pi^{-1} = S B^{-1} S^{-1}`. All factors are lower
/// triangular, so every leading block is exact.
pub fn dressed_pascal(s: &Mat, sign: i32) -> Mat {
    let b = pascal_matrix(s.rows(), sign).to_mat(s.prec());
    s.mul(&b).mul(&s.unit_lower_inverse())
}

fn sub(m: &Mat, d: usize) -> Vec<Float> {
    (0..m.rows().saturating_sub(d)).map(|n| m[(n + d, n)].clone()).collect()
}

fn ints(prec: u32, len: usize, f: impl Fn(usize) -> Integer) -> Vec<Float> {
    (0..len).map(|n| Float::with_val(prec, f(n))).collect()
}

/// Entrywise comparison measured against the magnitude `scale` of the whole matrix.
fn compare_vec_scaled(r: &mut Residuals, label: &str, lhs: &[Float], rhs: &[Float], scale: &Float) {
    for (a, b) in lhs.iter().zip(rhs) {
        r.compare_with(label, a, b, scale);
    }
}

/// Sum of signed terms, each a product of shifted subdiagonals.
fn combo(prec: u32, terms: &[(i32, Vec<Vec<Float>>)]) -> Vec<Float> {
    let parts: Vec<Vec<Float>> = terms
        .iter()
        .map(|(c, fs)| {
            let refs: Vec<&[Float]> = fs.iter().map(|v| v.as_slice()).collect();
            DiagonalOps::mul(&refs).into_iter().map(|x| x * *c).collect()
        })
        .collect();
    let len = parts.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|i| {
            let mut acc = Float::new(prec);
            for p in &parts {
                acc += &p[i];
            }
            acc
        })
        .collect()
}

/// Residuals of the closed forms for the subdiagonals `pi^[+-d]`, `d = 1, 2, 3`,
/// of the dressed Pascal matrices, in terms of `p^1`, `p^2`, `beta` and `D^[k]`.
/// `s` is the factor `S` of a Cholesky factorization and `beta` the matching
/// recursion coefficients (`beta.len() >= s.rows() - 1`).
pub fn pi_closed_form_check(s: &Mat, beta: &[Float], tol: &Float, prov: Provenance) -> CheckResult {
    let k = s.rows();
    let prec = s.prec();
    let mut r = Residuals::new(prec);
    let lo = DiagonalOps::lower::<Float>;
    let (s1, s2) = (sub(s, 1), sub(s, 2));
    let p1 = |n: usize| if n == 0 { Float::new(prec) } else { s[(n, n - 1)].clone() };
    let p2 = |n: usize| if n < 2 { Float::new(prec) } else { s[(n, n - 2)].clone() };
    let d1 = ints(prec, k, |n| pascal_subdiagonal(1, n));
    let d2 = ints(prec, k, |n| pascal_subdiagonal(2, n));
    let d3 = ints(prec, k, |n| pascal_subdiagonal(3, n));
    let plus = dressed_pascal(s, 1);
    let minus = dressed_pascal(s, -1);
    // Subdiagonals can vanish identically (Charlier), so entries are measured
    // against the largest entry of the dressed matrices.
    let mut scale = plus.max_abs();
    crate::precision::max_abs(&mut scale, &minus.max_abs());
    for (sign, pi) in [(1i32, &plus), (-1i32, &minus)] {
        let tag = if sign > 0 { "+" } else { "-" };
        let pi1 = sub(pi, 1);
        let pi2 = sub(pi, 2);
        let pi3 = sub(pi, 3);
        let f1: Vec<Float> = (0..k - 1).map(|n| Float::with_val(prec, sign * (n as i32 + 1))).collect();
        compare_vec_scaled(&mut r, &format!("pi{tag}1"), &pi1, &f1, &scale);
        let f2: Vec<Float> = (0..k.saturating_sub(2).min(beta.len().saturating_sub(1)))
            .map(|n| {
                let mut v = d2[n].clone();
                v -= Float::with_val(prec, &beta[n + 1] * (n as u32 + 1)) * sign;
                v -= p1(n + 1) * sign;
                v
            })
            .collect();
        compare_vec_scaled(&mut r, &format!("pi{tag}2"), &pi2, &f2, &scale);
        let f3: Vec<Float> = (0..k.saturating_sub(3))
            .map(|n| {
                let m = n as u32;
                let mut v = Float::with_val(prec, &d3[n] * sign);
                v += Float::with_val(prec, &d2[n] * &p1(n + 3));
                v -= Float::with_val(prec, &d2[n + 1] * &p1(n + 1));
                v += p2(n + 3) * (m + 1) * sign;
                v -= p2(n + 2) * (m + 3) * sign;
                v += Float::with_val(prec, p1(n + 2) * p1(n + 1)) * (m + 3) * sign;
                v -= Float::with_val(prec, p1(n + 3) * p1(n + 1)) * (m + 2) * sign;
                v
            })
            .collect();
        compare_vec_scaled(&mut r, &format!("pi{tag}3"), &pi3, &f3, &scale);
        // Forms through S^[1], S^[2] and D.
        let g2 = combo(
            prec,
            &[(1, vec![d2.clone()]), (sign, vec![lo(&s1, 1), d1.clone()]), (-sign, vec![lo(&d1, 1), s1.clone()])],
        );
        compare_vec_scaled(&mut r, &format!("pi{tag}2_subdiagonals"), &pi2, &g2, &scale);
        let g3 = combo(
            prec,
            &[
                (sign, vec![d3.clone()]),
                (1, vec![lo(&s1, 2), d2.clone()]),
                (-1, vec![lo(&d2, 1), s1.clone()]),
                (sign, vec![lo(&s2, 1), d1.clone()]),
                (-sign, vec![lo(&d1, 2), s2.clone()]),
                (sign, vec![lo(&d1, 2), lo(&s1, 1), s1.clone()]),
                (-sign, vec![lo(&s1, 2), lo(&d1, 1), s1.clone()]),
            ],
        );
        compare_vec_scaled(&mut r, &format!("pi{tag}3_subdiagonals"), &pi3, &g3, &scale);
    }
    let sum = |d: usize| -> Vec<Float> { sub(&plus, d).into_iter().zip(sub(&minus, d)).map(|(a, b)| a + b).collect() };
    let dif = |d: usize| -> Vec<Float> { sub(&plus, d).into_iter().zip(sub(&minus, d)).map(|(a, b)| a - b).collect() };
    let zeros = vec![Float::new(prec); k];
    compare_vec_scaled(&mut r, "sum1", &sum(1), &zeros, &scale);
    let two_d2: Vec<Float> = d2.iter().map(|x| Float::with_val(prec, x * 2u32)).collect();
    compare_vec_scaled(&mut r, "sum2", &sum(2), &two_d2, &scale);
    let sum3 = combo(prec, &[(2, vec![lo(&s1, 2), d2.clone()]), (-2, vec![lo(&d2, 1), s1.clone()])]);
    compare_vec_scaled(&mut r, "sum3", &sum(3), &sum3, &scale);
    let two_d1: Vec<Float> = d1.iter().map(|x| Float::with_val(prec, x * 2u32)).collect();
    compare_vec_scaled(&mut r, "dif1", &dif(1), &two_d1, &scale);
    let dif2 = combo(prec, &[(2, vec![lo(&s1, 1), d1.clone()]), (-2, vec![lo(&d1, 1), s1.clone()])]);
    compare_vec_scaled(&mut r, "dif2", &dif(2), &dif2, &scale);
    let dif3 = combo(
        prec,
        &[
            (2, vec![d3.clone()]),
            (2, vec![lo(&s2, 1), d1.clone()]),
            (-2, vec![lo(&d1, 2), s2.clone()]),
            (2, vec![lo(&d1, 2), lo(&s1, 1), s1.clone()]),
            (-2, vec![lo(&s1, 2), lo(&d1, 1), s1.clone()]),
        ],
    );
    compare_vec_scaled(&mut r, "dif3", &dif(3), &dif3, &scale);
    r.finish("pi_closed_forms", tol, format!("subdiagonal entries of {k}x{k} truncations"), prov)
}

/// Residuals of the expansions of `S^[-d]` (the subdiagonals of `S^{-1}`) for
/// `d = 1..4` in terms of the subdiagonals of `S`.
pub fn s_inverse_expansion_check(s: &Mat, tol: &Float, prov: Provenance) -> CheckResult {
    let k = s.rows();
    let prec = s.prec();
    let inv = s.unit_lower_inverse();
    let mut scale = s.max_abs();
    crate::precision::max_abs(&mut scale, &inv.max_abs());
    let lo = DiagonalOps::lower::<Float>;
    let (s1, s2, s3, s4) = (sub(s, 1), sub(s, 2), sub(s, 3), sub(s, 4));
    let mut r = Residuals::new(prec);
    let r1 = combo(prec, &[(-1, vec![s1.clone()])]);
    compare_vec_scaled(&mut r, "d1", &sub(&inv, 1), &r1, &scale);
    let r2 = combo(prec, &[(-1, vec![s2.clone()]), (1, vec![lo(&s1, 1), s1.clone()])]);
    compare_vec_scaled(&mut r, "d2", &sub(&inv, 2), &r2, &scale);
    let r3 = combo(
        prec,
        &[
            (-1, vec![s3.clone()]),
            (1, vec![lo(&s2, 1), s1.clone()]),
            (1, vec![lo(&s1, 2), s2.clone()]),
            (-1, vec![lo(&s1, 2), lo(&s1, 1), s1.clone()]),
        ],
    );
    compare_vec_scaled(&mut r, "d3", &sub(&inv, 3), &r3, &scale);
    let r4 = combo(
        prec,
        &[
            (-1, vec![s4.clone()]),
            (1, vec![lo(&s3, 1), s1.clone()]),
            (1, vec![lo(&s2, 2), s2.clone()]),
            (-1, vec![lo(&s2, 2), lo(&s1, 1), s1.clone()]),
            (1, vec![lo(&s1, 3), s3.clone()]),
            (-1, vec![lo(&s1, 3), lo(&s2, 1), s1.clone()]),
            (-1, vec![lo(&s1, 3), lo(&s1, 2), s2.clone()]),
            (1, vec![lo(&s1, 3), lo(&s1, 2), lo(&s1, 1), s1.clone()]),
        ],
    );
    compare_vec_scaled(&mut r, "d4", &sub(&inv, 4), &r4, &scale);
    r.finish("s_inverse", tol, format!("subdiagonals 1..4 of {k}x{k} truncation"), prov)
}
