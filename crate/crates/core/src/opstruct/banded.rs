//! Square matrices stored by diagonal offset.

use std::fmt::Write as _;

use rug::Float;

use crate::linalg::Mat;
use crate::precision::{fmt_float, max_abs};

/// `size x size` matrix whose entries outside offsets `[-lower, upper]` are
/// structurally zero. Offset `d` holds the entries `(i, i + d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix {
    size: usize,
    lower: usize,
    upper: usize,
    prec: u32,
    // diagonals[lower + d] has length size - |d|.
    diagonals: Vec<Vec<Float>>,
}

impl BandedMatrix {
    pub fn zeros(size: usize, lower: usize, upper: usize, prec: u32) -> Self {
        let diagonals = (-(lower as isize)..=upper as isize)
            .map(|d| vec![Float::new(prec); size.saturating_sub(d.unsigned_abs())])
            .collect();
        Self { size, lower, upper, prec, diagonals }
    }

    pub fn identity(size: usize, prec: u32) -> Self {
        let mut m = Self::zeros(size, 0, 0, prec);
        for x in &mut m.diagonals[0] {
            *x = Float::with_val(prec, 1);
        }
        m
    }

    /// Keeps the band `[-lower, upper]` of a dense matrix.
    pub fn from_mat(m: &Mat, lower: usize, upper: usize) -> Self {
        assert!(m.is_square());
        let mut b = Self::zeros(m.rows(), lower, upper, m.prec());
        for d in -(lower as isize)..=upper as isize {
            for (i, j) in b.positions(d) {
                *b.get_mut(i, j).unwrap() = m[(i, j)].clone();
            }
        }
        b
    }

    fn positions(&self, d: isize) -> Vec<(usize, usize)> {
        let n = self.size as isize;
        (0..n)
            .filter_map(|i| {
                let j = i + d;
                (j >= 0 && j < n).then_some((i as usize, j as usize))
            })
            .collect()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Entries on offset `d`, or `None` when `d` is outside the band.
    pub fn diagonal(&self, d: isize) -> Option<&[Float]> {
        if d < -(self.lower as isize) || d > self.upper as isize {
            return None;
        }
        Some(&self.diagonals[(d + self.lower as isize) as usize])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Float> {
        let d = j as isize - i as isize;
        self.diagonal(d).map(|v| &v[i.min(j)])
    }

    fn get_mut(&mut self, i: usize, j: usize) -> Option<&mut Float> {
        let d = j as isize - i as isize;
        if d < -(self.lower as isize) || d > self.upper as isize {
            return None;
        }
        Some(&mut self.diagonals[(d + self.lower as isize) as usize][i.min(j)])
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_fn(self.size, self.size, self.prec, |i, j| {
            self.get(i, j).cloned().unwrap_or_else(|| Float::new(self.prec))
        })
    }

    /// Product of truncations; the band widths add.
    pub fn mul(&self, rhs: &BandedMatrix) -> BandedMatrix {
        assert_eq!(self.size, rhs.size);
        let lower = (self.lower + rhs.lower).min(self.size.saturating_sub(1));
        let upper = (self.upper + rhs.upper).min(self.size.saturating_sub(1));
        let mut out = BandedMatrix::zeros(self.size, lower, upper, self.prec);
        for d in -(lower as isize)..=upper as isize {
            for (i, j) in out.positions(d) {
                let lo = i.saturating_sub(self.lower).max(j.saturating_sub(rhs.upper));
                let hi = (i + self.upper).min(j + rhs.lower).min(self.size - 1);
                let mut acc = Float::new(self.prec);
                for t in lo..=hi {
                    if let (Some(a), Some(b)) = (self.get(i, t), rhs.get(t, j)) {
                        acc += a * b;
                    }
                }
                *out.get_mut(i, j).unwrap() = acc;
            }
        }
        out
    }

    /// `self + c I`.
    pub fn add_identity(&self, c: &Float) -> BandedMatrix {
        let mut out = self.clone();
        for x in &mut out.diagonals[self.lower] {
            *x += c;
        }
        out
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut out = BandedMatrix::zeros(self.size, self.upper, self.lower, self.prec);
        for d in -(self.lower as isize)..=self.upper as isize {
            out.diagonals[(self.upper as isize - d) as usize] =
                self.diagonals[(d + self.lower as isize) as usize].clone();
        }
        out
    }

    /// `p(self)` by Horner's scheme; `coeffs` are in ascending order.
    pub fn poly(&self, coeffs: &[Float]) -> BandedMatrix {
        let mut acc = BandedMatrix::zeros(self.size, 0, 0, self.prec);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self).add_identity(c);
        }
        acc
    }

    /// Largest entry of a dense matrix outside the band `[-lower, upper]`,
    /// restricted to the leading `w x w` window.
    pub fn out_of_band(m: &Mat, lower: usize, upper: usize, w: usize) -> Float {
        let mut worst = Float::new(m.prec());
        for i in 0..w {
            for j in 0..w {
                let d = j as isize - i as isize;
                if d < -(lower as isize) || d > upper as isize {
                    max_abs(&mut worst, &m[(i, j)]);
                }
            }
        }
        worst
    }

    /// One line per offset, `offset d: v_0 v_1 ...`, lowest offset first.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for d in -(self.lower as isize)..=self.upper as isize {
            let vals: Vec<String> = self.diagonal(d).unwrap().iter().map(fmt_float).collect();
            let _ = writeln!(s, "offset {d}: {}", vals.join(" "));
        }
        s
    }
}
