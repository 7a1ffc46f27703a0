//! Dense row-major matrices over [`rug::Float`].

use std::ops::{Index, IndexMut};

use rug::{Assign, Float};

/// A dense `rows x cols` matrix. Every entry carries the same precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    prec: u32,
    data: Vec<Float>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Self { rows, cols, prec, data: vec![Float::new(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)].assign(1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, prec: u32, mut f: impl FnMut(usize, usize) -> Float) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(Float::with_val(prec, f(i, j)));
            }
        }
        Self { rows, cols, prec, data }
    }

    pub fn diagonal(d: &[Float], prec: u32) -> Self {
        let mut m = Self::zeros(d.len(), d.len(), prec);
        for (i, v) in d.iter().enumerate() {
            m[(i, i)].assign(v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, self.prec, |i, j| self[(j, i)].clone())
    }

    /// Leading `r x c` block.
    pub fn leading(&self, r: usize, c: usize) -> Mat {
        assert!(r <= self.rows && c <= self.cols, "block exceeds matrix");
        Mat::from_fn(r, c, self.prec, |i, j| self[(i, j)].clone())
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Mat::zeros(self.rows, rhs.cols, self.prec);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        self.zip(rhs, |a, b| Float::with_val(a.prec(), a + b))
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        self.zip(rhs, |a, b| Float::with_val(a.prec(), a - b))
    }

    fn zip(&self, rhs: &Mat, f: impl Fn(&Float, &Float) -> Float) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        Mat {
            rows: self.rows,
            cols: self.cols,
            prec: self.prec,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &Float) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            prec: self.prec,
            data: self.data.iter().map(|a| Float::with_val(self.prec, a * c)).collect(),
        }
    }

    /// `self + c I`.
    pub fn add_identity(&self, c: &Float) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += c;
        }
        m
    }

    /// `A B - B A`.
    pub fn commutator(&self, rhs: &Mat) -> Mat {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Scales row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&self, d: &[Float]) -> Mat {
        Mat::from_fn(self.rows, self.cols, self.prec, |i, j| Float::with_val(self.prec, &self[(i, j)] * &d[i]))
    }

    /// Scales column `j` by `d[j]` (right multiplication by a diagonal).
    pub fn scale_cols(&self, d: &[Float]) -> Mat {
        Mat::from_fn(self.rows, self.cols, self.prec, |i, j| Float::with_val(self.prec, &self[(i, j)] * &d[j]))
    }

    /// Strictly lower part.
    pub fn strictly_lower(&self) -> Mat {
        Mat::from_fn(
            self.rows,
            self.cols,
            self.prec,
            |i, j| {
                if i > j {
                    self[(i, j)].clone()
                } else {
                    Float::new(self.prec)
                }
            },
        )
    }

    /// Upper part including the diagonal.
    pub fn upper(&self) -> Mat {
        Mat::from_fn(
            self.rows,
            self.cols,
            self.prec,
            |i, j| {
                if i <= j {
                    self[(i, j)].clone()
                } else {
                    Float::new(self.prec)
                }
            },
        )
    }

    /// Largest absolute entry over the leading `w x w` window.
    pub fn max_abs_window(&self, w: usize) -> Float {
        let mut m = Float::new(self.prec);
        for i in 0..w.min(self.rows) {
            for j in 0..w.min(self.cols) {
                crate::precision::max_abs(&mut m, &self[(i, j)]);
            }
        }
        m
    }

    pub fn max_abs(&self) -> Float {
        self.max_abs_window(self.rows.max(self.cols))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Float]) -> Vec<Float> {
        assert_eq!(self.cols, v.len(), "vector length differs");
        (0..self.rows)
            .map(|i| {
                let mut acc = Float::new(self.prec);
                for (j, x) in v.iter().enumerate() {
                    acc += &self[(i, j)] * x;
                }
                acc
            })
            .collect()
    }

    /// Inverse of a lower unitriangular matrix by forward substitution.
    pub fn unit_lower_inverse(&self) -> Mat {
        assert!(self.is_square());
        let n = self.rows;
        let mut x = Mat::identity(n, self.prec);
        for i in 0..n {
            for j in 0..i {
                let mut acc = Float::new(self.prec);
                for k in j..i {
                    acc += &self[(i, k)] * &x[(k, j)];
                }
                x[(i, j)] = -acc;
            }
        }
        x
    }

    /// Determinant by Gaussian elimination with partial pivoting. Pivot choice is
    /// the first row of maximal magnitude, which makes the result deterministic.
    pub fn determinant(&self) -> Float {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Float::with_val(self.prec, 1);
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if *a[(r, c)].as_abs() > *a[(p, c)].as_abs() {
                    p = r;
                }
            }
            if a[(p, c)].is_zero() {
                return Float::new(self.prec);
            }
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pivot = a[(c, c)].clone();
            det *= &pivot;
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = Float::with_val(self.prec, &a[(r, c)] / &pivot);
                for j in c + 1..n {
                    let t = Float::with_val(self.prec, &f * &a[(c, j)]);
                    a[(r, j)] -= t;
                }
                a[(r, c)].assign(0);
            }
        }
        det
    }

    pub fn row(&self, i: usize) -> &[Float] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Float;

    fn index(&self, (i, j): (usize, usize)) -> &Float {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Float {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}
