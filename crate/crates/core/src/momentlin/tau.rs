//! Exact flow derivatives of `tau_k = Delta_k`.
//!
//! `theta_l` acts on moments as the index shift `rho_m -> rho_{m+l}`. A Hankel-like
//! determinant is described by the leading moment index of each row, so by
//! multilinearity `theta_l det(r_0, ..., r_{k-1}) = sum_i det(..., r_i + l, ...)`.
//! Rows are kept sorted (the sort contributes a sign) and terms with repeated
//! rows vanish, so every derivative is a finite integer combination of
//! determinants keyed by strictly increasing row-start vectors.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use rug::Float;

use super::hankel::row_determinant;
use super::series::MomentTable;
use crate::error::{Error, Result};

/// Orders of `theta_1`, `theta_2`, `theta_3` in a mixed derivative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlowMultiIndex {
    pub o1: u32,
    pub o2: u32,
    pub o3: u32,
}

impl FlowMultiIndex {
    pub const ZERO: FlowMultiIndex = FlowMultiIndex { o1: 0, o2: 0, o3: 0 };

    pub fn new(o1: u32, o2: u32, o3: u32) -> Self {
        Self { o1, o2, o3 }
    }

    pub fn from_array(a: [u32; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.o1, self.o2, self.o3]
    }

    /// Single flow `l` applied `order` times.
    pub fn flow(l: usize, order: u32) -> Self {
        let mut a = [0; 3];
        a[l - 1] = order;
        Self::from_array(a)
    }

    /// Moment-index increment `o1 + 2 o2 + 3 o3`.
    pub fn shift(&self) -> usize {
        (self.o1 + 2 * self.o2 + 3 * self.o3) as usize
    }

    pub fn total_order(&self) -> u32 {
        self.o1 + self.o2 + self.o3
    }

    /// Flow labels in the canonical application order `1.., 2.., 3..`.
    pub fn sequence(&self) -> Vec<usize> {
        let mut v = Vec::new();
        v.extend(std::iter::repeat(1).take(self.o1 as usize));
        v.extend(std::iter::repeat(2).take(self.o2 as usize));
        v.extend(std::iter::repeat(3).take(self.o3 as usize));
        v
    }
}

/// Signed integer combination of row-start determinants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    terms: BTreeMap<Vec<usize>, i64>,
}

impl Expansion {
    /// `det(rows 0..k)`, i.e. `tau_k` itself.
    pub fn identity(k: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0..k).collect(), 1);
        Self { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, i64> {
        &self.terms
    }

    /// Applies `theta_l` once.
    pub fn apply(&self, l: usize) -> Self {
        let mut out: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for (rows, c) in &self.terms {
            for i in 0..rows.len() {
                let target = rows[i] + l;
                if rows.contains(&target) {
                    continue;
                }
                let mut r = rows.clone();
                r[i] = target;
                // Moving the raised row past the rows it overtakes flips the sign once per row.
                let passed = rows.iter().filter(|&&x| x > rows[i] && x < target).count();
                let sign = if passed % 2 == 0 { 1 } else { -1 };
                r.sort_unstable();
                *out.entry(r).or_insert(0) += sign * c;
            }
        }
        out.retain(|_, c| *c != 0);
        Self { terms: out }
    }

    /// Applies flows in the given order.
    pub fn apply_sequence(&self, flows: &[usize]) -> Self {
        flows.iter().fold(self.clone(), |e, &l| e.apply(l))
    }

    /// Highest moment index any term touches.
    pub fn max_index(&self) -> usize {
        self.terms.keys().map(|r| r.last().copied().unwrap_or(0) + r.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

/// Evaluates expansions against one moment table, memoizing determinants.
pub struct TauEngine<'a> {
    table: &'a MomentTable,
    dets: RefCell<HashMap<Vec<usize>, Float>>,
    expansions: RefCell<HashMap<(usize, FlowMultiIndex), Expansion>>,
}

impl<'a> TauEngine<'a> {
    pub fn new(table: &'a MomentTable) -> Self {
        Self { table, dets: RefCell::new(HashMap::new()), expansions: RefCell::new(HashMap::new()) }
    }

    pub fn table(&self) -> &'a MomentTable {
        self.table
    }

    pub fn expansion(&self, k: usize, d: FlowMultiIndex) -> Expansion {
        if let Some(e) = self.expansions.borrow().get(&(k, d)) {
            return e.clone();
        }
        let e = Expansion::identity(k).apply_sequence(&d.sequence());
        self.expansions.borrow_mut().insert((k, d), e.clone());
        e
    }

    fn determinant(&self, rows: &[usize]) -> Result<Float> {
        if let Some(v) = self.dets.borrow().get(rows) {
            return Ok(v.clone());
        }
        let v = row_determinant(self.table, rows)?;
        self.dets.borrow_mut().insert(rows.to_vec(), v.clone());
        Ok(v)
    }

    /// Value of an expansion; terms are summed in key order.
    pub fn evaluate(&self, e: &Expansion) -> Result<Float> {
        let needed = e.max_index();
        if needed > self.table.m_max() {
            return Err(Error::IndexOutOfTable { needed, available: self.table.m_max() });
        }
        let mut acc = Float::new(self.table.prec());
        for (rows, c) in e.terms() {
            acc += self.determinant(rows)? * *c;
        }
        Ok(acc)
    }

    /// `theta^d tau_k`.
    pub fn tau_derivative(&self, k: usize, d: FlowMultiIndex) -> Result<Float> {
        if k == 0 {
            let v = if d == FlowMultiIndex::ZERO { 1 } else { 0 };
            return Ok(Float::with_val(self.table.prec(), v));
        }
        let needed = 2 * k - 2 + d.shift();
        if needed > self.table.m_max() {
            return Err(Error::IndexOutOfTable { needed, available: self.table.m_max() });
        }
        self.evaluate(&self.expansion(k, d))
    }
}

/// `theta^d tau_k` from a moment table.
pub fn tau_derivative(table: &MomentTable, k: usize, d: FlowMultiIndex) -> Result<Float> {
    TauEngine::new(table).tau_derivative(k, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperweight::HypergeometricWeight;
    use crate::momentlin::hankel::{hankel_determinant, DeterminantVariant};
    use crate::precision::PrecisionContext;
    use rug::Rational;

    fn table() -> MomentTable {
        let w = HypergeometricWeight::generalized_meixner(
            Rational::from((3, 2)),
            Rational::from((5, 2)),
            Rational::from((1, 3)),
        )
        .unwrap();
        MomentTable::build(&w, 30, &PrecisionContext::new(256)).unwrap()
    }

    #[test]
    fn zeroth_order_is_the_determinant() {
        let t = table();
        let e = TauEngine::new(&t);
        for k in 0..6 {
            assert_eq!(
                e.tau_derivative(k, FlowMultiIndex::ZERO).unwrap(),
                hankel_determinant(&t, k, DeterminantVariant::Plain).unwrap()
            );
        }
    }

    #[test]
    fn size_one_is_a_moment() {
        let t = table();
        let e = TauEngine::new(&t);
        for n in 0..5 {
            assert_eq!(e.tau_derivative(1, FlowMultiIndex::new(n, 0, 0)).unwrap(), *t.get(n as usize).unwrap());
        }
        assert_eq!(e.tau_derivative(1, FlowMultiIndex::new(1, 1, 1)).unwrap(), *t.get(6).unwrap());
    }

    #[test]
    fn first_derivative_size_two() {
        let t = table();
        let v = tau_derivative(&t, 2, FlowMultiIndex::new(1, 0, 0)).unwrap();
        let r = |i: usize| t.get(i).unwrap().clone();
        let expect = r(0) * r(3) - r(1) * r(2);
        let diff = Float::with_val(256, &v - &expect).abs();
        assert!(diff <= expect.abs() * Float::with_val(256, 1e-70));
        assert_eq!(Expansion::identity(2).apply(1).terms().iter().collect::<Vec<_>>(), vec![(&vec![0, 2], &1)]);
    }

    #[test]
    fn derivative_variant_matches_engine() {
        let t = table();
        for k in 1..6 {
            assert_eq!(
                hankel_determinant(&t, k, DeterminantVariant::Derivative).unwrap(),
                tau_derivative(&t, k, FlowMultiIndex::new(1, 0, 0)).unwrap()
            );
        }
    }

    #[test]
    fn flows_commute_exactly() {
        let base = Expansion::identity(4);
        let a = base.apply_sequence(&[1, 2, 3, 1]);
        let b = base.apply_sequence(&[3, 1, 1, 2]);
        let c = base.apply_sequence(&[2, 1, 3, 1]);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn out_of_table_is_an_error() {
        let t = table();
        assert!(matches!(tau_derivative(&t, 12, FlowMultiIndex::new(0, 2, 2)), Err(Error::IndexOutOfTable { .. })));
    }
}
