//! Residual bookkeeping and the per-check result record.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::linalg::Mat;
use crate::precision::max_abs;

/// Where a result came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub weight: String,
    pub size: usize,
    pub bits: u32,
}

/// One named sub-identity of a check.
#[derive(Clone, Debug)]
pub struct Component {
    pub label: String,
    /// `max |lhs - rhs| / scale` over the component's window.
    pub max_residual: Float,
    pub scale: Float,
}

/// Verdict of a single check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub description: String,
    pub max_residual: Float,
    pub scale: Float,
    pub tolerance: Float,
    pub pass: bool,
    pub window: String,
    pub provenance: Provenance,
    pub components: Vec<Component>,
}

impl CheckResult {
    pub fn component(&self, label: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.label == label)
    }

    /// Re-judges the result against another tolerance.
    pub fn with_tolerance(mut self, tolerance: Float) -> Self {
        self.pass = !self.max_residual.is_nan() && self.max_residual <= tolerance;
        self.tolerance = tolerance;
        self
    }
}

struct Slot {
    label: String,
    diff: Float,
    scale: Float,
}

/// Collects `lhs - rhs` comparisons grouped into labelled components. Each
/// component is normalized by the largest magnitude it has seen among the left
/// side, the right side and any supplied operand; a component that saw only
/// exact zeros gets scale 1.
pub struct Residuals {
    prec: u32,
    slots: Vec<Slot>,
}

impl Residuals {
    pub fn new(prec: u32) -> Self {
        Self { prec, slots: Vec::new() }
    }

    fn slot(&mut self, label: &str) -> &mut Slot {
        let i = match self.slots.iter().position(|s| s.label == label) {
            Some(i) => i,
            None => {
                self.slots.push(Slot {
                    label: label.to_string(),
                    diff: Float::new(self.prec),
                    scale: Float::new(self.prec),
                });
                self.slots.len() - 1
            }
        };
        &mut self.slots[i]
    }

    pub fn compare(&mut self, label: &str, lhs: &Float, rhs: &Float) {
        let prec = self.prec;
        let s = self.slot(label);
        let d = Float::with_val(prec, lhs - rhs);
        if d.is_nan() {
            s.diff = d;
        } else if !s.diff.is_nan() {
            max_abs(&mut s.diff, &d);
        }
        max_abs(&mut s.scale, lhs);
        max_abs(&mut s.scale, rhs);
    }

    /// Like [`compare`](Self::compare) with an extra magnitude folded into the scale.
    pub fn compare_with(&mut self, label: &str, lhs: &Float, rhs: &Float, operand: &Float) {
        self.compare(label, lhs, rhs);
        max_abs(&mut self.slot(label).scale, operand);
    }

    /// Entrywise comparison over the leading `w x w` window.
    pub fn compare_mat(&mut self, label: &str, lhs: &Mat, rhs: &Mat, w: usize) {
        for i in 0..w {
            for j in 0..w {
                self.compare(label, &lhs[(i, j)], &rhs[(i, j)]);
            }
        }
    }

    /// Entrywise comparison with an operand matrix contributing to the scale.
    pub fn compare_mat_with(&mut self, label: &str, lhs: &Mat, rhs: &Mat, operand: &Mat, w: usize) {
        self.compare_mat(label, lhs, rhs, w);
        let m = operand.max_abs_window(w);
        max_abs(&mut self.slot(label).scale, &m);
    }

    /// A quantity that should vanish, measured against an external scale.
    pub fn bound(&mut self, label: &str, deviation: &Float, scale: &Float) {
        let zero = Float::new(self.prec);
        self.compare(label, deviation, &zero);
        max_abs(&mut self.slot(label).scale, scale);
    }

    pub fn components(&self) -> Vec<Component> {
        self.slots
            .iter()
            .map(|s| {
                let scale = if s.scale.is_zero() { Float::with_val(self.prec, 1) } else { s.scale.clone() };
                Component { label: s.label.clone(), max_residual: Float::with_val(self.prec, &s.diff / &scale), scale }
            })
            .collect()
    }

    /// Largest component residual so far (NaN if any component is NaN).
    pub fn max_residual(&self) -> Float {
        let mut m = Float::new(self.prec);
        for c in self.components() {
            if c.max_residual.is_nan() {
                return c.max_residual;
            }
            if c.max_residual > m {
                m = c.max_residual;
            }
        }
        m
    }

    pub fn finish(self, name: &str, tolerance: &Float, window: String, provenance: Provenance) -> CheckResult {
        let components = self.components();
        let mut max_residual = Float::new(self.prec);
        let mut scale = Float::with_val(self.prec, 1);
        for c in &components {
            if c.max_residual.is_nan() || (!max_residual.is_nan() && c.max_residual > max_residual) {
                max_residual = c.max_residual.clone();
                scale = c.scale.clone();
            }
        }
        CheckResult {
            name: name.to_string(),
            description: super::registry::description(name).unwrap_or("").to_string(),
            scale,
            tolerance: tolerance.clone(),
            pass: false,
            window,
            provenance,
            components,
            max_residual,
        }
        .with_tolerance(tolerance.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance { weight: "eta=1".into(), size: 3, bits: 64 }
    }

    #[test]
    fn relative_to_largest_side() {
        let mut r = Residuals::new(64);
        r.compare("x", &Float::with_val(64, 10), &Float::with_val(64, 9));
        r.compare("x", &Float::with_val(64, 1), &Float::with_val(64, 1));
        let c = r.finish("toda", &Float::with_val(64, 0.2), "n=0..1".into(), prov());
        assert_eq!(c.max_residual, Float::with_val(64, 1) / 10u32);
        assert_eq!(c.scale, 10);
        assert!(c.pass);
    }

    #[test]
    fn all_zero_uses_unit_scale() {
        let mut r = Residuals::new(64);
        let z = Float::new(64);
        r.compare("z", &z, &z);
        let c = r.finish("toda", &Float::with_val(64, 1e-10), String::new(), prov());
        assert_eq!(c.scale, 1);
        assert!(c.max_residual.is_zero());
        assert!(c.pass);
    }

    #[test]
    fn nan_fails() {
        let mut r = Residuals::new(64);
        r.compare("n", &Float::with_val(64, rug::float::Special::Nan), &Float::with_val(64, 1));
        r.compare("n", &Float::with_val(64, 1), &Float::with_val(64, 1));
        let c = r.finish("toda", &Float::with_val(64, 1), String::new(), prov());
        assert!(!c.pass);
    }

    #[test]
    fn worst_component_wins() {
        let mut r = Residuals::new(64);
        r.compare("a", &Float::with_val(64, 1), &Float::with_val(64, 1));
        r.bound("b", &Float::with_val(64, 0.5), &Float::with_val(64, 2));
        let c = r.finish("toda", &Float::with_val(64, 0.1), String::new(), prov());
        assert_eq!(c.max_residual, 0.25);
        assert!(!c.pass);
        assert_eq!(c.component("a").unwrap().max_residual, 0);
    }
}
