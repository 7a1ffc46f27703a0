//! The discrete lattice in `(n, r, s)` formed by the squared norms under
//! parameter shifts: the Nijhoff-Capel equation and the `u`-`v` system.
//!
//! Notation: `u_n = H_{n-1}`, a bar raises `n`, a hat applies the shift `r` and
//! multiplies by its constant `c_r` (`a_i` or `b_j - 1`), a tilde does the same
//! for `s`.

use rug::Float;

use crate::error::{Error, Result};
use crate::hyperweight::{HypergeometricWeight, Shift};
use crate::momentlin::{central_difference_pair, TauEngine};
use crate::opstruct::Pipeline;
use crate::precision::PrecisionContext;
use crate::report::{CheckResult, Provenance, Residuals};

/// A lattice site: index `n >= 1` and two distinct single shifts.
#[derive(Clone, Debug)]
pub struct LatticePoint {
    pub weight: HypergeometricWeight,
    pub n: usize,
    pub r: Shift,
    pub s: Shift,
}

impl LatticePoint {
    pub fn new(weight: HypergeometricWeight, n: usize, r: Shift, s: Shift) -> Result<Self> {
        if r == s {
            return Err(Error::Precondition("lattice directions must differ".into()));
        }
        if matches!(r, Shift::Total) || matches!(s, Shift::Total) {
            return Err(Error::InvalidShift("lattice directions are single shifts".into()));
        }
        if n == 0 {
            return Err(Error::Precondition("lattice index starts at n = 1".into()));
        }
        for x in [r, s] {
            weight.shift_parameter(x)?;
        }
        Ok(Self { weight, n, r, s })
    }
}

/// Squared norms of the base weight and its `r`, `s` and `rs` shifts.
pub struct ShiftLattice {
    prec: u32,
    base: Pipeline,
    hat: Pipeline,
    tilde: Option<Pipeline>,
    both: Option<Pipeline>,
    c_hat: Float,
    c_tilde: Float,
}

impl ShiftLattice {
    /// Builds the four factorizations at size `size`; with `s = None` only the
    /// base and `r` directions are built.
    pub fn new(
        weight: &HypergeometricWeight,
        r: Shift,
        s: Option<Shift>,
        size: usize,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let prec = ctx.mantissa_bits;
        let base = Pipeline::new(weight, size, ctx)?;
        let wr = weight.shift_parameter(r)?;
        let hat = Pipeline::new(&wr, size, ctx)?;
        let c_hat = ctx.rational(&weight.shift_constant(r)?);
        let (tilde, both, c_tilde) = match s {
            Some(s) => {
                let ws = weight.shift_parameter(s)?;
                let wrs = wr.shift_parameter(s)?;
                (
                    Some(Pipeline::new(&ws, size, ctx)?),
                    Some(Pipeline::new(&wrs, size, ctx)?),
                    ctx.rational(&weight.shift_constant(s)?),
                )
            }
            None => (None, None, Float::with_val(prec, 1)),
        };
        Ok(Self { prec, base, hat, tilde, both, c_hat, c_tilde })
    }

    /// `u_n = H_{n-1}` of the base weight.
    pub fn u(&self, n: usize) -> Float {
        self.base.chol().h()[n - 1].clone()
    }

    pub fn u_hat(&self, n: usize) -> Float {
        Float::with_val(self.prec, &self.c_hat * &self.hat.chol().h()[n - 1])
    }

    fn u_tilde(&self, n: usize) -> Float {
        let t = self.tilde.as_ref().expect("lattice built without s");
        Float::with_val(self.prec, &self.c_tilde * &t.chol().h()[n - 1])
    }

    fn u_tilde_hat(&self, n: usize) -> Float {
        let b = self.both.as_ref().expect("lattice built without s");
        Float::with_val(self.prec, &self.c_hat * &self.c_tilde) * &b.chol().h()[n - 1]
    }

    /// `v_n = beta_{n-1}`.
    fn v(p: &Pipeline, n: usize) -> Float {
        p.jacobi().beta()[n - 1].clone()
    }

    /// Adds `(hatbar u - tildebar u) / ubar = tildehat u (1/tilde u - 1/hat u)` at `n`.
    pub fn nijhoff_capel(&self, r: &mut Residuals, label: &str, n: usize) -> Result<()> {
        let prec = self.prec;
        let (uh, ut) = (self.u_hat(n), self.u_tilde(n));
        if uh.is_zero() || ut.is_zero() {
            return Err(Error::Precondition(format!("vanishing shifted norm at n = {n}")));
        }
        let ub = self.u(n + 1);
        let a = Float::with_val(prec, &self.u_hat(n + 1) / &ub);
        let b = Float::with_val(prec, &self.u_tilde(n + 1) / &ub);
        let lhs = Float::with_val(prec, &a - &b);
        let inv = Float::with_val(prec, 1u32 / &ut) - Float::with_val(prec, 1u32 / &uh);
        let rhs = self.u_tilde_hat(n) * inv;
        let mut operand = a.abs();
        crate::precision::max_abs(&mut operand, &b);
        r.compare_with(label, &lhs, &rhs, &operand);
        Ok(())
    }

    /// Adds the two difference equations of the `u`-`v` system at `n`.
    pub fn uv_system(&self, r: &mut Residuals, n: usize) {
        let prec = self.prec;
        let (u, ub, ubb) = (self.u(n), self.u(n + 1), self.u(n + 2));
        let (uh, uhb) = (self.u_hat(n), self.u_hat(n + 1));
        let vb = Self::v(&self.base, n + 1);
        let vh = Self::v(&self.hat, n);
        let vhb = Self::v(&self.hat, n + 1);
        let lhs = Float::with_val(prec, &vhb - &vb);
        let rhs = Float::with_val(prec, &ubb / &uhb) - Float::with_val(prec, &ub / &uh);
        r.compare("difference_bar", &lhs, &rhs);
        let lhs = Float::with_val(prec, &vh - &vb);
        let rhs = Float::with_val(prec, &uh / &u) - Float::with_val(prec, &uhb / &ub);
        r.compare("difference_hat", &lhs, &rhs);
    }

    /// `hat v_1 (hat u_1 / u_1) = v_1 (hat u_1 / u_1) + ubar_1 / u_1`.
    pub fn boundary(&self, r: &mut Residuals) {
        let prec = self.prec;
        let q = Float::with_val(prec, &self.u_hat(1) / &self.u(1));
        let lhs = Float::with_val(prec, &Self::v(&self.hat, 1) * &q);
        let rhs = Float::with_val(prec, &Self::v(&self.base, 1) * &q) + Float::with_val(prec, &self.u(2) / &self.u(1));
        r.compare("boundary", &lhs, &rhs);
    }

    /// `theta_eta (ubar / hat u)` from the tau engine, i.e.
    /// `(ubar/hat u) (theta log H_n - theta log hat H_{n-1})`.
    pub fn ratio_derivative(&self, n: usize) -> Result<Float> {
        let prec = self.prec;
        let dlog = |p: &Pipeline, m: usize| -> Result<Float> {
            // theta log H_m = theta tau_{m+1} / tau_{m+1} - theta tau_m / tau_m
            let e = TauEngine::new(p.table());
            let d = crate::momentlin::FlowMultiIndex::new(1, 0, 0);
            let z = crate::momentlin::FlowMultiIndex::ZERO;
            let hi = e.tau_derivative(m + 1, d)? / e.tau_derivative(m + 1, z)?;
            let lo = e.tau_derivative(m, d)? / e.tau_derivative(m, z)?;
            Ok(hi - lo)
        };
        let ratio = Float::with_val(prec, &self.u(n + 1) / &self.u_hat(n));
        Ok(ratio * (dlog(&self.base, n)? - dlog(&self.hat, n - 1)?))
    }
}

fn prov(weight: &HypergeometricWeight, size: usize, prec: u32) -> Provenance {
    Provenance { weight: weight.to_string(), size, bits: prec }
}

/// Nijhoff-Capel residual at one lattice site.
pub fn nijhoff_capel_residual(pt: &LatticePoint, ctx: &PrecisionContext, tol: &Float) -> Result<CheckResult> {
    nijhoff_capel_sweep(&pt.weight, &[(pt.r, pt.s)], pt.n..=pt.n, ctx, tol)
}

/// Nijhoff-Capel residuals over shift pairs and `n` in `ns`, one component per pair.
pub fn nijhoff_capel_sweep(
    weight: &HypergeometricWeight,
    pairs: &[(Shift, Shift)],
    ns: std::ops::RangeInclusive<usize>,
    ctx: &PrecisionContext,
    tol: &Float,
) -> Result<CheckResult> {
    let size = *ns.end() + 1;
    let mut r = Residuals::new(ctx.mantissa_bits);
    for &(a, b) in pairs {
        LatticePoint::new(weight.clone(), (*ns.start()).max(1), a, b)?;
        let lat = ShiftLattice::new(weight, a, Some(b), size, ctx)?;
        let label = format!("{a},{b}");
        for n in ns.clone() {
            lat.nijhoff_capel(&mut r, &label, n)?;
        }
    }
    Ok(r.finish(
        "nijhoff_capel",
        tol,
        format!("n={}..={}", ns.start(), ns.end()),
        prov(weight, size, ctx.mantissa_bits),
    ))
}

/// The `u`-`v` difference system, its boundary relation and
/// `theta_eta (ubar/hat u) = hatbar u / hat u - ubar / u` (engine, with a
/// central-difference witness), for the shift `r` and `n` in `ns`.
pub fn uv_system_residual(
    weight: &HypergeometricWeight,
    r_shift: Shift,
    ns: std::ops::RangeInclusive<usize>,
    ctx: &PrecisionContext,
    tol: &Float,
) -> Result<CheckResult> {
    let prec = ctx.mantissa_bits;
    if *ns.start() == 0 {
        return Err(Error::Precondition("lattice index starts at n = 1".into()));
    }
    let size = *ns.end() + 2;
    let lat = ShiftLattice::new(weight, r_shift, None, size, ctx)?;
    let mut r = Residuals::new(prec);
    lat.boundary(&mut r);
    let step = ctx.fd_step();
    let top = *ns.end();
    let (plus, minus) = central_difference_pair(weight, 1, &step, |w| -> Result<Vec<Float>> {
        let base = Pipeline::unverified(w, top + 1, ctx)?;
        let hat = Pipeline::unverified(&w.shift_parameter(r_shift)?, top + 1, ctx)?;
        let c = ctx.rational(&w.shift_constant(r_shift)?);
        Ok((1..=top).map(|n| Float::with_val(prec, &base.chol().h()[n] / &hat.chol().h()[n - 1]) / &c).collect())
    })?;
    let two_h = Float::with_val(prec, &step) * 2u32;
    for n in ns.clone() {
        lat.uv_system(&mut r, n);
        let engine = lat.ratio_derivative(n)?;
        let rhs =
            Float::with_val(prec, &lat.u_hat(n + 1) / &lat.u_hat(n)) - Float::with_val(prec, &lat.u(n + 1) / &lat.u(n));
        r.compare("ratio_flow", &engine, &rhs);
        let fd = Float::with_val(prec, &plus[n - 1] - &minus[n - 1]) / &two_h;
        r.compare("ratio_flow_fd", &engine, &fd);
    }
    Ok(r.finish(
        "uv_system",
        tol,
        format!("n={}..={}, shift {r_shift}", ns.start(), ns.end()),
        prov(weight, size, prec),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn degenerate_direction_rejected() {
        let w = HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(1, 3)).unwrap();
        assert!(LatticePoint::new(w.clone(), 1, Shift::A(0), Shift::A(0)).is_err());
        assert!(LatticePoint::new(w, 0, Shift::A(0), Shift::B(0)).is_err());
    }

    #[test]
    fn two_a_weight_lattice() {
        let ctx = PrecisionContext::new(256);
        let w = HypergeometricWeight::new(vec![q(1, 1), q(2, 1)], vec![q(3, 1)], q(1, 4)).unwrap();
        let tol = Float::with_val(256, 1e-40);
        let c = nijhoff_capel_sweep(&w, &[(Shift::A(0), Shift::A(1))], 1..=4, &ctx, &tol).unwrap();
        assert!(c.pass, "{:?}", c.components);
        assert!(!c.max_residual.is_zero());
    }

    #[test]
    fn uv_system_meixner() {
        let ctx = PrecisionContext::new(256);
        let w = HypergeometricWeight::generalized_meixner(q(3, 2), q(5, 2), q(1, 3)).unwrap();
        let tol = Float::with_val(256, 1e-30);
        let c = uv_system_residual(&w, Shift::A(0), 1..=3, &ctx, &tol).unwrap();
        assert!(c.pass, "{:?}", c.components);
    }
}
