//! Central finite differences in the flow parameters, used as a second witness
//! for engine-computed derivatives.

use rug::{Float, Rational};

use crate::error::Result;
use crate::hyperweight::HypergeometricWeight;

/// `[f(eta_l (1+h)) - f(eta_l (1-h))] / (2h)`, which approximates `theta_l f`.
pub fn central_difference<F>(weight: &HypergeometricWeight, l: usize, step: &Rational, f: F) -> Result<Float>
where
    F: Fn(&HypergeometricWeight) -> Result<Float>,
{
    let (plus, minus) = central_difference_pair(weight, l, step, &f)?;
    let prec = plus.prec();
    let two_h = Float::with_val(prec, step) * 2u32;
    Ok(Float::with_val(prec, &plus - &minus) / two_h)
}

/// `f` at `eta_l (1 + h)` and `eta_l (1 - h)`.
pub fn central_difference_pair<T, F>(weight: &HypergeometricWeight, l: usize, step: &Rational, f: F) -> Result<(T, T)>
where
    F: Fn(&HypergeometricWeight) -> Result<T>,
{
    let eta = weight.flow_parameter(l);
    let up = eta.clone() * (1 + step.clone());
    let down = eta * (1 - step.clone());
    let plus = f(&weight.with_flow_parameter(l, up))?;
    let minus = f(&weight.with_flow_parameter(l, down))?;
    Ok((plus, minus))
}

/// Outcome of comparing an engine derivative with a central difference.
#[derive(Clone, Debug)]
pub struct FdWitness {
    pub engine: Float,
    pub finite_difference: Float,
    /// `|engine - fd| / scale`.
    pub residual: Float,
    pub scale: Float,
    pub step: Rational,
}

/// Relative gap between an engine derivative and its central-difference estimate.
pub fn derivative_fd_crosscheck<F>(
    weight: &HypergeometricWeight,
    l: usize,
    step: &Rational,
    engine: &Float,
    f: F,
) -> Result<FdWitness>
where
    F: Fn(&HypergeometricWeight) -> Result<Float>,
{
    let fd = central_difference(weight, l, step, f)?;
    let prec = engine.prec();
    let mut scale = engine.clone().abs();
    crate::precision::max_abs(&mut scale, &fd);
    if scale.is_zero() {
        scale = Float::with_val(prec, 1);
    }
    let residual = Float::with_val(prec, engine - &fd).abs() / &scale;
    Ok(FdWitness { engine: engine.clone(), finite_difference: fd, residual, scale, step: step.clone() })
}

/// Residuals of a central difference as the step is halved repeatedly.
#[derive(Clone, Debug)]
pub struct FdConvergence {
    pub steps: Vec<Rational>,
    pub residuals: Vec<Float>,
}

impl FdConvergence {
    /// `residual(h/2) / residual(h)` for each halving.
    pub fn ratios(&self) -> Vec<Float> {
        self.residuals
            .windows(2)
            .map(|w| {
                if w[0].is_zero() {
                    Float::with_val(w[0].prec(), 0)
                } else {
                    Float::with_val(w[0].prec(), &w[1] / &w[0])
                }
            })
            .collect()
    }

    /// Every halving shrinks the residual by at least `1/max_ratio`, except where
    /// the residual is already at or below `floor`.
    pub fn is_second_order(&self, max_ratio: f64, floor: &Float) -> bool {
        self.residuals.windows(2).all(|w| w[1] <= *floor || w[1] <= Float::with_val(w[0].prec(), &w[0] * max_ratio))
    }
}

/// Runs [`derivative_fd_crosscheck`] for `start`, `start/2`, ... (`halvings` times).
pub fn fd_convergence<F>(
    weight: &HypergeometricWeight,
    l: usize,
    start: &Rational,
    halvings: usize,
    engine: &Float,
    f: F,
) -> Result<FdConvergence>
where
    F: Fn(&HypergeometricWeight) -> Result<Float>,
{
    let mut steps = Vec::new();
    let mut residuals = Vec::new();
    let mut h = start.clone();
    for _ in 0..=halvings {
        let w = derivative_fd_crosscheck(weight, l, &h, engine, &f)?;
        steps.push(h.clone());
        residuals.push(w.residual);
        h /= 2;
    }
    Ok(FdConvergence { steps, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momentlin::series::moment;
    use crate::precision::PrecisionContext;

    #[test]
    fn first_moment_is_flow_derivative_of_zeroth() {
        let ctx = PrecisionContext::new(256);
        let w = HypergeometricWeight::charlier(Rational::from((7, 10)));
        let rho1 = moment(&w, 1, &ctx).unwrap();
        let step = ctx.fd_step();
        let wit = derivative_fd_crosscheck(&w, 1, &step, &rho1, |w| moment(w, 0, &ctx)).unwrap();
        let h2 = Float::with_val(256, &step).square();
        assert!(wit.residual <= h2);
    }

    #[test]
    fn halving_shows_second_order() {
        let ctx = PrecisionContext::new(256);
        let w = HypergeometricWeight::meixner(Rational::from(2), Rational::from((1, 3)));
        let rho1 = moment(&w, 1, &ctx).unwrap();
        let conv = fd_convergence(&w, 1, &Rational::from((1, 1 << 10)), 3, &rho1, |w| moment(w, 0, &ctx)).unwrap();
        for r in conv.ratios() {
            assert!(r < 0.26 && r > 0.24, "{r}");
        }
        assert!(conv.is_second_order(0.3, &Float::with_val(256, 1e-60)));
    }
}
