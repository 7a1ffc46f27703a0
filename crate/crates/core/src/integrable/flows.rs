//! Toda flows: tau relations, the Toda system, Sato-Wilson/Lax/Zakharov-Shabat
//! and the KP equation. Flow derivatives come from the tau engine; central
//! differences appear only where the factor `S` itself is differentiated.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::hyperweight::HypergeometricWeight;
use crate::linalg::Mat;
use crate::momentlin::{central_difference_pair, log_tau_jet, FlowMultiIndex, Jet, MomentTable, Multi, TauEngine};
use crate::opstruct::{JacobiMatrix, Pipeline};
use crate::precision::PrecisionContext;
use crate::report::{CheckResult, Provenance, Residuals};

/// Mixed flow derivatives of `log tau_n` for `n = 0..=nmax`, plus `tau_n` itself.
#[derive(Clone, Debug)]
pub struct FlowDerivatives {
    jets: Vec<Jet>,
    taus: Vec<Float>,
}

impl FlowDerivatives {
    /// Jets over the down-closure of `generators` (total order at most 5).
    pub fn new(table: &MomentTable, nmax: usize, generators: &[Multi]) -> Result<Self> {
        let engine = TauEngine::new(table);
        let mut jets = Vec::with_capacity(nmax + 1);
        let mut taus = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            jets.push(log_tau_jet(&engine, n, generators)?);
            taus.push(engine.tau_derivative(n, FlowMultiIndex::ZERO)?);
        }
        Ok(Self { jets, taus })
    }

    pub fn nmax(&self) -> usize {
        self.jets.len() - 1
    }

    /// `theta^a log tau_n`.
    pub fn d(&self, n: usize, a: Multi) -> Float {
        self.jets[n].derivative(a)
    }

    pub fn tau(&self, n: usize) -> &Float {
        &self.taus[n]
    }

    /// `theta^a beta_n`, from `beta_n = theta_1 log(tau_{n+1} / tau_n)`.
    pub fn beta(&self, n: usize, a: Multi) -> Float {
        let b = [a[0] + 1, a[1], a[2]];
        self.d(n + 1, b) - self.d(n, b)
    }

    /// `theta^a gamma_n`, from `gamma_n = theta_1^2 log tau_n`.
    pub fn gamma(&self, n: usize, a: Multi) -> Float {
        self.d(n, [a[0] + 2, a[1], a[2]])
    }
}

fn window_nmax(p: &Pipeline, extra: usize) -> usize {
    8.min(p.size().saturating_sub(1 + extra))
}

/// `H_n = tau_{n+1}/tau_n`, `p^1_n = -theta tau_n / tau_n`,
/// `gamma_n = theta^2 log tau_n`, `beta_n = theta log(tau_{n+1}/tau_n)` and
/// `theta^2 log tau_n = tau_{n+1} tau_{n-1} / tau_n^2`, for `n <= min(8, k-1)`.
pub fn tau_route_crosscheck(p: &Pipeline, tol: &Float) -> Result<CheckResult> {
    let prec = p.prec();
    let nmax = window_nmax(p, 0);
    let fd = FlowDerivatives::new(p.table(), nmax + 1, &[[2, 0, 0]])?;
    let chol = p.chol();
    let j = p.jacobi();
    let mut r = Residuals::new(prec);
    for n in 0..=nmax {
        let ratio = Float::with_val(prec, fd.tau(n + 1) / fd.tau(n));
        r.compare("norm", &chol.h()[n], &ratio);
        r.compare("p1", &chol.coefficient(1, n), &-fd.d(n, [1, 0, 0]));
        r.compare("gamma", &j.gamma()[n], &fd.d(n, [2, 0, 0]));
        r.compare("beta", &j.beta()[n], &fd.beta(n, [0, 0, 0]));
        if n >= 1 {
            let hirota =
                Float::with_val(prec, fd.tau(n + 1) * fd.tau(n - 1)) / Float::with_val(prec, fd.tau(n).square_ref());
            r.compare("hirota", &fd.d(n, [2, 0, 0]), &hirota);
        }
    }
    Ok(r.finish("tau_routes", tol, format!("n=0..={nmax}"), p.provenance()))
}

/// Toda system and equations with engine derivatives, plus
/// `theta P_n(z) = -gamma_n P_{n-1}(z)` by central difference at the samples `zs`.
pub fn toda_residuals(p: &Pipeline, zs: &[Float], tol: &Float) -> Result<CheckResult> {
    let prec = p.prec();
    let nmax = window_nmax(p, 1);
    let fd = FlowDerivatives::new(p.table(), nmax + 2, &[[2, 0, 0]])?;
    let j = p.jacobi();
    let (beta, gamma) = (j.beta(), j.gamma());
    let h = p.chol().h();
    let mut r = Residuals::new(prec);
    for n in 0..=nmax {
        let rhs = Float::with_val(prec, &gamma[n + 1] - &gamma[n]);
        r.compare("system_beta", &fd.beta(n, [1, 0, 0]), &rhs);

        let up = Float::with_val(prec, &h[n + 1] / &h[n]);
        let down = if n == 0 { Float::new(prec) } else { Float::with_val(prec, &h[n] / &h[n - 1]) };
        let lhs = fd.d(n + 1, [2, 0, 0]) - fd.d(n, [2, 0, 0]);
        r.compare("equation_q", &lhs, &(up - down));

        r.compare("p1_flow", &-fd.d(n, [2, 0, 0]), &-gamma[n].clone());

        if n >= 1 {
            let dlog = |a: Multi| fd.d(n + 1, a) + fd.d(n - 1, a) - Float::with_val(prec, fd.d(n, a) * 2u32);
            let rhs = Float::with_val(prec, &beta[n] - &beta[n - 1]);
            r.compare("system_gamma", &dlog([1, 0, 0]), &rhs);
            let rhs = Float::with_val(prec, &gamma[n + 1] + &gamma[n - 1]) - Float::with_val(prec, &gamma[n] * 2u32);
            r.compare_with("equation_gamma", &dlog([2, 0, 0]), &rhs, &gamma[n]);
        } else {
            r.compare("system_gamma", &fd.d(1, [1, 0, 0]), &beta[0]);
        }
    }
    if !zs.is_empty() {
        let ctx = p.ctx();
        let len = nmax + 1;
        let step = ctx.fd_step();
        let (plus, minus) = central_difference_pair(p.weight(), 1, &step, |w| -> Result<Vec<Vec<Float>>> {
            let q = Pipeline::unverified(w, len, ctx)?;
            Ok(zs.iter().map(|z| q.jacobi().polynomials_at(z, len)).collect())
        })?;
        let two_h = Float::with_val(prec, &step) * 2u32;
        for (zi, z) in zs.iter().enumerate() {
            let vals = j.polynomials_at(z, len);
            for n in 1..len {
                let d = Float::with_val(prec, &plus[zi][n] - &minus[zi][n]) / &two_h;
                let rhs = -Float::with_val(prec, &gamma[n] * &vals[n - 1]);
                r.compare_with("polynomial_flow", &d, &rhs, &vals[n]);
            }
        }
    }
    Ok(r.finish("toda", tol, format!("n=0..={nmax}"), p.provenance()))
}

/// `J^l` as a dense `k x k` matrix (exact on the leading `(k-l+1)` window).
fn j_power(j: &JacobiMatrix, l: usize) -> Mat {
    let m = j.to_mat();
    let mut out = Mat::identity(m.rows(), m.prec());
    for _ in 0..l {
        out = out.mul(&m);
    }
    out
}

/// Tridiagonal matrix with diagonal `d`, subdiagonal `s` (`s[n]` at `(n, n-1)`) and superdiagonal `sup`.
fn tridiagonal(k: usize, prec: u32, d: impl Fn(usize) -> Float, s: impl Fn(usize) -> Float, sup: &Float) -> Mat {
    Mat::from_fn(k, k, prec, |i, j| {
        if i == j {
            d(i)
        } else if i == j + 1 {
            s(i)
        } else if j == i + 1 {
            sup.clone()
        } else {
            Float::new(prec)
        }
    })
}

/// Whether `eta_l (1 +- h)` stays inside the convergence region.
pub fn flow_fd_available(weight: &HypergeometricWeight, l: usize) -> bool {
    match l {
        1 => true,
        _ => {
            let e = weight.flow_parameter(l);
            weight.is_deformed() && e.clone().abs() < 1
        }
    }
}

/// Residuals of `Phi_l + (J^l)_-` with `Phi_l = (theta_l S) S^{-1}` by central
/// difference with step `step`, on the window `k - l`.
pub fn phi_fd_residual(p: &Pipeline, l: usize, step: &Rational) -> Result<Float> {
    let mut r = Residuals::new(p.prec());
    phi_fd_into(p, l, step, &mut r, "phi")?;
    Ok(r.max_residual())
}

fn phi_fd_into(p: &Pipeline, l: usize, step: &Rational, r: &mut Residuals, label: &str) -> Result<()> {
    let prec = p.prec();
    let k = p.size();
    let ctx = p.ctx();
    let (plus, minus) =
        central_difference_pair(p.weight(), l, step, |w| -> Result<Mat> { Ok(Pipeline::unverified(w, k, ctx)?.s()) })?;
    let two_h = Float::with_val(prec, step) * 2u32;
    let inv = Float::with_val(prec, 1u32 / two_h);
    let ds = plus.sub(&minus).scale(&inv);
    let phi = ds.mul(&p.s().unit_lower_inverse());
    let jl = j_power(p.jacobi(), l).strictly_lower();
    let w = k - l;
    r.compare_mat_with(label, &phi, &jl.scale(&Float::with_val(prec, -1)), &jl, w);
    Ok(())
}

/// Sato-Wilson, Lax and Zakharov-Shabat residuals for the flows in `flows`:
/// `theta_l log H_n = (J^l)_nn`, `Phi_l = -(J^l)_-` (central difference, only
/// where `eta_l` can be moved both ways), `theta_l J = [(J^l)_+, J]`, and
/// `theta_1 (J^2)_+ - theta_2 J_+ + [(J^2)_+, J_+] = 0`.
pub fn sato_wilson_lax_check(p: &Pipeline, flows: &[usize], tol: &Float) -> Result<CheckResult> {
    let prec = p.prec();
    let k = p.size();
    if flows.iter().any(|&l| l == 0 || l > 2) {
        return Err(Error::Precondition("Sato-Wilson flows are 1 and 2".into()));
    }
    if k < 4 {
        return Err(Error::Precondition("Sato-Wilson check needs k >= 4".into()));
    }
    let fd = FlowDerivatives::new(p.table(), k, &[[3, 0, 0], [2, 1, 0]])?;
    let j = p.jacobi();
    let jm = j.to_mat();
    let zero = Float::new(prec);
    let d_j = |a: Multi| tridiagonal(k, prec, |n| fd.beta(n, a), |n| fd.gamma(n, a), &zero);
    let mut r = Residuals::new(prec);
    for &l in flows {
        let a: Multi = if l == 1 { [1, 0, 0] } else { [0, 1, 0] };
        let jl = j_power(j, l);
        let w = k - l;
        for n in 0..w {
            let dlog_h = fd.d(n + 1, a) - fd.d(n, a);
            r.compare(&format!("log_h_{l}"), &dlog_h, &jl[(n, n)]);
        }
        if flow_fd_available(p.weight(), l) {
            phi_fd_into(p, l, &p.ctx().fd_step(), &mut r, &format!("phi_{l}"))?;
        }
        let lax = jl.upper().commutator(&jm);
        r.compare_mat_with(&format!("lax_{l}"), &d_j(a), &lax, &jm, w - 1);
    }
    // theta_1 (J^2)_+ by the product rule on the engine derivatives of J.
    let dj1 = d_j([1, 0, 0]);
    let d_j2 = dj1.mul(&jm).add(&jm.mul(&dj1)).upper();
    let j_plus = jm.upper();
    let j2_plus = j_power(j, 2).upper();
    let d2_jplus = d_j([0, 1, 0]).upper();
    let lhs = d_j2.sub(&d2_jplus);
    let rhs = j2_plus.commutator(&j_plus).scale(&Float::with_val(prec, -1));
    r.compare_mat_with("zakharov_shabat", &lhs, &rhs, &j2_plus, k - 3);
    let list: Vec<String> = flows.iter().map(|l| l.to_string()).collect();
    Ok(r.finish("sato_wilson", tol, format!("flows {}, window k-l-1", list.join(",")), p.provenance()))
}

/// KP residual `theta_1(4 theta_3 p + 6 (theta_1 p)^2 - theta_1^3 p) - 3 theta_2^2 p`
/// with `p = p^1_n = -theta_1 log tau_n`, for `n` in `ns`, plus a central-difference
/// witness for `theta_2^2 p`.
pub fn kp_residual(
    weight: &HypergeometricWeight,
    ns: std::ops::RangeInclusive<usize>,
    ctx: &PrecisionContext,
    tol: &Float,
) -> Result<CheckResult> {
    let d = weight.deformation().ok_or_else(|| Error::Precondition("KP needs a deformed weight".into()))?;
    if d.eta2.clone().abs() >= 1 || d.eta3.clone().abs() >= 1 {
        return Err(Error::Precondition("KP needs |eta2|, |eta3| < 1".into()));
    }
    let prec = ctx.mantissa_bits;
    let nmax = *ns.end();
    let depth = 2 * nmax + 4;
    let table = MomentTable::build(weight, depth, ctx)?;
    let generators: [Multi; 3] = [[5, 0, 0], [2, 0, 1], [1, 2, 0]];
    let fd = FlowDerivatives::new(&table, nmax, &generators)?;
    let mut r = Residuals::new(prec);
    for n in ns.clone() {
        let p1 = -fd.d(n, [2, 0, 0]);
        let p11 = -fd.d(n, [3, 0, 0]);
        let p1111 = -fd.d(n, [5, 0, 0]);
        let p13 = -fd.d(n, [2, 0, 1]);
        let p22 = -fd.d(n, [1, 2, 0]);
        let t1 = Float::with_val(prec, &p13 * 4u32);
        let t2 = Float::with_val(prec, &p1 * &p11) * 12u32;
        let lhs = Float::with_val(prec, &t1 + &t2) - &p1111;
        let rhs = Float::with_val(prec, &p22 * 3u32);
        let mut operand = t1.abs();
        crate::precision::max_abs(&mut operand, &t2);
        crate::precision::max_abs(&mut operand, &p1111);
        r.compare_with("kp", &lhs, &rhs, &operand);
    }
    let step = ctx.fd_step();
    let (plus, minus) = central_difference_pair(weight, 2, &step, |w| -> Result<Vec<Float>> {
        let t = MomentTable::build(w, depth, ctx)?;
        let e = FlowDerivatives::new(&t, nmax, &[[1, 1, 0]])?;
        Ok(ns.clone().map(|n| -e.d(n, [1, 1, 0])).collect())
    })?;
    let two_h = Float::with_val(prec, &step) * 2u32;
    for (i, n) in ns.clone().enumerate() {
        let fd_val = Float::with_val(prec, &plus[i] - &minus[i]) / &two_h;
        r.compare("fd_witness", &-fd.d(n, [1, 2, 0]), &fd_val);
    }
    let prov = Provenance { weight: weight.to_string(), size: nmax, bits: prec };
    Ok(r.finish("kp", tol, format!("n={}..={}", ns.start(), nmax), prov))
}
