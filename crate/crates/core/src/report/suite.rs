//! Suite configuration and the runner.

use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;

use super::registry::{self, REGISTRY};
use super::result::{CheckResult, Provenance};
use crate::error::{Error, Result};
use crate::hyperweight::{HypergeometricWeight, Shift};
use crate::integrable::{
    contiguous_gram_residual, kp_residual, nijhoff_capel_sweep, omega_connection, pearson_toda_residual,
    sato_wilson_lax_check, tau_route_crosscheck, toda_residuals, uv_system_residual,
};
use crate::opstruct::{
    coefficient_sum_check, gram_pearson_residual, pi_closed_form_check, polynomial_shift_identity,
    psi_extreme_diagonals, psi_jacobi_identities, psi_route_check, psi_routes, psi_window, recurrence_check,
    s_inverse_expansion_check, structure_cholesky, structure_shift_residual, BandedMatrix, LaguerreFreud, Pipeline,
};
use crate::precision::{parse_tolerance, PrecisionContext, DEFAULT_BITS};

/// What to run and at which settings.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub weight: HypergeometricWeight,
    pub size: usize,
    pub bits: u32,
    /// Defaults to `2^-(bits/4)`.
    pub tolerance: Option<Float>,
    /// `None` selects every check applicable to the weight.
    pub checks: Option<Vec<String>>,
    /// Lattice `n` range; defaults to `1..=min(6, k-2)`.
    pub lattice_n: Option<RangeInclusive<usize>>,
    /// Shift pairs for the lattice; defaults to all pairs of valid single shifts.
    pub shift_pairs: Option<Vec<(Shift, Shift)>>,
    pub flows: Vec<usize>,
    /// Number of random sample points `z` in `[0, 5]`.
    pub samples: usize,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(weight: HypergeometricWeight, size: usize) -> Self {
        Self {
            weight,
            size,
            bits: DEFAULT_BITS,
            tolerance: None,
            checks: None,
            lattice_n: None,
            shift_pairs: None,
            flows: vec![1, 2],
            samples: 10,
            seed: 0x5eed,
        }
    }

    pub fn ctx(&self) -> PrecisionContext {
        PrecisionContext::new(self.bits)
    }

    pub fn tolerance(&self) -> Float {
        self.tolerance.clone().unwrap_or_else(|| self.ctx().default_tolerance())
    }

    /// The selected checks in registry order.
    pub fn selected(&self) -> Vec<&'static str> {
        match &self.checks {
            None => registry::applicable(&self.weight),
            Some(list) => REGISTRY.iter().filter(|e| list.iter().any(|c| c == e.name)).map(|e| e.name).collect(),
        }
    }

    pub fn lattice_range(&self) -> RangeInclusive<usize> {
        self.lattice_n.clone().unwrap_or(1..=6.min(self.size.saturating_sub(2)).max(1))
    }

    pub fn pairs(&self) -> Vec<(Shift, Shift)> {
        if let Some(p) = &self.shift_pairs {
            return p.clone();
        }
        let s = self.weight.single_shifts();
        let mut out = Vec::new();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                out.push((s[i], s[j]));
            }
        }
        out
    }

    /// Random sample points, deterministic in `seed`.
    pub fn sample_points(&self) -> Vec<Float> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.samples).map(|_| Float::with_val(self.bits, rng.gen_range(0.0..5.0))).collect()
    }

    /// Rejects bad sizes, unknown or empty selections and unmet requirements.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(format!("configuration: {m}")));
        if self.size < 3 {
            return bad(format!("size must be at least 3, got {}", self.size));
        }
        self.ctx().validate()?;
        if let Some(list) = &self.checks {
            if list.is_empty() {
                return bad("no checks selected".into());
            }
            for c in list {
                let Some(e) = registry::entry(c) else {
                    return bad(format!("unknown check `{c}`"));
                };
                if let Err(m) = e.requirement.check(&self.weight) {
                    return bad(format!("`{c}` {m}"));
                }
            }
        }
        if self.selected().is_empty() {
            return bad("no applicable checks".into());
        }
        if self.flows.iter().any(|&l| l == 0 || l > 2) {
            return bad("flows must be 1 or 2".into());
        }
        let r = self.lattice_range();
        if *r.start() == 0 || r.is_empty() {
            return bad("lattice range must start at n >= 1".into());
        }
        for (a, b) in self.pairs() {
            if a == b {
                return bad(format!("lattice pair {a},{b} repeats a shift"));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys: `weight`, `size`,
    /// `bits`, `tol`, `checks`, `lattice_n` (`1..6`), `pairs` (`A1:B1, A1:A2`),
    /// `flows`, `samples`, `seed`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut weight = None;
        let mut size = 12;
        let mut rest: Vec<(String, String)> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("expected `key = value`, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "weight" => weight = Some(HypergeometricWeight::from_str(v)?),
                "size" => size = parse_int(k, v)?,
                _ => rest.push((k.to_string(), v.to_string())),
            }
        }
        let weight = weight.ok_or_else(|| Error::Parse("config needs a `weight` line".into()))?;
        let mut cfg = SuiteConfig::new(weight, size);
        let mut tol = None;
        for (k, v) in rest {
            match k.as_str() {
                "bits" => cfg.bits = parse_int(&k, &v)?,
                "tol" => tol = Some(v),
                "checks" => cfg.checks = Some(parse_list(&v)),
                "lattice_n" => {
                    let (a, b) =
                        v.split_once("..").ok_or_else(|| Error::Parse(format!("lattice_n `{v}` is not `a..b`")))?;
                    cfg.lattice_n = Some(parse_int(&k, a)?..=parse_int(&k, b.trim_start_matches('='))?);
                }
                "pairs" => {
                    let mut pairs = Vec::new();
                    for p in parse_list(&v) {
                        let (a, b) =
                            p.split_once(':').ok_or_else(|| Error::Parse(format!("pair `{p}` is not `r:s`")))?;
                        pairs.push((a.parse()?, b.parse()?));
                    }
                    cfg.shift_pairs = Some(pairs);
                }
                "flows" => {
                    cfg.flows = parse_list(&v).iter().map(|x| parse_int(&k, x)).collect::<Result<_>>()?;
                }
                "samples" => cfg.samples = parse_int(&k, &v)?,
                "seed" => cfg.seed = parse_int(&k, &v)?,
                _ => return Err(Error::Parse(format!("unknown config key `{k}`"))),
            }
        }
        if let Some(t) = tol {
            cfg.tolerance = Some(parse_tolerance(&t, cfg.bits)?);
        }
        Ok(cfg)
    }
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("`{key}` expects an integer, got `{v}`")))
}

/// Splits a comma-separated list, dropping empty items.
pub fn parse_list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Outcome of a suite run; `pass` is the conjunction of the checks.
#[derive(Clone, Debug)]
pub struct Report {
    pub weight: String,
    pub size: usize,
    pub bits: u32,
    pub tolerance: Float,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl Report {
    pub fn new(weight: String, size: usize, bits: u32, tolerance: Float, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { weight, size, bits, tolerance, checks, pass }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Names of the failing checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Concatenates sub-results (one per shift) into a single result named `name`.
fn merge(name: &str, parts: Vec<(String, CheckResult)>, tol: &Float, window: String, prov: Provenance) -> CheckResult {
    let prec = tol.prec();
    let mut components = Vec::new();
    for (prefix, c) in parts {
        for mut comp in c.components {
            comp.label = format!("{prefix}/{}", comp.label);
            components.push(comp);
        }
    }
    let mut max_residual = Float::new(prec);
    let mut scale = Float::with_val(prec, 1);
    for c in &components {
        if c.max_residual.is_nan() || (!max_residual.is_nan() && c.max_residual > max_residual) {
            max_residual = c.max_residual.clone();
            scale = c.scale.clone();
        }
    }
    CheckResult {
        name: name.to_string(),
        description: registry::description(name).unwrap_or("").to_string(),
        max_residual,
        scale,
        tolerance: tol.clone(),
        pass: false,
        window,
        provenance: prov,
        components,
    }
    .with_tolerance(tol.clone())
}

/// Shared inputs of one suite run.
struct Shared<'a> {
    cfg: &'a SuiteConfig,
    ctx: PrecisionContext,
    tol: Float,
    pipe: Pipeline,
    lf: Option<LaguerreFreud>,
    zs: Vec<Float>,
}

impl Shared<'_> {
    fn lf(&self) -> &LaguerreFreud {
        self.lf.as_ref().expect("Psi is built whenever a Psi check is selected")
    }

    fn run(&self, name: &str) -> Result<CheckResult> {
        let p = &self.pipe;
        let tol = &self.tol;
        let w = &self.cfg.weight;
        let k = self.cfg.size;
        let prov = p.provenance();
        match name {
            "gram_pearson" => gram_pearson_residual(p.table(), k, tol, prov),
            "recurrence" => {
                recurrence_check(w, p.jacobi(), &p.polys(), p.chol().h(), &self.zs, k.min(6), &self.ctx, tol, prov)
            }
            "coefficient_sums" => Ok(coefficient_sum_check(p.jacobi(), &p.polys(), tol, prov)),
            "pi_closed_forms" => Ok(pi_closed_form_check(&p.s(), p.jacobi().beta(), tol, prov)),
            "s_inverse" => Ok(s_inverse_expansion_check(&p.s(), tol, prov)),
            "pascal_shift" => Ok(polynomial_shift_identity(p, &p.pearson_coeffs().0, tol)),
            "psi_routes" => Ok(self.lf().check.clone()),
            "psi_extreme" => Ok(psi_extreme_diagonals(self.lf(), p, tol)),
            "psi_shift" => Ok(structure_shift_residual(self.lf(), p, &self.zs, tol)),
            "psi_jacobi" => Ok(psi_jacobi_identities(self.lf(), p, tol)),
            "structure_cholesky" => Ok(structure_cholesky(self.lf(), p, tol)?.check),
            "contiguous" => {
                let mut shifts = w.single_shifts();
                shifts.push(Shift::Total);
                contiguous_gram_residual(w, k, &shifts, &self.ctx, tol)
            }
            "omega" => {
                let mut parts = Vec::new();
                for s in w.single_shifts() {
                    parts.push((s.to_string(), omega_connection(p, s, &self.zs, tol)?.check));
                }
                Ok(merge(name, parts, tol, format!("{k}x{k}"), prov))
            }
            "nijhoff_capel" => nijhoff_capel_sweep(w, &self.cfg.pairs(), self.cfg.lattice_range(), &self.ctx, tol),
            "uv_system" => {
                let ns = self.cfg.lattice_range();
                let window = format!("n={}..={}", ns.start(), ns.end());
                let mut parts = Vec::new();
                for s in w.single_shifts() {
                    parts.push((s.to_string(), uv_system_residual(w, s, ns.clone(), &self.ctx, tol)?));
                }
                Ok(merge(name, parts, tol, window, prov))
            }
            "tau_routes" => tau_route_crosscheck(p, tol),
            "toda" => toda_residuals(p, &self.zs, tol),
            "sato_wilson" => sato_wilson_lax_check(p, &self.cfg.flows, tol),
            "pearson_toda" => pearson_toda_residual(p, tol),
            "kp" => kp_residual(w, 1..=k.min(4), &self.ctx, tol),
            other => Err(Error::Precondition(format!("unknown check `{other}`"))),
        }
    }
}

/// Builds `Psi` without failing on route disagreement; the disagreement is
/// reported by the `psi_routes` check instead.
fn build_psi(p: &Pipeline, tol: &Float) -> Result<LaguerreFreud> {
    let routes = psi_routes(p)?;
    let check = psi_route_check(p, &routes, tol);
    let (n, m) = (p.weight().n(), p.weight().m());
    let psi = routes[1].clone();
    Ok(LaguerreFreud { banded: BandedMatrix::from_mat(&psi, m, n + 1), psi, window: psi_window(p), check })
}

/// Runs the selected checks over one shared moment table and factorization.
/// Results keep registry order; the first error is returned with its check name.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let selected = cfg.selected();
    let ctx = cfg.ctx();
    let tol = cfg.tolerance();
    let k = cfg.size;
    let extra =
        selected.iter().filter_map(|n| registry::entry(n)).map(|e| (e.extra_depth)(&cfg.weight)).max().unwrap_or(0);
    let pipe = Pipeline::with_depth(&cfg.weight, k, 2 * k + extra, &ctx, true).map_err(|e| e.in_check(selected[0]))?;
    let needs_psi = selected.iter().any(|n| n.starts_with("psi_") || *n == "structure_cholesky");
    let lf = if needs_psi { Some(build_psi(&pipe, &tol).map_err(|e| e.in_check("psi_routes"))?) } else { None };
    let shared = Shared { cfg, ctx, tol: tol.clone(), pipe, lf, zs: cfg.sample_points() };
    let results: Vec<Result<CheckResult>> =
        selected.par_iter().map(|n| shared.run(n).map_err(|e| e.in_check(n))).collect();
    let checks = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Report::new(cfg.weight.to_string(), k, cfg.bits, tol, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn deformed_gram_request_is_a_config_error() {
        let w = HypergeometricWeight::charlier(Rational::from((1, 2)))
            .with_deformation(Rational::from((9, 10)), Rational::from((9, 10)))
            .unwrap();
        let mut cfg = SuiteConfig::new(w, 6);
        cfg.checks = Some(vec!["gram_pearson".into()]);
        assert!(matches!(cfg.validate(), Err(Error::Precondition(_))));
        cfg.checks = Some(vec![]);
        assert!(cfg.validate().is_err());
        cfg.checks = Some(vec!["nope".into()]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_file_round() {
        let cfg = SuiteConfig::from_config_str(
            "# lattice run\nweight = a=3/2; b=5/2; eta=1/3\nsize = 8\nbits = 256\ntol = 2^-60\nchecks = nijhoff_capel, omega\npairs = A1:B1\nlattice_n = 1..3\n",
        )
        .unwrap();
        assert_eq!(cfg.size, 8);
        assert_eq!(cfg.selected(), vec!["omega", "nijhoff_capel"]);
        assert_eq!(cfg.pairs(), vec![(Shift::A(0), Shift::B(0))]);
        assert_eq!(cfg.lattice_range(), 1..=3);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn samples_are_deterministic() {
        let cfg = SuiteConfig::new(HypergeometricWeight::charlier(Rational::from(1)), 5);
        let a = cfg.sample_points();
        assert_eq!(a, cfg.sample_points());
        assert!(a.iter().all(|z| *z >= 0 && *z <= 5));
    }
}
