//! `pearson`: moments, recursion coefficients, structure matrices and the
//! residual suite from the command line.
//!
//! Exit status: 0 when every selected check passes, 1 on a failing check or a
//! computational error, 2 on a usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pearson_core::momentlin::MomentTable;
use pearson_core::opstruct::{laguerre_freud_matrix, Pipeline};
use pearson_core::precision::{fmt_digits, parse_tolerance};
use pearson_core::report::{emit_report, parse_list, render, run_suite, Format, Report, SuiteConfig};
use pearson_core::{Error, HypergeometricWeight, PrecisionContext, Shift};

#[derive(Parser)]
#[command(name = "pearson", version, about = "Discrete semiclassical orthogonal polynomials and their identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Weight spec, e.g. "a=3/2; b=5/2; eta=1/3" or "eta=1/2; eta2=0.9; eta3=0.9".
    #[arg(long)]
    weight: Option<String>,
    /// Truncation size k.
    #[arg(long)]
    size: Option<usize>,
    /// Mantissa bits.
    #[arg(long)]
    bits: Option<u32>,
    /// Relative tolerance, decimal or 2^e (default 2^-(bits/4)).
    #[arg(long)]
    tol: Option<String>,
    /// Write the report here instead of printing a summary.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format, json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Comma-separated check names.
    #[arg(long)]
    checks: Option<String>,
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Significant digits in printed tables.
    #[arg(long, default_value_t = 30)]
    digits: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the moments rho_0 .. rho_m.
    Moments {
        #[command(flatten)]
        common: Common,
        /// Highest moment index (default 2k).
        #[arg(long)]
        max: Option<usize>,
    },
    /// Print beta_n, gamma_n, H_n and p^1_n.
    Recurrence {
        #[command(flatten)]
        common: Common,
    },
    /// Print the diagonals of the Laguerre-Freud matrix Psi.
    Psi {
        #[command(flatten)]
        common: Common,
    },
    /// Run the residual suite.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Nijhoff-Capel sweep over shift pairs and n.
    Lattice {
        #[command(flatten)]
        common: Common,
        /// Shift pairs such as "A1:B1,A1:A2" (default: all valid pairs).
        #[arg(long)]
        pairs: Option<String>,
        /// Largest lattice index n.
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Tau relations, the Toda system and Sato-Wilson/Lax checks.
    Toda {
        #[command(flatten)]
        common: Common,
    },
    /// KP residuals for a deformed weight.
    Kp {
        #[command(flatten)]
        common: Common,
    },
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Usage(String),
    Compute(Error),
    Checks(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

fn config(common: &Common, default_size: usize) -> Result<SuiteConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            SuiteConfig::from_config_str(&text)?
        }
        None => {
            let spec =
                common.weight.as_deref().ok_or_else(|| Failure::Usage("--weight or --config is required".into()))?;
            SuiteConfig::new(spec.parse::<HypergeometricWeight>()?, default_size)
        }
    };
    if common.config.is_some() {
        if let Some(spec) = &common.weight {
            cfg.weight = spec.parse()?;
        }
    }
    if let Some(k) = common.size {
        cfg.size = k;
    }
    if let Some(b) = common.bits {
        cfg.bits = b;
    }
    if let Some(t) = &common.tol {
        cfg.tolerance = Some(parse_tolerance(t, cfg.bits)?);
    }
    if let Some(c) = &common.checks {
        cfg.checks = Some(parse_list(c));
    }
    Ok(cfg)
}

fn output_format(common: &Common) -> Result<Option<Format>, Failure> {
    common.format.as_deref().map(str::parse).transpose().map_err(Failure::from)
}

fn finish_report(report: &Report, common: &Common) -> Result<(), Failure> {
    let format = output_format(common)?;
    match (&common.out, format) {
        (Some(path), f) => {
            emit_report(report, f.unwrap_or(Format::Json), Path::new(path))?;
            print_summary(report, common.digits);
        }
        (None, Some(f)) => print!("{}", render(report, f)?),
        (None, None) => print_summary(report, common.digits),
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Checks(report.failures().iter().map(|s| s.to_string()).collect()))
    }
}

fn print_summary(report: &Report, digits: usize) {
    println!(
        "weight {}  k={}  bits={}  tol={}",
        report.weight,
        report.size,
        report.bits,
        fmt_digits(&report.tolerance, 6)
    );
    for c in &report.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:<20} max_residual={}  [{}]",
            c.name,
            fmt_digits(&c.max_residual, digits.min(12)),
            c.window
        );
    }
}

fn suite(
    common: &Common,
    default_size: usize,
    preset: &[&str],
    adjust: impl FnOnce(&mut SuiteConfig),
) -> Result<(), Failure> {
    let mut cfg = config(common, default_size)?;
    if cfg.checks.is_none() && !preset.is_empty() {
        let names: Vec<String> = preset
            .iter()
            .filter(|n| {
                pearson_core::report::registry::entry(n)
                    .map(|e| e.requirement.check(&cfg.weight).is_ok())
                    .unwrap_or(false)
            })
            .map(|s| s.to_string())
            .collect();
        cfg.checks = Some(names);
    }
    adjust(&mut cfg);
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let report = run_suite(&cfg)?;
    finish_report(&report, common)
}

fn ctx_for(common: &Common) -> PrecisionContext {
    PrecisionContext::new(common.bits.unwrap_or(pearson_core::precision::DEFAULT_BITS))
}

fn weight_for(common: &Common) -> Result<(HypergeometricWeight, usize), Failure> {
    let cfg = config(common, 10)?;
    Ok((cfg.weight, cfg.size))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Moments { common, max } => {
            let (w, k) = weight_for(&common)?;
            let ctx = ctx_for(&common);
            let m = max.unwrap_or(2 * k);
            let t = MomentTable::build(&w, m, &ctx).map_err(|e| Failure::Compute(e.in_check("moments")))?;
            for (i, v) in t.values().iter().enumerate() {
                println!("rho_{i} = {}", fmt_digits(v, common.digits));
            }
            Ok(())
        }
        Command::Recurrence { common } => {
            let (w, k) = weight_for(&common)?;
            let p = Pipeline::new(&w, k, &ctx_for(&common)).map_err(|e| Failure::Compute(e.in_check("recurrence")))?;
            let d = common.digits;
            println!("n\tbeta_n\tgamma_n\tH_n\tp1_n");
            for n in 0..k {
                println!(
                    "{n}\t{}\t{}\t{}\t{}",
                    fmt_digits(&p.jacobi().beta()[n], d),
                    fmt_digits(&p.jacobi().gamma()[n], d),
                    fmt_digits(&p.h()[n], d),
                    fmt_digits(&p.chol().coefficient(1, n), d)
                );
            }
            Ok(())
        }
        Command::Psi { common } => {
            let (w, k) = weight_for(&common)?;
            let ctx = ctx_for(&common);
            let tol = match &common.tol {
                Some(t) => parse_tolerance(t, ctx.mantissa_bits)?,
                None => ctx.default_tolerance(),
            };
            let p = Pipeline::new(&w, k, &ctx).map_err(|e| Failure::Compute(e.in_check("psi_routes")))?;
            let lf = laguerre_freud_matrix(&p, &tol).map_err(|e| Failure::Compute(e.in_check("psi_routes")))?;
            println!("Psi, exact on the leading {0}x{0} window", lf.window);
            print!("{}", lf.banded.dump());
            Ok(())
        }
        Command::Verify { common } => suite(&common, 12, &[], |_| {}),
        Command::Lattice { common, pairs, nmax } => {
            let parsed: Option<Vec<(Shift, Shift)>> = match pairs {
                Some(s) => Some(
                    parse_list(&s)
                        .iter()
                        .map(|p| {
                            let (a, b) =
                                p.split_once(':').ok_or_else(|| Failure::Usage(format!("pair `{p}` is not r:s")))?;
                            Ok((a.parse()?, b.parse()?))
                        })
                        .collect::<Result<_, Failure>>()?,
                ),
                None => None,
            };
            suite(&common, 8, &["nijhoff_capel", "uv_system"], |cfg| {
                if parsed.is_some() {
                    cfg.shift_pairs = parsed;
                }
                if let Some(n) = nmax {
                    cfg.lattice_n = Some(1..=n);
                }
            })
        }
        Command::Toda { common } => suite(&common, 12, &["tau_routes", "toda", "sato_wilson", "pearson_toda"], |_| {}),
        Command::Kp { common } => suite(&common, 4, &["kp"], |_| {}),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Checks(names)) => {
            eprintln!("failed checks: {}", names.join(", "));
            ExitCode::from(1)
        }
    }
}
