//! Check results, the registry, the suite runner and report serialization.

mod emit;
pub mod registry;
mod result;
mod suite;

pub use emit::{emit_report, parse_json, render, to_csv, to_json, CheckRecord, ComponentRecord, Format, ReportRecord};
pub use registry::{Requirement, REGISTRY};
pub use result::{CheckResult, Component, Provenance, Residuals};
pub use suite::{parse_list, run_suite, Report, SuiteConfig};
