//! Files and batch runs around `netmaint_core`: TOML configs, the MIQP text
//! format, the three-strategy case study and its CSV reports.

pub mod case_study;
pub mod config;
pub mod miqp_text;
pub mod report;

pub use case_study::{compare_modes, solve_case_study, CaseStudy, ComparisonRow, Mode, RunManifest, UnknownOutcome};
pub use config::{load_config, parse_config, write_config, Config, ConfigError};
pub use report::{write_case_study, RunError};

/// Loads the manifest's config, solves the requested modes and writes the
/// reports.
pub fn run_case_study(manifest: &RunManifest) -> Result<CaseStudy, RunError> {
    let config = manifest.apply(load_config(&manifest.config)?);
    let study = solve_case_study(&config, manifest.mode)?;
    write_case_study(&study, manifest)?;
    Ok(study)
}
