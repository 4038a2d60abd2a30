use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use netmaint::{load_config, run_case_study, Mode, RunError, RunManifest};
use netmaint_core::miqp::export_miqp;
use netmaint_core::reliability::sample_scenarios;

#[derive(Parser)]
#[command(name = "netmaint", version, about = "Network pricing and predictive-maintenance scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the case study and write CSV reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's k_scenarios.
        #[arg(long)]
        scenarios: Option<usize>,
        #[arg(long, default_value = "all", value_parser = parse_mode)]
        mode: Mode,
    },
    /// Write the mixed-integer model in the netmaint MIQP text format.
    ExportMiqp {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        scenarios: Option<usize>,
        /// One threshold row per unit (the effective threshold) instead of
        /// one per scenario.
        #[arg(long)]
        effective: bool,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn export(config: PathBuf, out: PathBuf, seed: Option<u64>, scenarios: Option<usize>, effective: bool) -> Result<(), RunError> {
    let manifest = RunManifest { seed, scenarios, ..RunManifest::new(config, &out) };
    let cfg = manifest.apply(load_config(&manifest.config)?);
    let set = sample_scenarios(&cfg.fleet, cfg.horizon.k_scenarios, cfg.horizon.rng_seed)?;
    let thresholds: Vec<Vec<f64>> = if effective {
        set.effective.iter().map(|&e| vec![f64::from(e)]).collect()
    } else {
        set.samples
    };
    let model = export_miqp(&cfg.network, &cfg.fleet, &thresholds)?;
    std::fs::write(&out, netmaint::miqp_text::write_miqp(&model)).map_err(|source| RunError::Io { path: out, source })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, scenarios, mode } => {
            let manifest = RunManifest { seed, scenarios, mode, ..RunManifest::new(config, out) };
            run_case_study(&manifest).map(|_| ())
        }
        Command::ExportMiqp { config, out, seed, scenarios, effective } => export(config, out, seed, scenarios, effective),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", e.category());
            ExitCode::from(1)
        }
    }
}
