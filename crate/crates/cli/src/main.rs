//! `ntnsim`: evaluates multi-layered non-terrestrial relay chains over
//! elevation or SNR-threshold grids and writes the results as CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ntn_cli::{config, output, run, PartialConfig};
use ntn_core::propagation::AttenuationTables;
use ntn_core::scenarios::Catalog;

/// Multi-layered NTN relay-chain evaluator.
///
/// Computes per-hop link budgets, end-to-end amplify-and-forward SNR,
/// outage probability (analytic and Monte Carlo), and ergodic capacity for
/// GEO/LEO/HAP/ground chains, and emits one CSV row per grid point and
/// engine.
#[derive(Debug, Parser)]
#[command(name = "ntnsim", version, about)]
struct Cli {
    /// Figure preset (3a, 3b, 4a, 4b, 5a, 5b); pins scenarios, band, axis,
    /// and grids to one panel of the reference comparison
    #[arg(long, value_name = "ID", conflicts_with_all = ["scenario", "band", "sweep", "alpha_grid", "epsilon_grid"])]
    figure: Option<String>,

    /// Scenarios to evaluate (GE, GLE, GHE, GLHE; repeatable or comma-separated)
    #[arg(long = "scenario", value_delimiter = ',')]
    scenario: Vec<String>,

    /// Operating band of the satellite segment: s or ka
    #[arg(long)]
    band: Option<String>,

    /// Sweep axis: elevation or threshold
    #[arg(long)]
    sweep: Option<String>,

    /// LEO relay altitude(s) in km (catalog allows 600 and 1200)
    #[arg(long = "leo-altitude", value_delimiter = ',')]
    leo_altitude: Vec<f64>,

    /// Elevation grid, either start:stop:step or a comma-separated list
    #[arg(long = "alpha-grid", value_name = "GRID")]
    alpha_grid: Option<String>,

    /// Threshold grid in dB, start:stop:step or comma-separated
    #[arg(long = "epsilon-grid", value_name = "GRID")]
    epsilon_grid: Option<String>,

    /// Fixed elevation (deg) for threshold sweeps
    #[arg(long)]
    alpha: Option<f64>,

    /// Fixed SNR threshold (dB) for elevation sweeps
    #[arg(long)]
    epsilon: Option<f64>,

    /// Engines to run: analytic, monte_carlo (comma-separated)
    #[arg(long, value_delimiter = ',')]
    engines: Vec<String>,

    /// Monte Carlo realizations per chain
    #[arg(long = "n-samples")]
    n_samples: Option<usize>,

    /// Random seed; required whenever the monte_carlo engine runs
    #[arg(long)]
    seed: Option<u64>,

    /// Ground deployment environment: open_rural or suburban
    #[arg(long)]
    environment: Option<String>,

    /// Capacity bandwidth rule: min or last_hop
    #[arg(long = "bandwidth-rule")]
    bandwidth_rule: Option<String>,

    /// Threshold the end-to-end AF SNR for outage instead of the per-hop SNRs
    #[arg(long = "outage-on-af")]
    outage_on_af: bool,

    /// Carrier override for HAP-originated hops, GHz
    #[arg(long = "hap-carrier", value_name = "GHZ")]
    hap_carrier: Option<f64>,

    /// Terrestrial receive figure handling: derived or literal
    #[arg(long = "terrestrial-gt")]
    terrestrial_gt: Option<String>,

    /// Output CSV path
    #[arg(long, short)]
    output: Option<PathBuf>,

    /// TOML configuration document; explicit flags override its values
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl Cli {
    fn to_partial(&self) -> Result<PartialConfig, ntn_cli::ConfigError> {
        Ok(PartialConfig {
            figure: self.figure.clone(),
            scenarios: (!self.scenario.is_empty()).then(|| self.scenario.clone()),
            band: self.band.clone(),
            sweep: self.sweep.clone(),
            leo_altitudes_km: (!self.leo_altitude.is_empty()).then(|| self.leo_altitude.clone()),
            elevation_grid_deg: self
                .alpha_grid
                .as_deref()
                .map(config::parse_grid)
                .transpose()?,
            epsilon_grid_db: self
                .epsilon_grid
                .as_deref()
                .map(config::parse_grid)
                .transpose()?,
            alpha_deg: self.alpha,
            epsilon_db: self.epsilon,
            engines: (!self.engines.is_empty()).then(|| self.engines.clone()),
            n_samples: self.n_samples,
            seed: self.seed,
            environment: self.environment.clone(),
            bandwidth_rule: self.bandwidth_rule.clone(),
            outage_definition: self.outage_on_af.then(|| "end_to_end_af".to_string()),
            hap_carrier_ghz: self.hap_carrier,
            terrestrial_gt_mode: self.terrestrial_gt.clone(),
            output: self.output.clone(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match try_main(&cli) {
        Ok(summary) => {
            println!(
                "wrote {} rows to {} ({} columns)",
                summary.rows,
                summary.output.display(),
                output::CSV_HEADER.len(),
            );
            if summary.failed_points > 0 {
                eprintln!(
                    "{} rows carry errors; see the error column",
                    summary.failed_points
                );
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn try_main(cli: &Cli) -> Result<ntn_cli::RunSummary, String> {
    let catalog = Catalog::load_default().map_err(|e| e.to_string())?;
    let tables = AttenuationTables::builtin();

    let mut partial = PartialConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?;
        partial = PartialConfig::from_toml_str(&text).map_err(|e| e.to_string())?;
    }
    let partial = partial.overlaid_with(cli.to_partial().map_err(|e| e.to_string())?);
    let config = config::resolve(partial, &catalog).map_err(|e| e.to_string())?;
    run(&catalog, tables, &config).map_err(|e| e.to_string())
}
