//! Run configuration: defaults, optional TOML document, command-line flags,
//! and the figure presets, merged in that order into a fully resolved
//! [`RunConfig`].

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use ntn_core::evaluator::{BandwidthRule, ChainVariant, Engine, OutageDefinition, SweepAxis};
use ntn_core::propagation::Environment;
use ntn_core::scenarios::{Band, Catalog, ChainOptions, Configuration, TerrestrialGtMode};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config document: {0}")]
    Document(String),
    #[error("{0}")]
    Value(String),
    #[error("LEO altitude {got} km is not supported; allowed: {allowed:?} km")]
    LeoAltitude { got: f64, allowed: Vec<f64> },
    #[error("the monte_carlo engine needs an explicit --seed (runs must be reproducible)")]
    MissingSeed,
    #[error("{0} grid must not be empty")]
    EmptyGrid(&'static str),
    #[error("config I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// The paper-figure presets. Each pins the scenario set, band, sweep axis,
/// grids, and engines of one panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    F3a,
    F3b,
    F4a,
    F4b,
    F5a,
    F5b,
}

impl FromStr for FigurePreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "3a" => Ok(FigurePreset::F3a),
            "3b" => Ok(FigurePreset::F3b),
            "4a" => Ok(FigurePreset::F4a),
            "4b" => Ok(FigurePreset::F4b),
            "5a" => Ok(FigurePreset::F5a),
            "5b" => Ok(FigurePreset::F5b),
            other => Err(format!(
                "unknown figure '{other}', expected one of 3a, 3b, 4a, 4b, 5a, 5b"
            )),
        }
    }
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 6] = [
        FigurePreset::F3a,
        FigurePreset::F3b,
        FigurePreset::F4a,
        FigurePreset::F4b,
        FigurePreset::F5a,
        FigurePreset::F5b,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            FigurePreset::F3a => "3a",
            FigurePreset::F3b => "3b",
            FigurePreset::F4a => "4a",
            FigurePreset::F4b => "4b",
            FigurePreset::F5a => "5a",
            FigurePreset::F5b => "5b",
        }
    }

    pub fn band(&self) -> Band {
        match self {
            FigurePreset::F3a | FigurePreset::F4a | FigurePreset::F5a => Band::S,
            FigurePreset::F3b | FigurePreset::F4b | FigurePreset::F5b => Band::Ka,
        }
    }

    pub fn axis(&self) -> SweepAxis {
        match self {
            FigurePreset::F4a | FigurePreset::F4b => SweepAxis::Threshold,
            _ => SweepAxis::Elevation,
        }
    }

    /// Fixed threshold for the elevation-axis panels (0 dB for the capacity
    /// figures, 5 dB for the outage-vs-elevation ones).
    pub fn epsilon_db(&self) -> f64 {
        match self {
            FigurePreset::F5a | FigurePreset::F5b => 5.0,
            _ => 0.0,
        }
    }

    fn apply(&self, cfg: &mut PartialConfig) {
        cfg.scenarios = Some(vec!["GE".into(), "GLE".into(), "GHE".into(), "GLHE".into()]);
        cfg.leo_altitudes_km = Some(vec![600.0, 1200.0]);
        cfg.band = Some(self.band().as_str().to_string());
        cfg.engines = Some(vec!["analytic".into(), "monte_carlo".into()]);
        match self.axis() {
            SweepAxis::Elevation => {
                cfg.sweep = Some("elevation".into());
                cfg.elevation_grid_deg = Some(inclusive_grid(10.0, 90.0, 10.0));
                cfg.epsilon_grid_db = Some(vec![self.epsilon_db()]);
            }
            SweepAxis::Threshold => {
                cfg.sweep = Some("threshold".into());
                cfg.elevation_grid_deg = Some(vec![90.0]);
                cfg.epsilon_grid_db = Some(inclusive_grid(-20.0, 40.0, 2.0));
            }
        }
    }
}

/// Unresolved configuration: every field optional so documents and flags can
/// be merged. Unknown keys in a document are hard errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub figure: Option<String>,
    pub scenarios: Option<Vec<String>>,
    pub band: Option<String>,
    pub sweep: Option<String>,
    pub leo_altitudes_km: Option<Vec<f64>>,
    pub elevation_grid_deg: Option<Vec<f64>>,
    pub epsilon_grid_db: Option<Vec<f64>>,
    /// Fixed elevation for threshold sweeps.
    pub alpha_deg: Option<f64>,
    /// Fixed threshold for elevation sweeps.
    pub epsilon_db: Option<f64>,
    pub engines: Option<Vec<String>>,
    pub n_samples: Option<usize>,
    pub seed: Option<u64>,
    pub environment: Option<String>,
    pub bandwidth_rule: Option<String>,
    pub outage_definition: Option<String>,
    pub hap_carrier_ghz: Option<f64>,
    pub terrestrial_gt_mode: Option<String>,
    pub output: Option<PathBuf>,
}

impl PartialConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Document(e.to_string()))
    }

    /// Overlays `other` on top of `self`: any field set in `other` wins.
    pub fn overlaid_with(mut self, other: PartialConfig) -> PartialConfig {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field; })*
            };
        }
        take!(
            figure,
            scenarios,
            band,
            sweep,
            leo_altitudes_km,
            elevation_grid_deg,
            epsilon_grid_db,
            alpha_deg,
            epsilon_db,
            engines,
            n_samples,
            seed,
            environment,
            bandwidth_rule,
            outage_definition,
            hap_carrier_ghz,
            terrestrial_gt_mode,
            output
        );
        self
    }
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub figure: Option<FigurePreset>,
    pub band: Band,
    pub variants: Vec<ChainVariant>,
    pub axis: SweepAxis,
    pub elevation_grid_deg: Vec<f64>,
    pub epsilon_grid_db: Vec<f64>,
    pub engines: Vec<Engine>,
    pub n_samples: usize,
    pub seed: u64,
    pub environment: Environment,
    pub bandwidth_rule: BandwidthRule,
    pub outage_definition: OutageDefinition,
    pub hap_carrier_ghz: Option<f64>,
    pub terrestrial_gt_mode: TerrestrialGtMode,
    pub output: PathBuf,
}

impl RunConfig {
    pub fn chain_options(&self) -> ChainOptions {
        ChainOptions {
            environment: self.environment,
            terrestrial_gt_mode: self.terrestrial_gt_mode,
            hap_carrier_ghz: self.hap_carrier_ghz,
        }
    }
}

/// Inclusive `start..=stop` grid with the given positive step.
pub fn inclusive_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Parses `start:stop:step` or a comma-separated list of values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = |msg: String| ConfigError::Value(msg);
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("grid '{text}' must be start:stop:step")));
        }
        let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|e| bad(format!("grid '{text}': {e}")))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || step.is_nan() || stop < start {
            return Err(bad(format!(
                "grid '{text}' needs stop >= start and step > 0"
            )));
        }
        Ok(inclusive_grid(start, stop, step))
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| bad(format!("grid '{text}': {e}")))
            })
            .collect()
    }
}

fn parse_field<T: FromStr<Err = String>>(
    value: &Option<String>,
    default: T,
) -> Result<T, ConfigError> {
    match value {
        Some(text) => text.parse::<T>().map_err(ConfigError::Value),
        None => Ok(default),
    }
}

/// Resolves the merged partial configuration against the catalog.
pub fn resolve(partial: PartialConfig, catalog: &Catalog) -> Result<RunConfig, ConfigError> {
    let mut partial = partial;
    let figure = match &partial.figure {
        Some(id) => {
            let preset: FigurePreset = id.parse().map_err(ConfigError::Value)?;
            preset.apply(&mut partial);
            Some(preset)
        }
        None => None,
    };

    let band: Band = parse_field(&partial.band, Band::S)?;
    let axis: SweepAxis = parse_field(&partial.sweep, SweepAxis::Elevation)?;

    let scenario_names = partial.scenarios.unwrap_or_else(|| vec!["GE".to_string()]);
    let mut scenarios = Vec::new();
    for name in &scenario_names {
        scenarios.push(name.parse::<Configuration>().map_err(ConfigError::Value)?);
    }
    if scenarios.is_empty() {
        return Err(ConfigError::Value(
            "at least one scenario is required".into(),
        ));
    }

    let leo_altitudes = partial.leo_altitudes_km.unwrap_or_else(|| vec![600.0]);
    if leo_altitudes.is_empty() {
        return Err(ConfigError::Value(
            "at least one LEO altitude is required".into(),
        ));
    }
    for &a in &leo_altitudes {
        if !catalog.leo.allowed_altitudes_km.contains(&a) {
            return Err(ConfigError::LeoAltitude {
                got: a,
                allowed: catalog.leo.allowed_altitudes_km.clone(),
            });
        }
    }

    let mut variants = Vec::new();
    for &configuration in &scenarios {
        if configuration.contains_leo() {
            for &alt in &leo_altitudes {
                variants.push(ChainVariant {
                    configuration,
                    leo_altitude_km: Some(alt),
                });
            }
        } else {
            variants.push(ChainVariant {
                configuration,
                leo_altitude_km: None,
            });
        }
    }

    let (elevation_grid_deg, epsilon_grid_db) = match axis {
        SweepAxis::Elevation => (
            partial
                .elevation_grid_deg
                .unwrap_or_else(|| inclusive_grid(10.0, 90.0, 10.0)),
            partial
                .epsilon_grid_db
                .unwrap_or_else(|| vec![partial.epsilon_db.unwrap_or(0.0)]),
        ),
        SweepAxis::Threshold => (
            partial
                .elevation_grid_deg
                .unwrap_or_else(|| vec![partial.alpha_deg.unwrap_or(90.0)]),
            partial
                .epsilon_grid_db
                .unwrap_or_else(|| inclusive_grid(-20.0, 40.0, 2.0)),
        ),
    };
    if elevation_grid_deg.is_empty() {
        return Err(ConfigError::EmptyGrid("elevation"));
    }
    if epsilon_grid_db.is_empty() {
        return Err(ConfigError::EmptyGrid("epsilon"));
    }
    for &a in &elevation_grid_deg {
        if !(a > 0.0 && a <= 90.0) {
            return Err(ConfigError::Value(format!(
                "elevation {a} deg outside (0, 90]"
            )));
        }
    }

    let engine_names = partial
        .engines
        .unwrap_or_else(|| vec!["analytic".into(), "monte_carlo".into()]);
    let mut engines = Vec::new();
    for name in &engine_names {
        let engine: Engine = name.parse().map_err(ConfigError::Value)?;
        if !engines.contains(&engine) {
            engines.push(engine);
        }
    }
    if engines.is_empty() {
        return Err(ConfigError::Value("at least one engine is required".into()));
    }

    let seed = match (partial.seed, engines.contains(&Engine::MonteCarlo)) {
        (Some(seed), _) => seed,
        (None, false) => 0,
        (None, true) => return Err(ConfigError::MissingSeed),
    };

    let environment = match partial.environment.as_deref() {
        None => Environment::OpenRural,
        Some("open_rural") => Environment::OpenRural,
        Some("suburban") => Environment::Suburban,
        Some(other) => {
            return Err(ConfigError::Value(format!(
                "unknown environment '{other}', expected 'open_rural' or 'suburban'"
            )))
        }
    };
    let bandwidth_rule = match partial.bandwidth_rule.as_deref() {
        None | Some("min") => BandwidthRule::Min,
        Some("last_hop") => BandwidthRule::LastHop,
        Some(other) => {
            return Err(ConfigError::Value(format!(
                "unknown bandwidth rule '{other}', expected 'min' or 'last_hop'"
            )))
        }
    };
    let outage_definition = match partial.outage_definition.as_deref() {
        None | Some("per_hop") => OutageDefinition::PerHop,
        Some("end_to_end_af") => OutageDefinition::EndToEndAf,
        Some(other) => {
            return Err(ConfigError::Value(format!(
                "unknown outage definition '{other}', expected 'per_hop' or 'end_to_end_af'"
            )))
        }
    };
    let terrestrial_gt_mode = match partial.terrestrial_gt_mode.as_deref() {
        None | Some("derived") => TerrestrialGtMode::Derived,
        Some("literal") => TerrestrialGtMode::Literal,
        Some(other) => {
            return Err(ConfigError::Value(format!(
                "unknown terrestrial G/T mode '{other}', expected 'derived' or 'literal'"
            )))
        }
    };

    let n_samples = partial.n_samples.unwrap_or(10_000);
    if n_samples == 0 {
        return Err(ConfigError::Value("n_samples must be at least 1".into()));
    }

    let output = partial.output.unwrap_or_else(|| match figure {
        Some(preset) => PathBuf::from(format!("figure_{}.csv", preset.id())),
        None => PathBuf::from("ntn_results.csv"),
    });

    Ok(RunConfig {
        figure,
        band,
        variants,
        axis,
        elevation_grid_deg,
        epsilon_grid_db,
        engines,
        n_samples,
        seed,
        environment,
        bandwidth_rule,
        outage_definition,
        hap_carrier_ghz: partial.hap_carrier_ghz,
        terrestrial_gt_mode,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> &'static Catalog {
        Catalog::builtin()
    }

    #[test]
    fn defaults_match_the_documented_run() {
        let partial = PartialConfig {
            scenarios: Some(vec!["GHE".into()]),
            band: Some("s".into()),
            sweep: Some("elevation".into()),
            seed: Some(42),
            ..PartialConfig::default()
        };
        let cfg = resolve(partial, catalog()).unwrap();
        assert_eq!(cfg.n_samples, 10_000);
        assert_eq!(cfg.elevation_grid_deg, inclusive_grid(10.0, 90.0, 10.0));
        assert_eq!(cfg.epsilon_grid_db, vec![0.0]);
        assert_eq!(cfg.engines, vec![Engine::Analytic, Engine::MonteCarlo]);
        assert_eq!(cfg.variants.len(), 1);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn leo_altitude_errors_name_the_allowed_set() {
        let partial = PartialConfig {
            scenarios: Some(vec!["GLE".into()]),
            leo_altitudes_km: Some(vec![700.0]),
            seed: Some(1),
            ..PartialConfig::default()
        };
        let err = resolve(partial, catalog()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("700"), "{msg}");
        assert!(msg.contains("600") && msg.contains("1200"), "{msg}");
    }

    #[test]
    fn monte_carlo_without_seed_is_rejected() {
        let partial = PartialConfig {
            scenarios: Some(vec!["GE".into()]),
            ..PartialConfig::default()
        };
        assert!(matches!(
            resolve(partial, catalog()),
            Err(ConfigError::MissingSeed)
        ));
        // analytic-only runs do not need one
        let partial = PartialConfig {
            scenarios: Some(vec!["GE".into()]),
            engines: Some(vec!["analytic".into()]),
            ..PartialConfig::default()
        };
        assert!(resolve(partial, catalog()).is_ok());
    }

    #[test]
    fn figure_preset_pins_the_panel() {
        let partial = PartialConfig {
            figure: Some("3a".into()),
            seed: Some(42),
            ..PartialConfig::default()
        };
        let cfg = resolve(partial, catalog()).unwrap();
        assert_eq!(cfg.band, Band::S);
        assert_eq!(cfg.axis, SweepAxis::Elevation);
        assert_eq!(
            cfg.variants.len(),
            6,
            "4 scenarios + 2 LEO-altitude variants"
        );
        assert_eq!(cfg.elevation_grid_deg.len(), 9);
        assert_eq!(cfg.epsilon_grid_db, vec![0.0]);
        assert_eq!(cfg.output, PathBuf::from("figure_3a.csv"));

        let partial = PartialConfig {
            figure: Some("4b".into()),
            seed: Some(42),
            ..PartialConfig::default()
        };
        let cfg = resolve(partial, catalog()).unwrap();
        assert_eq!(cfg.band, Band::Ka);
        assert_eq!(cfg.axis, SweepAxis::Threshold);
        assert_eq!(cfg.epsilon_grid_db.len(), 31);
        assert_eq!(cfg.elevation_grid_deg, vec![90.0]);
    }

    #[test]
    fn documents_reject_unknown_keys() {
        let err =
            PartialConfig::from_toml_str("scenarios = [\"GE\"]\nbogus_key = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn flags_override_documents() {
        let file = PartialConfig::from_toml_str("seed = 1\nn_samples = 50\n").unwrap();
        let flags = PartialConfig {
            seed: Some(2),
            ..PartialConfig::default()
        };
        let merged = file.overlaid_with(flags);
        assert_eq!(merged.seed, Some(2));
        assert_eq!(merged.n_samples, Some(50));
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(
            parse_grid("10:90:10").unwrap(),
            inclusive_grid(10.0, 90.0, 10.0)
        );
        assert_eq!(parse_grid("-20:40:2").unwrap().len(), 31);
        assert_eq!(parse_grid("5").unwrap(), vec![5.0]);
        assert_eq!(parse_grid("1,2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        assert!(parse_grid("10:5:1").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn elevation_values_outside_range_are_rejected() {
        let partial = PartialConfig {
            scenarios: Some(vec!["GE".into()]),
            elevation_grid_deg: Some(vec![0.0, 45.0]),
            engines: Some(vec!["analytic".into()]),
            ..PartialConfig::default()
        };
        assert!(resolve(partial, catalog()).is_err());
    }
}
