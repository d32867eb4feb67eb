//! Platform catalog and chain construction for the four multi-layered
//! configurations: GE (GEO direct to ground), GLE (LEO relay), GHE (HAP
//! relay), and GLHE (LEO and HAP relays).
//!
//! Chain construction resolves a configuration x band x elevation x LEO
//! altitude into an ordered list of [`HopBudget`]s. The transmitter of each
//! hop radiates at its own catalog EIRP (ideal amplify-and-forward with an
//! output power cap); the receiver contributes its catalog G/T; the
//! ground-terminated hop carries the full atmospheric decomposition and the
//! chain's only non-trivial fading model.

use std::path::Path;
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

use crate::fading::FadingModel;
use crate::geometry::{slant_range, Altitude, ElevationAngle, GeometryError};
use crate::linkbudget::HopBudget;
use crate::propagation::{AttenuationTables, Environment, PropagationError};

const DEFAULT_CATALOG: &str = include_str!("data/catalog.toml");

/// Environment variable naming an alternative catalog file.
pub const CATALOG_PATH_ENV: &str = "NTN_CATALOG_PATH";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("catalog parse error: {0}")]
    CatalogParse(String),
    #[error("catalog I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("LEO altitude {got} km is not in the catalog; allowed: {allowed:?} km")]
    LeoAltitude { got: f64, allowed: Vec<f64> },
    #[error("configuration {0} contains a LEO platform; a LEO altitude is required")]
    MissingLeoAltitude(Configuration),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
}

/// Platform roles, top of the chain to the ground.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlatformKind {
    Geo,
    Leo,
    Hap,
    Ground,
}

impl PlatformKind {
    fn label(&self) -> &'static str {
        match self {
            PlatformKind::Geo => "GEO",
            PlatformKind::Leo => "LEO",
            PlatformKind::Hap => "HAP",
            PlatformKind::Ground => "GROUND",
        }
    }
}

/// Operating band of the satellite segment. HAP-originated hops keep their
/// own carrier regardless of the chain band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    S,
    Ka,
}

impl Band {
    pub fn as_str(&self) -> &'static str {
        match self {
            Band::S => "s",
            Band::Ka => "ka",
        }
    }
}

impl std::str::FromStr for Band {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s" => Ok(Band::S),
            "ka" => Ok(Band::Ka),
            other => Err(format!("unknown band '{other}', expected 's' or 'ka'")),
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named relay-chain configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Configuration {
    Ge,
    Gle,
    Ghe,
    Glhe,
}

impl Configuration {
    pub const ALL: [Configuration; 4] = [
        Configuration::Ge,
        Configuration::Gle,
        Configuration::Ghe,
        Configuration::Glhe,
    ];

    /// Ordered platform chain, GEO down to the ground station.
    pub fn chain(&self) -> &'static [PlatformKind] {
        use PlatformKind::*;
        match self {
            Configuration::Ge => &[Geo, Ground],
            Configuration::Gle => &[Geo, Leo, Ground],
            Configuration::Ghe => &[Geo, Hap, Ground],
            Configuration::Glhe => &[Geo, Leo, Hap, Ground],
        }
    }

    pub fn hop_count(&self) -> usize {
        self.chain().len() - 1
    }

    pub fn contains_leo(&self) -> bool {
        self.chain().contains(&PlatformKind::Leo)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Configuration::Ge => "GE",
            Configuration::Gle => "GLE",
            Configuration::Ghe => "GHE",
            Configuration::Glhe => "GLHE",
        }
    }
}

impl std::str::FromStr for Configuration {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "GE" => Ok(Configuration::Ge),
            "GLE" => Ok(Configuration::Gle),
            "GHE" => Ok(Configuration::Ghe),
            "GLHE" => Ok(Configuration::Glhe),
            other => Err(format!(
                "unknown configuration '{other}', expected GE, GLE, GHE, or GLHE"
            )),
        }
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-band satellite parameters (one Table-1 column pair).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteBandParams {
    pub carrier_dl_ghz: f64,
    pub carrier_ul_ghz: f64,
    pub bandwidth_hz: f64,
    pub eirp_dl_dbw: f64,
    /// Uplink EIRP; catalogued for completeness, unused by the downlink
    /// chain builder.
    pub eirp_ul_dbw: f64,
    /// Receive figure of merit of the satellite itself.
    pub rx_g_over_t_db_k: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteBands {
    pub s: SatelliteBandParams,
    pub ka: SatelliteBandParams,
}

impl SatelliteBands {
    pub fn band(&self, band: Band) -> &SatelliteBandParams {
        match band {
            Band::S => &self.s,
            Band::Ka => &self.ka,
        }
    }

    /// Receive parameters for an incoming carrier: sub-6 GHz carriers use
    /// the S-band column, anything higher the Ka column.
    pub fn for_carrier(&self, carrier_ghz: f64) -> &SatelliteBandParams {
        if carrier_ghz < 6.0 {
            &self.s
        } else {
            &self.ka
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoEntry {
    pub altitude_km: f64,
    pub band: SatelliteBands,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeoEntry {
    pub allowed_altitudes_km: Vec<f64>,
    pub band: SatelliteBands,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HapEntry {
    pub altitude_km: f64,
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub eirp_dbw: f64,
    pub rx_g_over_t_db_k: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundBandParams {
    pub rx_gain_dbi: f64,
    pub noise_figure_db: f64,
    pub antenna_temp_k: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundEntry {
    pub altitude_km: f64,
    pub ambient_temp_k: f64,
    pub band: GroundBands,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundBands {
    pub s: GroundBandParams,
    pub ka: GroundBandParams,
}

impl GroundBands {
    pub fn for_carrier(&self, carrier_ghz: f64) -> &GroundBandParams {
        if carrier_ghz < 6.0 {
            &self.s
        } else {
            &self.ka
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingEntry {
    pub space_to_ground: FadingModel,
    pub air_to_ground: FadingModel,
}

/// The full platform catalog.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    pub version: u32,
    pub geo: GeoEntry,
    pub leo: LeoEntry,
    pub hap: HapEntry,
    pub ground: GroundEntry,
    pub fading: FadingEntry,
}

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            Catalog::from_toml_str(DEFAULT_CATALOG).expect("embedded catalog parses")
        })
    }

    /// The catalog named by `NTN_CATALOG_PATH`, or the builtin one.
    pub fn load_default() -> Result<Catalog, ScenarioError> {
        match std::env::var_os(CATALOG_PATH_ENV) {
            Some(path) => Catalog::from_path(path),
            None => Ok(Catalog::builtin().clone()),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Catalog, ScenarioError> {
        let catalog: Catalog =
            toml::from_str(text).map_err(|e| ScenarioError::CatalogParse(e.to_string()))?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Catalog, ScenarioError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let err = |msg: &str| Err(ScenarioError::CatalogParse(msg.to_string()));
        if self.leo.allowed_altitudes_km.is_empty() {
            return err("catalog must list at least one LEO altitude");
        }
        if self.geo.altitude_km <= self.hap.altitude_km {
            return err("GEO must sit above the HAP layer");
        }
        for &a in &self.leo.allowed_altitudes_km {
            if a <= self.hap.altitude_km || a >= self.geo.altitude_km {
                return err("LEO altitudes must lie between the HAP and GEO layers");
            }
        }
        if self.ground.altitude_km >= self.hap.altitude_km {
            return err("the ground station must sit below the HAP layer");
        }
        self.fading
            .space_to_ground
            .validate()
            .map_err(|e| ScenarioError::CatalogParse(e.to_string()))?;
        self.fading
            .air_to_ground
            .validate()
            .map_err(|e| ScenarioError::CatalogParse(e.to_string()))?;
        Ok(())
    }

    /// Derived terrestrial receive G/T for a carrier: antenna gain over the
    /// system noise temperature T_ant + (F - 1) T_amb, with the noise figure
    /// then excluded from the budget sum to avoid double counting.
    pub fn ground_g_over_t_derived(&self, carrier_ghz: f64) -> f64 {
        let p = self.ground.band.for_carrier(carrier_ghz);
        let noise_factor = 10f64.powf(p.noise_figure_db / 10.0);
        let t_sys = p.antenna_temp_k + (noise_factor - 1.0) * self.ground.ambient_temp_k;
        p.rx_gain_dbi - 10.0 * t_sys.log10()
    }
}

/// How the terrestrial receive figure enters the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerrestrialGtMode {
    /// G/T derived from gain and noise temperatures; NF = 0 in the budget.
    #[default]
    Derived,
    /// Antenna gain used directly as the receive figure, with the catalog
    /// noise figure charged separately.
    Literal,
}

/// Knobs that modify chain construction away from the defaults.
#[derive(Debug, Clone)]
pub struct ChainOptions {
    pub environment: Environment,
    pub terrestrial_gt_mode: TerrestrialGtMode,
    /// Carrier override for HAP-originated hops, GHz.
    pub hap_carrier_ghz: Option<f64>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            environment: Environment::OpenRural,
            terrestrial_gt_mode: TerrestrialGtMode::Derived,
            hap_carrier_ghz: None,
        }
    }
}

/// Resolves a configuration into its ordered hop budgets, top hop first.
pub fn build_chain(
    catalog: &Catalog,
    tables: &AttenuationTables,
    configuration: Configuration,
    band: Band,
    alpha: ElevationAngle,
    leo_altitude_km: Option<f64>,
    options: &ChainOptions,
) -> Result<Vec<HopBudget>, ScenarioError> {
    let leo_altitude = if configuration.contains_leo() {
        let requested = leo_altitude_km.ok_or(ScenarioError::MissingLeoAltitude(configuration))?;
        let allowed = &catalog.leo.allowed_altitudes_km;
        if !allowed.contains(&requested) {
            return Err(ScenarioError::LeoAltitude {
                got: requested,
                allowed: allowed.clone(),
            });
        }
        Some(requested)
    } else {
        None
    };

    let altitude_of = |kind: PlatformKind| -> f64 {
        match kind {
            PlatformKind::Geo => catalog.geo.altitude_km,
            PlatformKind::Leo => leo_altitude.expect("validated above"),
            PlatformKind::Hap => catalog.hap.altitude_km,
            PlatformKind::Ground => catalog.ground.altitude_km,
        }
    };

    let chain = configuration.chain();
    let mut hops = Vec::with_capacity(chain.len() - 1);
    for pair in chain.windows(2) {
        let (tx, rx) = (pair[0], pair[1]);

        // transmit side: carrier, bandwidth, EIRP
        let (carrier_ghz, bandwidth_hz, eirp_dbw) = match tx {
            PlatformKind::Geo => {
                let p = catalog.geo.band.band(band);
                (p.carrier_dl_ghz, p.bandwidth_hz, p.eirp_dl_dbw)
            }
            PlatformKind::Leo => {
                let p = catalog.leo.band.band(band);
                (p.carrier_dl_ghz, p.bandwidth_hz, p.eirp_dl_dbw)
            }
            PlatformKind::Hap => (
                options.hap_carrier_ghz.unwrap_or(catalog.hap.carrier_ghz),
                catalog.hap.bandwidth_hz,
                catalog.hap.eirp_dbw,
            ),
            PlatformKind::Ground => unreachable!("downlink chains never transmit from the ground"),
        };

        // receive side: G/T plus any separately charged noise figure
        let (g_over_t_db_k, noise_figure_db) = match rx {
            PlatformKind::Geo => (
                catalog.geo.band.for_carrier(carrier_ghz).rx_g_over_t_db_k,
                0.0,
            ),
            PlatformKind::Leo => (
                catalog.leo.band.for_carrier(carrier_ghz).rx_g_over_t_db_k,
                0.0,
            ),
            PlatformKind::Hap => (catalog.hap.rx_g_over_t_db_k, 0.0),
            PlatformKind::Ground => match options.terrestrial_gt_mode {
                TerrestrialGtMode::Derived => (catalog.ground_g_over_t_derived(carrier_ghz), 0.0),
                TerrestrialGtMode::Literal => {
                    let p = catalog.ground.band.for_carrier(carrier_ghz);
                    (p.rx_gain_dbi, p.noise_figure_db)
                }
            },
        };

        let fading = match (tx, rx) {
            (PlatformKind::Hap, PlatformKind::Ground) => catalog.fading.air_to_ground,
            (_, PlatformKind::Ground) => catalog.fading.space_to_ground,
            _ => FadingModel::NoFading,
        };

        let h_low = Altitude::new(altitude_of(rx))?;
        let h_high = Altitude::new(altitude_of(tx))?;
        let distance_km = slant_range(h_low, h_high, alpha)?;
        let path_loss = tables.total_path_loss(
            h_low,
            h_high,
            alpha,
            carrier_ghz,
            options.environment,
            rx == PlatformKind::Ground,
        )?;

        hops.push(HopBudget {
            label: format!("{}->{}", tx.label(), rx.label()),
            eirp_dbw,
            g_over_t_db_k,
            path_loss,
            bandwidth_hz,
            noise_figure_db,
            fading,
            carrier_ghz,
            distance_km,
        });
    }
    Ok(hops)
}
