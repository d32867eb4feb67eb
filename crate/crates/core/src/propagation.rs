//! Deterministic path-loss decomposition for one hop: free-space loss plus
//! atmospheric gases, scintillation, ground clutter, and rain where the hop
//! actually traverses the corresponding medium.
//!
//! Hops whose lower endpoint sits at or above the stratospheric platform
//! altitude never penetrate the atmosphere and see free-space loss only.
//! The atmospheric components are table-driven: zenith/margin values at a
//! few anchor frequencies, scaled by the cosecant of the elevation angle
//! where a slant path applies. The tables ship as a versioned CSV data file
//! so their fidelity can be upgraded without touching code.

use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::geometry::{slant_range, Altitude, ElevationAngle, GeometryError};

/// Hops with a lower endpoint at or above this altitude (km) are treated as
/// free-space only.
pub const ATMOSPHERE_CEILING_KM: f64 = 20.0;

/// Rain only affects paths below this altitude (km).
pub const RAIN_LAYER_TOP_KM: f64 = 3.0;

/// Rain only matters above this carrier frequency (GHz).
pub const RAIN_FREQUENCY_CUTOFF_GHZ: f64 = 10.0;

/// Scintillation switches from the ionospheric to the tropospheric branch at
/// this carrier frequency (GHz).
pub const SCINTILLATION_BRANCH_GHZ: f64 = 3.0;

const DEFAULT_TABLES: &str = include_str!("data/attenuation.csv");

#[derive(Debug, Error)]
pub enum PropagationError {
    #[error(
        "distance and frequency must be positive, got d = {distance_km} km, fc = {fc_ghz} GHz"
    )]
    NonPositiveInput { distance_km: f64, fc_ghz: f64 },
    #[error("attenuation table: {0}")]
    Table(String),
    #[error("attenuation table I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Ground deployment environment of the terrestrial station. Clutter loss is
/// only charged in the suburban environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    OpenRural,
    Suburban,
}

/// What a hop traverses, as seen by the attenuation components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEnvironment {
    /// True iff the lower endpoint sits below [`ATMOSPHERE_CEILING_KM`].
    pub penetrates_atmosphere: bool,
    /// True iff the lower endpoint is the terrestrial station.
    pub ground_terminated: bool,
    pub environment: Environment,
    /// Altitude of the lower endpoint, km.
    pub lower_altitude_km: f64,
    /// Line-of-sight hop length, km.
    pub hop_length_km: f64,
}

impl LinkEnvironment {
    pub fn new(
        lower_altitude_km: f64,
        hop_length_km: f64,
        ground_terminated: bool,
        environment: Environment,
    ) -> Self {
        let penetrates_atmosphere = lower_altitude_km < ATMOSPHERE_CEILING_KM;
        debug_assert!(
            !ground_terminated || penetrates_atmosphere,
            "a ground-terminated hop always penetrates the atmosphere"
        );
        Self {
            penetrates_atmosphere,
            ground_terminated,
            environment,
            lower_altitude_km,
            hop_length_km,
        }
    }
}

/// Per-hop path-loss decomposition in dB. `total` is the exact sum of the
/// components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub fspl: f64,
    pub gases: f64,
    pub scintillation: f64,
    pub clutter: f64,
    pub rain: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn new(fspl: f64, gases: f64, scintillation: f64, clutter: f64, rain: f64) -> Self {
        debug_assert!(fspl >= 0.0 && gases >= 0.0 && scintillation >= 0.0);
        debug_assert!(clutter >= 0.0 && rain >= 0.0);
        Self {
            fspl,
            gases,
            scintillation,
            clutter,
            rain,
            total: fspl + gases + scintillation + clutter + rain,
        }
    }

    /// Free-space-only breakdown, used for hops above the atmosphere.
    pub fn free_space_only(fspl: f64) -> Self {
        Self::new(fspl, 0.0, 0.0, 0.0, 0.0)
    }
}

/// Friis free-space path loss: `92.45 + 20 log10(fc_GHz) + 20 log10(d_km)`.
pub fn free_space_loss(distance_km: f64, fc_ghz: f64) -> Result<f64, PropagationError> {
    if !(distance_km > 0.0 && fc_ghz > 0.0) || !distance_km.is_finite() || !fc_ghz.is_finite() {
        return Err(PropagationError::NonPositiveInput {
            distance_km,
            fc_ghz,
        });
    }
    Ok(92.45 + 20.0 * fc_ghz.log10() + 20.0 * distance_km.log10())
}

const ELEVATION_ANCHORS: [f64; 9] = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0];

#[derive(Debug, Clone)]
struct TableRow {
    frequency_ghz: f64,
    zenith_gas_db: f64,
    scint_iono_db: f64,
    scint_tropo_db: [f64; 9],
    clutter_db: [f64; 9],
    rain_specific_db_per_km: f64,
}

/// Frequency/elevation-indexed attenuation tables.
#[derive(Debug, Clone)]
pub struct AttenuationTables {
    rows: Vec<TableRow>,
}

impl AttenuationTables {
    /// The tables shipped with the crate.
    pub fn builtin() -> &'static AttenuationTables {
        static TABLES: OnceLock<AttenuationTables> = OnceLock::new();
        TABLES.get_or_init(|| {
            AttenuationTables::from_csv_str(DEFAULT_TABLES)
                .expect("embedded attenuation tables parse")
        })
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self, PropagationError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, PropagationError> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());

        let headers = reader
            .headers()
            .map_err(|e| PropagationError::Table(e.to_string()))?
            .clone();
        let expected = 3 + 9 + 9 + 1;
        if headers.len() != expected {
            return Err(PropagationError::Table(format!(
                "expected {expected} columns, found {}",
                headers.len()
            )));
        }

        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| PropagationError::Table(e.to_string()))?;
            let field = |i: usize| -> Result<f64, PropagationError> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| PropagationError::Table(format!("column {i}: {e}")))
            };
            let mut tropo = [0.0; 9];
            let mut clutter = [0.0; 9];
            for i in 0..9 {
                tropo[i] = field(3 + i)?;
                clutter[i] = field(12 + i)?;
            }
            rows.push(TableRow {
                frequency_ghz: field(0)?,
                zenith_gas_db: field(1)?,
                scint_iono_db: field(2)?,
                scint_tropo_db: tropo,
                clutter_db: clutter,
                rain_specific_db_per_km: field(21)?,
            });
        }
        if rows.len() < 2 {
            return Err(PropagationError::Table(
                "need at least two frequency anchor rows".into(),
            ));
        }
        if !rows
            .windows(2)
            .all(|w| w[0].frequency_ghz < w[1].frequency_ghz)
        {
            return Err(PropagationError::Table(
                "frequency anchors must be strictly increasing".into(),
            ));
        }
        for row in &rows {
            let all = row
                .scint_tropo_db
                .iter()
                .chain(row.clutter_db.iter())
                .chain([
                    &row.zenith_gas_db,
                    &row.scint_iono_db,
                    &row.rain_specific_db_per_km,
                ]);
            for v in all {
                if !v.is_finite() || *v < 0.0 {
                    return Err(PropagationError::Table(format!(
                        "negative or non-finite entry at {} GHz",
                        row.frequency_ghz
                    )));
                }
            }
            if !row.scint_tropo_db.windows(2).all(|w| w[0] >= w[1])
                || !row.clutter_db.windows(2).all(|w| w[0] >= w[1])
            {
                return Err(PropagationError::Table(format!(
                    "elevation-indexed entries must be non-increasing at {} GHz",
                    row.frequency_ghz
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Interpolates a scalar column in log-frequency, clamping outside the
    /// anchor range.
    fn lookup_f(&self, fc_ghz: f64, get: impl Fn(&TableRow) -> f64) -> f64 {
        let rows = &self.rows;
        if fc_ghz <= rows[0].frequency_ghz {
            return get(&rows[0]);
        }
        if fc_ghz >= rows[rows.len() - 1].frequency_ghz {
            return get(&rows[rows.len() - 1]);
        }
        let i = rows
            .windows(2)
            .position(|w| fc_ghz < w[1].frequency_ghz)
            .unwrap();
        let (lo, hi) = (&rows[i], &rows[i + 1]);
        let t =
            (fc_ghz.ln() - lo.frequency_ghz.ln()) / (hi.frequency_ghz.ln() - lo.frequency_ghz.ln());
        (1.0 - t) * get(lo) + t * get(hi)
    }

    fn lookup_f_el(
        &self,
        fc_ghz: f64,
        alpha_deg: f64,
        get: impl Fn(&TableRow) -> [f64; 9] + Copy,
    ) -> f64 {
        let a = alpha_deg.clamp(ELEVATION_ANCHORS[0], ELEVATION_ANCHORS[8]);
        let interp_el = |row: &TableRow| -> f64 {
            let col = get(row);
            let i = (((a - 10.0) / 10.0).floor() as usize).min(7);
            let t = (a - ELEVATION_ANCHORS[i]) / 10.0;
            (1.0 - t) * col[i] + t * col[i + 1]
        };
        self.lookup_f(fc_ghz, interp_el)
    }

    /// Dry-air and water-vapour attenuation A_g: zenith value scaled by the
    /// cosecant path factor. Zero for hops that never enter the atmosphere.
    pub fn gaseous_attenuation(
        &self,
        fc_ghz: f64,
        alpha: ElevationAngle,
        env: &LinkEnvironment,
    ) -> f64 {
        debug_assert!((0.5..=100.0).contains(&fc_ghz));
        if !env.penetrates_atmosphere {
            return 0.0;
        }
        self.lookup_f(fc_ghz, |r| r.zenith_gas_db) / alpha.sin()
    }

    /// Scintillation fade margin A_s: ionospheric branch (fixed margin)
    /// below 3 GHz, tropospheric elevation-indexed margin above. Zero for
    /// hops outside the atmosphere.
    pub fn scintillation_loss(
        &self,
        fc_ghz: f64,
        alpha: ElevationAngle,
        env: &LinkEnvironment,
    ) -> f64 {
        if !env.penetrates_atmosphere {
            return 0.0;
        }
        if fc_ghz < SCINTILLATION_BRANCH_GHZ {
            self.lookup_f(fc_ghz, |r| r.scint_iono_db)
        } else {
            self.lookup_f_el(fc_ghz, alpha.degrees(), |r| r.scint_tropo_db)
        }
    }

    /// Clutter loss L_c from ground objects; only the suburban environment
    /// charges it, and only on the ground-terminated hop.
    pub fn clutter_loss(&self, fc_ghz: f64, alpha: ElevationAngle, env: &LinkEnvironment) -> f64 {
        if env.environment != Environment::Suburban || !env.ground_terminated {
            return 0.0;
        }
        self.lookup_f_el(fc_ghz, alpha.degrees(), |r| r.clutter_db)
    }

    /// Rain attenuation A_r: fixed-exceedance specific attenuation times the
    /// effective slant path through the rain layer (`3/sin(alpha)` km,
    /// capped at the hop length). Zero at or below 10 GHz and for hops whose
    /// lower endpoint is above the rain layer.
    pub fn rain_attenuation(
        &self,
        fc_ghz: f64,
        alpha: ElevationAngle,
        env: &LinkEnvironment,
    ) -> f64 {
        if fc_ghz <= RAIN_FREQUENCY_CUTOFF_GHZ || env.lower_altitude_km >= RAIN_LAYER_TOP_KM {
            return 0.0;
        }
        let path_km = (RAIN_LAYER_TOP_KM / alpha.sin()).min(env.hop_length_km);
        self.lookup_f(fc_ghz, |r| r.rain_specific_db_per_km) * path_km
    }

    /// Full decomposition for a hop between two altitudes observed at a
    /// shared elevation angle.
    pub fn total_path_loss(
        &self,
        h_low: Altitude,
        h_high: Altitude,
        alpha: ElevationAngle,
        fc_ghz: f64,
        environment: Environment,
        ground_terminated: bool,
    ) -> Result<LossBreakdown, PropagationError> {
        let distance_km = slant_range(h_low, h_high, alpha)?;
        let fspl = free_space_loss(distance_km, fc_ghz)?;
        let env = LinkEnvironment::new(h_low.km(), distance_km, ground_terminated, environment);
        if !env.penetrates_atmosphere {
            return Ok(LossBreakdown::free_space_only(fspl));
        }
        Ok(LossBreakdown::new(
            fspl,
            self.gaseous_attenuation(fc_ghz, alpha, &env),
            self.scintillation_loss(fc_ghz, alpha, &env),
            self.clutter_loss(fc_ghz, alpha, &env),
            self.rain_attenuation(fc_ghz, alpha, &env),
        ))
    }
}
