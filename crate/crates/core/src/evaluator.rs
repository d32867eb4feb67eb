//! Outage probability and ergodic capacity of a relay chain, analytically
//! and by Monte Carlo over fading realizations, plus the sweep harness that
//! drives parameter grids.
//!
//! The default outage definition is per-hop: the chain is in outage when any
//! hop's realized SNR falls at or below the threshold, so the analytic form
//! is one minus the product of per-hop exceedance probabilities. An
//! alternative definition thresholds the composed end-to-end AF SNR instead;
//! both are exposed.
//!
//! Monte Carlo realizations are drawn once per chain from a stream keyed by
//! (seed, chain index) and shared across every grid point of that chain.
//! Common random numbers keep the estimated curves exactly monotone along
//! elevation and threshold grids, mirroring the analytic trends.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::fading::{FadingError, FadingModel, GainSampler};
use crate::geometry::{ElevationAngle, GeometryError};
use crate::linkbudget::{af_end_to_end_snr, HopBudget, LinkBudgetError};
use crate::propagation::AttenuationTables;
use crate::scenarios::{build_chain, Band, Catalog, ChainOptions, Configuration, ScenarioError};

#[derive(Debug, Error)]
pub enum EvaluatorError {
    #[error("chain must contain at least one hop")]
    EmptyChain,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error(transparent)]
    Fading(#[from] FadingError),
    #[error(transparent)]
    LinkBudget(#[from] LinkBudgetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("analytic AF-threshold outage requires at most one fading hop, chain has {0}")]
    AfAnalyticUnsupported(usize),
    #[error("sweep axis {axis:?} requires exactly one value on the fixed grid, got {got}")]
    FixedGridShape { axis: SweepAxis, got: usize },
    #[error("sweep grids must be non-empty")]
    EmptyGrid,
}

/// SNR threshold for outage, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrThreshold(pub f64);

/// Which event counts as outage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageDefinition {
    /// Any hop at or below the threshold (product-of-exceedances form).
    PerHop,
    /// The composed end-to-end AF SNR at or below the threshold.
    EndToEndAf,
}

/// Which bandwidth multiplies the spectral efficiency in the capacity
/// estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// The chain cannot convey more symbols than its narrowest hop.
    Min,
    /// The bandwidth of the final (ground) hop.
    LastHop,
}

impl BandwidthRule {
    pub fn effective_bandwidth_hz(&self, chain: &[HopBudget]) -> f64 {
        match self {
            BandwidthRule::Min => chain
                .iter()
                .map(|h| h.bandwidth_hz)
                .fold(f64::INFINITY, f64::min),
            BandwidthRule::LastHop => chain.last().map(|h| h.bandwidth_hz).unwrap_or(f64::NAN),
        }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Exceedance probability of one hop at threshold epsilon: P[SNR > eps].
fn hop_exceedance(hop: &HopBudget, epsilon_db: f64) -> Result<f64, EvaluatorError> {
    let x = epsilon_db - hop.deterministic_snr_db();
    Ok(hop.fading.exceedance_probability(x)?)
}

/// Outage probability from the fading laws.
pub fn outage_analytic(
    chain: &[HopBudget],
    epsilon: SnrThreshold,
    definition: OutageDefinition,
) -> Result<f64, EvaluatorError> {
    if chain.is_empty() {
        return Err(EvaluatorError::EmptyChain);
    }
    match definition {
        OutageDefinition::PerHop => {
            let mut product = 1.0;
            for hop in chain {
                product *= hop_exceedance(hop, epsilon.0)?;
                if product == 0.0 {
                    break;
                }
            }
            Ok((1.0 - product).clamp(0.0, 1.0))
        }
        OutageDefinition::EndToEndAf => outage_analytic_af(chain, epsilon),
    }
}

/// AF-threshold outage. With at most one fading hop the event
/// `gamma_AF <= eps` maps to a shifted threshold on that hop.
fn outage_analytic_af(chain: &[HopBudget], epsilon: SnrThreshold) -> Result<f64, EvaluatorError> {
    let fading_hops: Vec<&HopBudget> = chain
        .iter()
        .filter(|h| h.fading != FadingModel::NoFading)
        .collect();
    if fading_hops.len() > 1 {
        return Err(EvaluatorError::AfAnalyticUnsupported(fading_hops.len()));
    }
    let eps_linear = 10f64.powf(epsilon.0 / 10.0);
    // product of (1 + 1/gamma) over the deterministic hops
    let fixed_log: f64 = chain
        .iter()
        .filter(|h| h.fading == FadingModel::NoFading)
        .map(|h| (1.0 / 10f64.powf(h.deterministic_snr_db() / 10.0)).ln_1p())
        .sum();

    match fading_hops.first() {
        None => {
            let gamma_af = 1.0 / fixed_log.exp_m1();
            Ok(if gamma_af <= eps_linear { 1.0 } else { 0.0 })
        }
        Some(hop) => {
            // gamma_AF <= eps  <=>  1/gamma_f >= (1 + 1/eps) / P - 1
            let q = ((1.0 / eps_linear).ln_1p() - fixed_log).exp_m1();
            if q <= 0.0 {
                return Ok(1.0); // the deterministic hops alone cap gamma_AF below eps
            }
            let threshold_db = 10.0 * (1.0 / q).log10() - hop.deterministic_snr_db();
            Ok((1.0 - hop.fading.exceedance_probability(threshold_db)?).clamp(0.0, 1.0))
        }
    }
}

/// Fading realizations for one chain: `n` draws of the per-hop gain vector,
/// in dB. Draws happen realization-major so a chain's stream is independent
/// of how many grid points consume it.
#[derive(Debug, Clone)]
pub struct FadingRealizations {
    hop_count: usize,
    taus_db: Vec<f64>,
}

impl FadingRealizations {
    pub fn generate(
        models: &[FadingModel],
        n_samples: usize,
        rng: &mut ChaCha8Rng,
    ) -> FadingRealizations {
        let samplers: Vec<GainSampler> = models.iter().map(GainSampler::new).collect();
        let mut taus_db = Vec::with_capacity(n_samples * models.len());
        for _ in 0..n_samples {
            for sampler in &samplers {
                taus_db.push(sampler.sample_db(rng));
            }
        }
        FadingRealizations {
            hop_count: models.len(),
            taus_db,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.taus_db.len().checked_div(self.hop_count).unwrap_or(0)
    }

    fn realization(&self, i: usize) -> &[f64] {
        &self.taus_db[i * self.hop_count..(i + 1) * self.hop_count]
    }
}

/// Derives the random stream for a (seed, chain index) pair.
pub fn chain_rng(seed: u64, chain_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&chain_index.to_le_bytes());
    key[16..].copy_from_slice(b"ntn-fading-v1\0\0\0");
    ChaCha8Rng::from_seed(key)
}

/// Monte Carlo outage and capacity from shared realizations.
pub fn evaluate_monte_carlo(
    chain: &[HopBudget],
    realizations: &FadingRealizations,
    epsilon: SnrThreshold,
    bandwidth_rule: BandwidthRule,
    definition: OutageDefinition,
) -> Result<(McEstimate, McEstimate), EvaluatorError> {
    if chain.is_empty() {
        return Err(EvaluatorError::EmptyChain);
    }
    let n = realizations.n_samples();
    if n == 0 || realizations.hop_count != chain.len() {
        return Err(EvaluatorError::NoSamples);
    }

    let deterministic_db: Vec<f64> = chain.iter().map(|h| h.deterministic_snr_db()).collect();
    let effective_bandwidth = bandwidth_rule.effective_bandwidth_hz(chain);
    let eps_linear = 10f64.powf(epsilon.0 / 10.0);

    let mut outage_count = 0usize;
    let mut cap_sum = 0.0f64;
    let mut cap_sq_sum = 0.0f64;
    let mut snrs_linear = vec![0.0f64; chain.len()];

    for i in 0..n {
        let taus = realizations.realization(i);
        let mut any_below = false;
        for (h, (&det, &tau)) in deterministic_db.iter().zip(taus).enumerate() {
            let total_db = det + tau;
            snrs_linear[h] = 10f64.powf(total_db / 10.0);
            if total_db <= epsilon.0 {
                any_below = true;
            }
        }
        let gamma_af = af_end_to_end_snr(&snrs_linear)?;
        let in_outage = match definition {
            OutageDefinition::PerHop => any_below,
            OutageDefinition::EndToEndAf => gamma_af <= eps_linear,
        };
        if in_outage {
            outage_count += 1;
        }
        let capacity = effective_bandwidth * gamma_af.ln_1p() / std::f64::consts::LN_2;
        cap_sum += capacity;
        cap_sq_sum += capacity * capacity;
    }

    let nf = n as f64;
    let p = outage_count as f64 / nf;
    let outage = McEstimate {
        value: p,
        std_error: (p * (1.0 - p) / nf).sqrt(),
    };
    let mean = cap_sum / nf;
    let variance = if n > 1 {
        ((cap_sq_sum - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    let capacity = McEstimate {
        value: mean,
        std_error: (variance / nf).sqrt(),
    };
    Ok((outage, capacity))
}

/// Monte Carlo outage with fresh draws from `seed` (stream 0).
pub fn outage_monte_carlo(
    chain: &[HopBudget],
    epsilon: SnrThreshold,
    n_samples: usize,
    seed: u64,
    definition: OutageDefinition,
) -> Result<McEstimate, EvaluatorError> {
    if n_samples == 0 {
        return Err(EvaluatorError::NoSamples);
    }
    let models: Vec<FadingModel> = chain.iter().map(|h| h.fading).collect();
    let realizations = FadingRealizations::generate(&models, n_samples, &mut chain_rng(seed, 0));
    let (outage, _) = evaluate_monte_carlo(
        chain,
        &realizations,
        epsilon,
        BandwidthRule::Min,
        definition,
    )?;
    Ok(outage)
}

/// Monte Carlo ergodic capacity (bits/s) with fresh draws from `seed`.
pub fn ergodic_capacity_mc(
    chain: &[HopBudget],
    n_samples: usize,
    seed: u64,
    bandwidth_rule: BandwidthRule,
) -> Result<McEstimate, EvaluatorError> {
    if n_samples == 0 {
        return Err(EvaluatorError::NoSamples);
    }
    let models: Vec<FadingModel> = chain.iter().map(|h| h.fading).collect();
    let realizations = FadingRealizations::generate(&models, n_samples, &mut chain_rng(seed, 0));
    let (_, capacity) = evaluate_monte_carlo(
        chain,
        &realizations,
        SnrThreshold(0.0),
        bandwidth_rule,
        OutageDefinition::PerHop,
    )?;
    Ok(capacity)
}

/// Everything a single chain evaluation produces.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResult {
    pub per_hop_deterministic_snr_db: Vec<f64>,
    pub outage_analytic: Option<f64>,
    pub outage_mc: Option<McEstimate>,
    pub ergodic_capacity: Option<McEstimate>,
    pub n_samples: usize,
    pub seed: u64,
}

/// Evaluates one chain at one threshold with the selected engines. Monte
/// Carlo outage and capacity come from a single shared realization set.
pub fn evaluate_chain(
    chain: &[HopBudget],
    epsilon: SnrThreshold,
    engines: &[Engine],
    n_samples: usize,
    seed: u64,
    bandwidth_rule: BandwidthRule,
    definition: OutageDefinition,
) -> Result<EvaluationResult, EvaluatorError> {
    if chain.is_empty() {
        return Err(EvaluatorError::EmptyChain);
    }
    let mut result = EvaluationResult {
        per_hop_deterministic_snr_db: chain.iter().map(|h| h.deterministic_snr_db()).collect(),
        outage_analytic: None,
        outage_mc: None,
        ergodic_capacity: None,
        n_samples,
        seed,
    };
    if engines.contains(&Engine::Analytic) {
        result.outage_analytic = Some(outage_analytic(chain, epsilon, definition)?);
    }
    if engines.contains(&Engine::MonteCarlo) {
        if n_samples == 0 {
            return Err(EvaluatorError::NoSamples);
        }
        let models: Vec<FadingModel> = chain.iter().map(|h| h.fading).collect();
        let realizations =
            FadingRealizations::generate(&models, n_samples, &mut chain_rng(seed, 0));
        let (outage, capacity) =
            evaluate_monte_carlo(chain, &realizations, epsilon, bandwidth_rule, definition)?;
        result.outage_mc = Some(outage);
        result.ergodic_capacity = Some(capacity);
    }
    Ok(result)
}

/// Evaluation engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    MonteCarlo,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "analytic" => Ok(Engine::Analytic),
            "monte_carlo" | "mc" => Ok(Engine::MonteCarlo),
            other => Err(format!(
                "unknown engine '{other}', expected 'analytic' or 'monte_carlo'"
            )),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One (configuration, LEO altitude) chain shape inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainVariant {
    pub configuration: Configuration,
    pub leo_altitude_km: Option<f64>,
}

/// Which grid the sweep walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Elevation,
    Threshold,
}

impl std::str::FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "elevation" => Ok(SweepAxis::Elevation),
            "threshold" => Ok(SweepAxis::Threshold),
            other => Err(format!(
                "unknown sweep axis '{other}', expected 'elevation' or 'threshold'"
            )),
        }
    }
}

/// A full sweep description: chain variants times a grid times engines.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub band: Band,
    pub variants: Vec<ChainVariant>,
    pub axis: SweepAxis,
    pub elevation_grid_deg: Vec<f64>,
    pub epsilon_grid_db: Vec<f64>,
    pub engines: Vec<Engine>,
    pub n_samples: usize,
    pub seed: u64,
    pub chain_options: ChainOptions,
    pub bandwidth_rule: BandwidthRule,
    pub outage_definition: OutageDefinition,
}

/// One output row of a sweep. Carries every input needed to reproduce it.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub configuration: Configuration,
    pub band: Band,
    pub leo_altitude_km: Option<f64>,
    pub alpha_deg: f64,
    pub epsilon_db: f64,
    pub engine: Engine,
    pub outage: Option<f64>,
    pub outage_std_error: Option<f64>,
    pub capacity_bps: Option<f64>,
    pub capacity_std_error: Option<f64>,
    pub per_hop_snr_db: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub error: Option<String>,
}

/// Runs a sweep. Grid points execute in parallel; rows come back in
/// deterministic order (variant-major, then grid, then engine) regardless of
/// scheduling. Per-point failures are reported in the row's `error` field
/// without aborting the rest of the sweep.
pub fn run_sweep(
    catalog: &Catalog,
    tables: &AttenuationTables,
    plan: &SweepPlan,
) -> Result<Vec<SweepRow>, EvaluatorError> {
    if plan.elevation_grid_deg.is_empty() || plan.epsilon_grid_db.is_empty() {
        return Err(EvaluatorError::EmptyGrid);
    }
    let points: Vec<(f64, f64)> = match plan.axis {
        SweepAxis::Elevation => {
            if plan.epsilon_grid_db.len() != 1 {
                return Err(EvaluatorError::FixedGridShape {
                    axis: plan.axis,
                    got: plan.epsilon_grid_db.len(),
                });
            }
            plan.elevation_grid_deg
                .iter()
                .map(|&a| (a, plan.epsilon_grid_db[0]))
                .collect()
        }
        SweepAxis::Threshold => {
            if plan.elevation_grid_deg.len() != 1 {
                return Err(EvaluatorError::FixedGridShape {
                    axis: plan.axis,
                    got: plan.elevation_grid_deg.len(),
                });
            }
            plan.epsilon_grid_db
                .iter()
                .map(|&e| (plan.elevation_grid_deg[0], e))
                .collect()
        }
    };

    let wants_mc = plan.engines.contains(&Engine::MonteCarlo);

    // One realization set per chain variant, shared by all its grid points.
    // The fading models of a chain do not depend on the grid coordinates, so
    // the chain built at the first point supplies them; if that build fails,
    // the per-point evaluation reports the same failure in its rows.
    let realizations: Vec<Option<FadingRealizations>> = plan
        .variants
        .iter()
        .enumerate()
        .map(|(index, variant)| {
            if !wants_mc {
                return None;
            }
            let alpha = ElevationAngle::new(points[0].0).ok()?;
            let chain = build_chain(
                catalog,
                tables,
                variant.configuration,
                plan.band,
                alpha,
                variant.leo_altitude_km,
                &plan.chain_options,
            )
            .ok()?;
            let models: Vec<FadingModel> = chain.iter().map(|h| h.fading).collect();
            Some(FadingRealizations::generate(
                &models,
                plan.n_samples,
                &mut chain_rng(plan.seed, index as u64),
            ))
        })
        .collect();

    let tasks: Vec<(usize, usize)> = (0..plan.variants.len())
        .flat_map(|v| (0..points.len()).map(move |p| (v, p)))
        .collect();

    let rows: Vec<Vec<SweepRow>> = tasks
        .par_iter()
        .map(|&(v, p)| {
            let variant = plan.variants[v];
            let (alpha_deg, epsilon_db) = points[p];
            evaluate_sweep_point(
                catalog,
                tables,
                plan,
                variant,
                realizations[v].as_ref(),
                alpha_deg,
                epsilon_db,
            )
        })
        .collect();

    Ok(rows.into_iter().flatten().collect())
}

#[allow(clippy::too_many_arguments)]
fn evaluate_sweep_point(
    catalog: &Catalog,
    tables: &AttenuationTables,
    plan: &SweepPlan,
    variant: ChainVariant,
    realizations: Option<&FadingRealizations>,
    alpha_deg: f64,
    epsilon_db: f64,
) -> Vec<SweepRow> {
    let blank = |engine: Engine| SweepRow {
        configuration: variant.configuration,
        band: plan.band,
        leo_altitude_km: variant.leo_altitude_km,
        alpha_deg,
        epsilon_db,
        engine,
        outage: None,
        outage_std_error: None,
        capacity_bps: None,
        capacity_std_error: None,
        per_hop_snr_db: Vec::new(),
        n_samples: plan.n_samples,
        seed: plan.seed,
        error: None,
    };

    let chain = ElevationAngle::new(alpha_deg)
        .map_err(ScenarioError::from)
        .and_then(|alpha| {
            build_chain(
                catalog,
                tables,
                variant.configuration,
                plan.band,
                alpha,
                variant.leo_altitude_km,
                &plan.chain_options,
            )
        });
    let chain = match chain {
        Ok(chain) => chain,
        Err(e) => {
            return plan
                .engines
                .iter()
                .map(|&engine| {
                    let mut row = blank(engine);
                    row.error = Some(e.to_string());
                    row
                })
                .collect();
        }
    };
    let per_hop: Vec<f64> = chain.iter().map(|h| h.deterministic_snr_db()).collect();

    plan.engines
        .iter()
        .map(|&engine| {
            let mut row = blank(engine);
            row.per_hop_snr_db = per_hop.clone();
            match engine {
                Engine::Analytic => {
                    match outage_analytic(&chain, SnrThreshold(epsilon_db), plan.outage_definition)
                    {
                        Ok(p) => row.outage = Some(p),
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
                Engine::MonteCarlo => match realizations {
                    Some(re) => match evaluate_monte_carlo(
                        &chain,
                        re,
                        SnrThreshold(epsilon_db),
                        plan.bandwidth_rule,
                        plan.outage_definition,
                    ) {
                        Ok((outage, capacity)) => {
                            row.outage = Some(outage.value);
                            row.outage_std_error = Some(outage.std_error);
                            row.capacity_bps = Some(capacity.value);
                            row.capacity_std_error = Some(capacity.std_error);
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    },
                    None => row.error = Some("no realizations generated".to_string()),
                },
            }
            row
        })
        .collect()
}
