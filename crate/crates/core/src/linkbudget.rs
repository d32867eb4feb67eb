//! Per-hop SNR budget and end-to-end amplify-and-forward composition.
//!
//! A hop's deterministic SNR in dB is
//!
//! ```text
//! EIRP + G/T - PL + 228.6 - 10 log10(B_Hz) - NF
//! ```
//!
//! (the Boltzmann constant enters as -k = +228.6 dB), and the fading term
//! tau adds on top per realization. The end-to-end SNR of an N-hop
//! amplify-and-forward chain is
//!
//! ```text
//! gamma_AF = [ prod_n (1 + 1/gamma_n) - 1 ]^-1
//! ```

use rand::Rng;
use thiserror::Error;

use crate::fading::FadingModel;
use crate::propagation::LossBreakdown;

/// Boltzmann constant, dBW/K/Hz.
pub const BOLTZMANN_DBW_PER_K_HZ: f64 = -228.6;

#[derive(Debug, Error, PartialEq)]
pub enum LinkBudgetError {
    #[error("amplify-and-forward composition needs at least one hop")]
    EmptyChain,
    #[error("hop SNRs must be positive and finite, got {0}")]
    NonPositiveSnr(f64),
}

/// Everything needed to evaluate one hop of a relay chain.
#[derive(Debug, Clone)]
pub struct HopBudget {
    /// Human-readable hop name, e.g. `GEO->HAP`.
    pub label: String,
    pub eirp_dbw: f64,
    pub g_over_t_db_k: f64,
    pub path_loss: LossBreakdown,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub fading: FadingModel,
    pub carrier_ghz: f64,
    pub distance_km: f64,
}

impl HopBudget {
    pub fn noise_bandwidth_db_hz(&self) -> f64 {
        10.0 * self.bandwidth_hz.log10()
    }

    /// The dB budget sum with tau = 0.
    pub fn deterministic_snr_db(&self) -> f64 {
        self.eirp_dbw + self.g_over_t_db_k
            - self.path_loss.total
            - BOLTZMANN_DBW_PER_K_HZ
            - self.noise_bandwidth_db_hz()
            - self.noise_figure_db
    }

    /// Draws one fading realization and returns the full SNR sample.
    pub fn sample_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> HopSnrSample {
        let deterministic_db = self.deterministic_snr_db();
        let fading_db = self.fading.sample_gain_db(rng);
        HopSnrSample::new(deterministic_db, fading_db)
    }
}

/// One realized hop SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopSnrSample {
    pub deterministic_db: f64,
    pub fading_db: f64,
    pub total_db: f64,
    pub total_linear: f64,
}

impl HopSnrSample {
    pub fn new(deterministic_db: f64, fading_db: f64) -> Self {
        let total_db = deterministic_db + fading_db;
        Self {
            deterministic_db,
            fading_db,
            total_db,
            total_linear: 10f64.powf(total_db / 10.0),
        }
    }
}

/// End-to-end amplify-and-forward SNR of a chain from its per-hop linear
/// SNRs. Never exceeds the weakest hop.
///
/// The product is accumulated in log space (`ln_1p`/`exp_m1`) so chains of
/// very strong hops do not lose the tiny `1/gamma` increments to rounding.
pub fn af_end_to_end_snr(hop_snrs_linear: &[f64]) -> Result<f64, LinkBudgetError> {
    if hop_snrs_linear.is_empty() {
        return Err(LinkBudgetError::EmptyChain);
    }
    for &g in hop_snrs_linear {
        if !g.is_finite() || g <= 0.0 {
            return Err(LinkBudgetError::NonPositiveSnr(g));
        }
    }
    if hop_snrs_linear.len() == 1 {
        return Ok(hop_snrs_linear[0]);
    }
    let log_product: f64 = hop_snrs_linear.iter().map(|&g| (1.0 / g).ln_1p()).sum();
    Ok(1.0 / log_product.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::FadingModel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plain_budget(bandwidth_hz: f64) -> HopBudget {
        HopBudget {
            label: "test".into(),
            eirp_dbw: 0.0,
            g_over_t_db_k: 0.0,
            path_loss: LossBreakdown::free_space_only(0.0),
            bandwidth_hz,
            noise_figure_db: 0.0,
            fading: FadingModel::NoFading,
            carrier_ghz: 2.0,
            distance_km: 1.0,
        }
    }

    #[test]
    fn all_zero_budget_isolates_boltzmann() {
        // EIRP = G/T = PL = NF = 0, B = 1 Hz leaves only -k = 228.6 dB
        let b = plain_budget(1.0);
        assert!((b.deterministic_snr_db() - 228.6).abs() < 1e-12);
    }

    #[test]
    fn doubling_bandwidth_costs_3_01_db() {
        let b1 = plain_budget(30e6);
        let b2 = plain_budget(60e6);
        let drop = b1.deterministic_snr_db() - b2.deterministic_snr_db();
        assert!((drop - 10.0 * 2f64.log10()).abs() < 1e-12, "got {drop}");
    }

    #[test]
    fn sample_respects_db_decomposition() {
        let mut b = plain_budget(30e6);
        b.fading = FadingModel::Rician { k_factor: 10.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = b.sample_snr(&mut rng);
            assert_eq!(s.total_db, s.deterministic_db + s.fading_db);
            assert!(s.total_linear > 0.0);
            assert!((s.total_linear.log10() * 10.0 - s.total_db).abs() < 1e-9);
        }
    }

    #[test]
    fn af_single_hop_is_identity() {
        for g in [1e-3, 1.0, 42.0, 1e7] {
            assert_eq!(af_end_to_end_snr(&[g]).unwrap(), g);
        }
    }

    #[test]
    fn af_two_unit_hops() {
        // ((1+1)(1+1) - 1)^-1 = 1/3
        let v = af_end_to_end_snr(&[1.0, 1.0]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14, "got {v}");
    }

    #[test]
    fn af_bottleneck_dominates() {
        // ((1+1e-6)(1+1) - 1)^-1 = 1/(1 + 2e-6) = 0.999998000004
        let v = af_end_to_end_snr(&[1e6, 1.0]).unwrap();
        assert!((v - 0.999998000004).abs() < 1e-12, "got {v}");
        assert!(v <= 1.0);
    }

    #[test]
    fn af_never_exceeds_weakest_hop() {
        let chains: [&[f64]; 4] = [
            &[10.0, 10.0],
            &[1e7, 2.0, 1e7],
            &[0.01, 1e6],
            &[5.0, 5.0, 5.0, 5.0],
        ];
        for hops in chains {
            let v = af_end_to_end_snr(hops).unwrap();
            let min = hops.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(v <= min, "{hops:?}: {v} > {min}");
            assert!(v > 0.0);
        }
    }

    #[test]
    fn af_is_precise_for_very_strong_hops() {
        // four 160 dB hops: gamma_AF = 1e16/4, which a naive product loses
        let g = 1e16;
        let v = af_end_to_end_snr(&[g, g, g, g]).unwrap();
        assert!((v - g / 4.0).abs() / (g / 4.0) < 1e-12, "got {v}");
    }

    #[test]
    fn af_rejects_bad_input() {
        assert_eq!(af_end_to_end_snr(&[]), Err(LinkBudgetError::EmptyChain));
        assert_eq!(
            af_end_to_end_snr(&[1.0, 0.0]),
            Err(LinkBudgetError::NonPositiveSnr(0.0))
        );
        assert!(af_end_to_end_snr(&[1.0, -2.0]).is_err());
        assert!(af_end_to_end_snr(&[1.0, f64::INFINITY]).is_err());
    }
}
