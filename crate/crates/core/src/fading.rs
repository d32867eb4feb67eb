//! Stochastic fading term of the per-hop SNR: samplers and exceedance
//! probabilities for Shadowed-Rician, Rician, and fading-free channels.
//!
//! The Shadowed-Rician law models a Rician channel whose line-of-sight
//! amplitude is itself Nakagami-m distributed. Its linear power gain g has
//! density
//!
//! ```text
//! f(g) = (2 b0 m / (2 b0 m + w))^m / (2 b0)
//!        * exp(-g / (2 b0)) * 1F1(m; 1; w g / (2 b0 (2 b0 m + w)))
//! ```
//!
//! with mean power 2 b0 + w. The Rician law is constructed with unit mean
//! power: LOS power K/(K+1), scatter power 1/(K+1).

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{adaptive_simpson, ln_hyp1f1, marcum_q1, NumericsError};

/// Absolute tolerance for the exceedance quadrature.
const QUADRATURE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FadingError {
    #[error("invalid Shadowed-Rician parameters: b0, m, omega must all be > 0 and finite")]
    InvalidShadowedRician,
    #[error("invalid Rician parameter: K must be >= 0 and finite")]
    InvalidRician,
    #[error("exceedance threshold must be finite, got {0}")]
    NonFiniteThreshold(f64),
    #[error("numerical evaluation failed: {0}")]
    Numerics(#[from] NumericsError),
}

/// Per-hop fading law for the multiplicative power gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FadingModel {
    /// Shadowed-Rician: `b0` is the half average scatter power, `m` the
    /// Nakagami shadowing severity, `omega` the average LOS power.
    ShadowedRician { b0: f64, m: f64, omega: f64 },
    /// Rician with linear LOS-to-scatter power ratio `k_factor`, unit mean.
    Rician { k_factor: f64 },
    /// Deterministic channel; the gain is exactly 0 dB.
    NoFading,
}

impl FadingModel {
    pub fn validate(&self) -> Result<(), FadingError> {
        match *self {
            FadingModel::ShadowedRician { b0, m, omega } => {
                let ok = b0.is_finite()
                    && m.is_finite()
                    && omega.is_finite()
                    && b0 > 0.0
                    && m > 0.0
                    && omega > 0.0;
                if ok {
                    Ok(())
                } else {
                    Err(FadingError::InvalidShadowedRician)
                }
            }
            FadingModel::Rician { k_factor } => {
                if k_factor.is_finite() && k_factor >= 0.0 {
                    Ok(())
                } else {
                    Err(FadingError::InvalidRician)
                }
            }
            FadingModel::NoFading => Ok(()),
        }
    }

    /// Expected linear power gain E[g]: 2 b0 + omega for Shadowed-Rician,
    /// 1 for the unit-mean Rician and for the fading-free channel.
    pub fn mean_linear_gain(&self) -> f64 {
        match *self {
            FadingModel::ShadowedRician { b0, omega, .. } => 2.0 * b0 + omega,
            FadingModel::Rician { .. } | FadingModel::NoFading => 1.0,
        }
    }

    /// Draws one linear power gain realization.
    pub fn sample_gain_linear<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        GainSampler::new(self).sample(rng)
    }

    /// Draws one gain realization in dB (`10 log10 g`). `NoFading` returns
    /// exactly 0.
    pub fn sample_gain_db<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingModel::NoFading => 0.0,
            _ => 10.0 * self.sample_gain_linear(rng).log10(),
        }
    }

    /// P[tau > x] where tau is the fading gain in dB.
    ///
    /// `NoFading` is a unit step at 0 dB. Rician uses the Marcum Q form.
    /// Shadowed-Rician integrates the density numerically, below the mean as
    /// 1 - CDF and above it as the direct tail integral.
    pub fn exceedance_probability(&self, x_db: f64) -> Result<f64, FadingError> {
        if !x_db.is_finite() {
            return Err(FadingError::NonFiniteThreshold(x_db));
        }
        self.validate()?;
        match *self {
            FadingModel::NoFading => Ok(if x_db < 0.0 { 1.0 } else { 0.0 }),
            FadingModel::Rician { k_factor } => {
                let x = 10f64.powf(x_db / 10.0);
                let a = (2.0 * k_factor).sqrt();
                let b = (2.0 * (k_factor + 1.0) * x).sqrt();
                Ok(marcum_q1(a, b))
            }
            FadingModel::ShadowedRician { b0, m, omega } => {
                let x = 10f64.powf(x_db / 10.0);
                shadowed_rician_exceedance(b0, m, omega, x).map_err(FadingError::from)
            }
        }
    }
}

fn shadowed_rician_exceedance(b0: f64, m: f64, omega: f64, x: f64) -> Result<f64, NumericsError> {
    let two_b0 = 2.0 * b0;
    let denom = two_b0 * m + omega;
    let ln_norm = m * (two_b0 * m / denom).ln() - two_b0.ln();
    let c = omega / (two_b0 * denom);
    // exponential decay rate of the density far in the tail; positive for
    // every valid parameter set since c < 1/(2 b0)
    let decay = 1.0 / two_b0 - c;

    let series_error = std::cell::Cell::new(None);
    let pdf = |g: f64| -> f64 {
        if g <= 0.0 {
            return 0.0;
        }
        match ln_hyp1f1(m, 1.0, c * g) {
            Ok(ln_h) => (ln_norm - g / two_b0 + ln_h).exp(),
            Err(e) => {
                series_error.set(Some(e));
                0.0
            }
        }
    };

    let mean = two_b0 + omega;
    let p = if x <= mean {
        let cdf = adaptive_simpson(&pdf, 0.0, x, QUADRATURE_TOL)?;
        1.0 - cdf
    } else {
        // the tail is close to exponential; pdf(x)/decay estimates its mass,
        // and tightening the tolerance to a fraction of that keeps tiny tail
        // probabilities accurate in relative terms as well
        let scale = pdf(x) / decay;
        if scale == 0.0 {
            return Ok(0.0);
        }
        let tol = (scale * 1e-7).min(QUADRATURE_TOL);
        let span = 60.0 / decay;
        adaptive_simpson(&pdf, x, x + span, tol)?
    };
    if let Some(e) = series_error.take() {
        return Err(e);
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Reusable sampler for one fading model. Drawing through a prebuilt sampler
/// and through [`FadingModel::sample_gain_linear`] consumes the underlying
/// random stream identically.
#[derive(Debug, Clone)]
pub enum GainSampler {
    ShadowedRician { los_power: Gamma<f64>, sigma: f64 },
    Rician { nu: f64, sigma: f64 },
    NoFading,
}

impl GainSampler {
    pub fn new(model: &FadingModel) -> Self {
        match *model {
            FadingModel::ShadowedRician { b0, m, omega } => GainSampler::ShadowedRician {
                // LOS power ~ Gamma(m, omega/m), i.e. Nakagami-m amplitude
                los_power: Gamma::new(m, omega / m).expect("validated parameters"),
                sigma: b0.sqrt(),
            },
            FadingModel::Rician { k_factor } => GainSampler::Rician {
                nu: (k_factor / (k_factor + 1.0)).sqrt(),
                sigma: (0.5 / (k_factor + 1.0)).sqrt(),
            },
            FadingModel::NoFading => GainSampler::NoFading,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            GainSampler::ShadowedRician { los_power, sigma } => {
                let los_amplitude = los_power.sample(rng).sqrt();
                let scatter = Normal::new(0.0, *sigma).expect("valid sigma");
                let in_phase = los_amplitude + scatter.sample(rng);
                let quadrature = scatter.sample(rng);
                in_phase * in_phase + quadrature * quadrature
            }
            GainSampler::Rician { nu, sigma } => {
                let scatter = Normal::new(0.0, *sigma).expect("valid sigma");
                let in_phase = nu + scatter.sample(rng);
                let quadrature = scatter.sample(rng);
                in_phase * in_phase + quadrature * quadrature
            }
            GainSampler::NoFading => 1.0,
        }
    }

    /// Gain in dB; exactly 0 for the fading-free channel.
    pub fn sample_db<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            GainSampler::NoFading => 0.0,
            _ => 10.0 * self.sample(rng).log10(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Table-1 space-to-ground parameter set.
    fn sr_model() -> FadingModel {
        FadingModel::ShadowedRician {
            b0: 0.158,
            m: 19.4,
            omega: 1.29,
        }
    }

    #[test]
    fn no_fading_is_exactly_zero_db() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            assert_eq!(FadingModel::NoFading.sample_gain_db(&mut rng), 0.0);
        }
    }

    #[test]
    fn no_fading_exceedance_is_a_step() {
        let nf = FadingModel::NoFading;
        assert_eq!(nf.exceedance_probability(-0.001).unwrap(), 1.0);
        assert_eq!(nf.exceedance_probability(0.0).unwrap(), 0.0);
        assert_eq!(nf.exceedance_probability(5.0).unwrap(), 0.0);
    }

    #[test]
    fn rician_sampler_is_unit_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = FadingModel::Rician { k_factor: 10.0 };
        let n = 1_000_000;
        let mean: f64 = (0..n)
            .map(|_| model.sample_gain_linear(&mut rng))
            .sum::<f64>()
            / n as f64;
        assert!(
            (mean - 1.0).abs() < 0.005,
            "Rician mean gain {mean} departs from 1 by more than 0.5%"
        );
    }

    #[test]
    fn shadowed_rician_mean_matches_moment_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let model = sr_model();
        let expected = model.mean_linear_gain();
        assert!((expected - 1.606).abs() < 1e-12);
        let n = 1_000_000;
        let mean: f64 = (0..n)
            .map(|_| model.sample_gain_linear(&mut rng))
            .sum::<f64>()
            / n as f64;
        assert!(
            (mean - expected).abs() / expected < 0.01,
            "Shadowed-Rician mean gain {mean} departs from {expected} by more than 1%"
        );
    }

    #[test]
    fn sampler_is_deterministic_for_a_seed() {
        let model = sr_model();
        let draw = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..64)
                .map(|_| model.sample_gain_db(&mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(99), draw(99));
        assert_ne!(draw(99), draw(100));
    }

    #[test]
    fn rayleigh_limit_has_closed_form() {
        // K = 0 degenerates to Rayleigh: P[g > x] = exp(-x)
        let model = FadingModel::Rician { k_factor: 0.0 };
        for x_db in [-10.0, -3.0, 0.0, 3.0, 7.0] {
            let x = 10f64.powf(x_db / 10.0);
            let p = model.exceedance_probability(x_db).unwrap();
            assert!(
                (p - (-x).exp()).abs() < 1e-12,
                "x_db={x_db}: got {p}, want {}",
                (-x).exp()
            );
        }
    }

    #[test]
    fn rician_exceedance_reference_values() {
        // Frozen from an offline noncentral chi-square evaluation.
        let model = FadingModel::Rician { k_factor: 10.0 };
        let cases = [
            (-20.0, 0.999992209062846),
            (-10.0, 0.9992612959365089),
            (-3.0, 0.9001500519184805),
            (0.0, 0.45690503562622875),
            (3.0, 0.019628134692885022),
        ];
        for (x_db, expected) in cases {
            let p = model.exceedance_probability(x_db).unwrap();
            assert!(
                (p - expected).abs() < 1e-9,
                "x_db={x_db}: got {p}, want {expected}"
            );
        }
    }

    #[test]
    fn shadowed_rician_exceedance_reference_values() {
        // Frozen from an offline 30-digit quadrature of the density.
        let model = sr_model();
        let cases = [
            (-20.0, 0.9991921571606916),
            (-10.0, 0.9892745537638319),
            (-3.0, 0.8909553848972361),
            (0.0, 0.6887169671915929),
            (3.0, 0.2983733983962388),
            (5.0, 0.07730579619854434),
            (10.0, 9.385405963323896e-7),
        ];
        for (x_db, expected) in cases {
            let p = model.exceedance_probability(x_db).unwrap();
            assert!(
                (p - expected).abs() < 1e-7,
                "x_db={x_db}: got {p}, want {expected}"
            );
        }
    }

    #[test]
    fn exceedance_is_monotone_and_bounded() {
        for model in [sr_model(), FadingModel::Rician { k_factor: 10.0 }] {
            let mut prev = 1.0_f64;
            for x_db in (-300..=300).map(|i| i as f64 / 10.0) {
                let p = model.exceedance_probability(x_db).unwrap();
                assert!((0.0..=1.0).contains(&p));
                assert!(
                    p <= prev + 1e-12,
                    "exceedance increased at {x_db} dB: {p} > {prev}"
                );
                prev = p;
            }
        }
    }

    #[test]
    fn exceedance_limits() {
        let model = sr_model();
        assert!((model.exceedance_probability(-200.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(model.exceedance_probability(60.0).unwrap() < 1e-12);
        // far tail threshold must not blow up
        assert_eq!(model.exceedance_probability(140.0).unwrap(), 0.0);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let bad = FadingModel::ShadowedRician {
            b0: -0.1,
            m: 19.4,
            omega: 1.29,
        };
        assert_eq!(bad.validate(), Err(FadingError::InvalidShadowedRician));
        let bad = FadingModel::Rician { k_factor: -1.0 };
        assert_eq!(bad.validate(), Err(FadingError::InvalidRician));
        assert!(sr_model().exceedance_probability(f64::NAN).is_err());
    }

    #[test]
    fn analytic_exceedance_agrees_with_sampling() {
        // 2e6-draw spot check; the acceptance suite runs the full 1e7-draw
        // version on the same grid.
        let n = 2_000_000_usize;
        for model in [sr_model(), FadingModel::Rician { k_factor: 10.0 }] {
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let draws: Vec<f64> = (0..n).map(|_| model.sample_gain_db(&mut rng)).collect();
            for x_db in [-10.0, -3.0, 0.0, 3.0] {
                let p = model.exceedance_probability(x_db).unwrap();
                let hits = draws.iter().filter(|&&t| t > x_db).count();
                let emp = hits as f64 / n as f64;
                let sigma = (p * (1.0 - p) / n as f64).sqrt();
                assert!(
                    (emp - p).abs() <= 3.0 * sigma.max(1e-9),
                    "{model:?} at {x_db} dB: empirical {emp}, analytic {p}, 3sigma {}",
                    3.0 * sigma
                );
            }
        }
    }
}
