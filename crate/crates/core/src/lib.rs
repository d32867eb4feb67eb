//! Evaluation library for multi-layered non-terrestrial relay chains.
//!
//! A GEO satellite signal reaches the ground either directly or through LEO
//! and/or stratospheric HAP relays operating amplify-and-forward. This crate
//! models each hop's link budget (EIRP, G/T, path loss, noise), composes the
//! end-to-end AF SNR, and evaluates outage probability and ergodic capacity
//! both analytically and by Monte Carlo simulation.
//!
//! Modules, bottom-up:
//!
//! - [`geometry`]: slant ranges on a spherical Earth at a shared elevation
//! - [`propagation`]: free-space plus table-driven atmospheric losses
//! - [`fading`]: Shadowed-Rician / Rician / fading-free gain laws
//! - [`linkbudget`]: per-hop SNR and the AF composition rule
//! - [`scenarios`]: the platform catalog and the GE/GLE/GHE/GLHE chains
//! - [`evaluator`]: outage, capacity, and parameter sweeps
//! - [`numerics`]: the special functions behind the fading laws

pub mod evaluator;
pub mod fading;
pub mod geometry;
pub mod linkbudget;
pub mod numerics;
pub mod propagation;
pub mod scenarios;

pub use evaluator::{
    ergodic_capacity_mc, evaluate_chain, outage_analytic, outage_monte_carlo, run_sweep,
    BandwidthRule, ChainVariant, Engine, EvaluationResult, EvaluatorError, McEstimate,
    OutageDefinition, SnrThreshold, SweepAxis, SweepPlan, SweepRow,
};
pub use fading::{FadingError, FadingModel};
pub use geometry::{slant_range, Altitude, ElevationAngle, GeometryError, EARTH_RADIUS_KM};
pub use linkbudget::{
    af_end_to_end_snr, HopBudget, HopSnrSample, LinkBudgetError, BOLTZMANN_DBW_PER_K_HZ,
};
pub use propagation::{
    free_space_loss, AttenuationTables, Environment, LinkEnvironment, LossBreakdown,
    PropagationError,
};
pub use scenarios::{
    build_chain, Band, Catalog, ChainOptions, Configuration, PlatformKind, ScenarioError,
    TerrestrialGtMode,
};
