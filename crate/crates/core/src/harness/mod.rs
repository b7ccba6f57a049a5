//! Seeded Monte Carlo experiments, their configuration and CSV output.
//!
//! Every work unit (sweep point, batch) draws from its own generator, seeded
//! from the master seed and the unit's position, so results do not depend on
//! scheduling.

pub mod config;
mod experiments;
pub mod output;
pub mod stats;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiments::{
    emit_diffraction_profile, fresnel_signal_table, noiseless_roundtrip, run_fresnel_sweep,
    run_jitter_experiment, run_pit_depth_sweep, run_ter_sweep, Profile, RoundTrip, RunError,
};
pub use stats::{wilson_interval, ErrorCount, TerCurve, TerRow};
