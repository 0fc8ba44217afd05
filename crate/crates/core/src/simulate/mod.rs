//! Samplers for the simulation settings and the study runners built on them.

mod sampler;
mod settings;
mod studies;

pub use sampler::{sample_sequence, CovarianceSpec, Family, SamplerSpec};
pub use settings::{AltKind, ConvergenceSetting, NullSetting, PowerSetting};
pub use studies::{
    run_convergence_study, run_critical_value_study, run_power_study, ConvergenceConfig, ConvergenceCurve,
    CriticalValueConfig, CriticalValueRow, PowerConfig, PowerResult, ReplicateOutcome,
};
