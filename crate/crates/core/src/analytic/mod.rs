//! Asymptotic tail probabilities and critical values for the scan statistics.

mod quadrature;
mod skewness;
mod tail;

pub use quadrature::GaussLegendre;
pub use skewness::{skewness_table, Component, SkewnessSource, SkewnessTable, MAX_ENUMERATION_N};
pub use tail::{
    analytic_p_value, critical_value, h_functions, nu_approx, tail_m, tail_probability, tail_t, Quadrature,
    TailConfig,
};
