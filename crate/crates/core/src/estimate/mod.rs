//! Whittle estimation, Fisher information and the Monte Carlo harness.

mod fisher;
mod montecarlo;
mod whittle;

pub use fisher::{
    fisher_information, fisher_trapezoid, i12_complex_form, local_scaling, FisherMatrix,
};
pub use montecarlo::{
    run_monte_carlo, run_monte_carlo_with, MonteCarloConfig, MonteCarloOptions, MonteCarloSummary,
};
pub(crate) use whittle::{minimize_over_chart, standard_errors};
pub use whittle::{whittle_estimate, EstimationResult, DEFAULT_BUDGET, DEFAULT_INIT};
