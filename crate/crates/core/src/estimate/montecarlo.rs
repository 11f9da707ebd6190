use super::fisher::fisher_information;
use super::whittle::{whittle_estimate, EstimationResult, DEFAULT_BUDGET, DEFAULT_INIT};
use crate::error::{Error, Result};
use crate::kernels::ThetaParams;
use crate::simulate::{derive_replication_seed, simulate_ou};
use crate::spectral::SpectralConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Configuration echoed in the summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub alpha: f64,
    pub hurst: f64,
    pub delta: f64,
    pub n: usize,
    #[serde(rename = "truncation_K")]
    pub truncation_k: usize,
}

/// Aggregate of a Monte Carlo study. Matrices are row-major in the order (H, α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub reps: usize,
    pub mean_alpha: f64,
    pub mean_hurst: f64,
    pub sample_cov: [f64; 4],
    pub fisher_inverse: [f64; 4],
    pub failures: usize,
    pub master_seed: u64,
    pub config: MonteCarloConfig,
}

/// Knobs beyond the study design itself.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloOptions {
    pub refine: usize,
    pub init: ThetaParams,
    pub budget: usize,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self {
            refine: 1,
            init: DEFAULT_INIT,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Simulates and fits `reps` paths in parallel; see [`run_monte_carlo_with`].
pub fn run_monte_carlo(
    theta0: ThetaParams,
    delta: f64,
    n: usize,
    reps: usize,
    master_seed: u64,
    cfg: SpectralConfig,
) -> Result<MonteCarloSummary> {
    run_monte_carlo_with(
        theta0,
        delta,
        n,
        reps,
        master_seed,
        cfg,
        MonteCarloOptions::default(),
    )
    .map(|(s, _)| s)
}

/// Runs the study and also returns every per-replication estimate, in replication order.
///
/// Non-converged replications are counted in `failures` and left out of the
/// means and covariance. Results do not depend on the rayon pool size.
pub fn run_monte_carlo_with(
    theta0: ThetaParams,
    delta: f64,
    n: usize,
    reps: usize,
    master_seed: u64,
    cfg: SpectralConfig,
    opts: MonteCarloOptions,
) -> Result<(MonteCarloSummary, Vec<EstimationResult>)> {
    if reps == 0 {
        return Err(crate::error::domain("reps", "must be at least 1"));
    }
    let theta0 = ThetaParams::new(theta0.alpha, theta0.hurst)?;
    let estimates: Vec<EstimationResult> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let seed = derive_replication_seed(master_seed, r);
            let (path, _) = simulate_ou(theta0.alpha, theta0.hurst, delta, n, opts.refine, seed)?;
            whittle_estimate(&path, cfg, opts.init, opts.budget)
        })
        .collect::<Result<Vec<_>>>()?;

    let ok: Vec<&EstimationResult> = estimates.iter().filter(|e| e.converged).collect();
    if ok.is_empty() {
        return Err(Error::AllReplicationsFailed);
    }
    let m = ok.len() as f64;
    let mean_alpha = ok.iter().map(|e| e.theta_hat.alpha).sum::<f64>() / m;
    let mean_hurst = ok.iter().map(|e| e.theta_hat.hurst).sum::<f64>() / m;
    let horizon = n as f64 * delta;
    let scaled: Vec<[f64; 2]> = ok
        .iter()
        .map(|e| {
            let s = horizon.sqrt();
            [
                s * (e.theta_hat.hurst - theta0.hurst),
                s * (e.theta_hat.alpha - theta0.alpha),
            ]
        })
        .collect();
    let mut cov = [0.0; 4];
    if ok.len() > 1 {
        let mu = [
            scaled.iter().map(|v| v[0]).sum::<f64>() / m,
            scaled.iter().map(|v| v[1]).sum::<f64>() / m,
        ];
        for v in &scaled {
            let d = [v[0] - mu[0], v[1] - mu[1]];
            cov[0] += d[0] * d[0];
            cov[1] += d[0] * d[1];
            cov[3] += d[1] * d[1];
        }
        for c in cov.iter_mut() {
            *c /= m - 1.0;
        }
        cov[2] = cov[1];
    }
    let inv = fisher_information(theta0, 1e-8)?.inverse()?;
    let summary = MonteCarloSummary {
        reps,
        mean_alpha,
        mean_hurst,
        sample_cov: cov,
        fisher_inverse: [inv[0][0], inv[0][1], inv[1][0], inv[1][1]],
        failures: reps - ok.len(),
        master_seed,
        config: MonteCarloConfig {
            alpha: theta0.alpha,
            hurst: theta0.hurst,
            delta,
            n,
            truncation_k: cfg.truncation_k,
        },
    };
    Ok((summary, estimates))
}
