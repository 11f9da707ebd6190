use super::fisher::fisher_information;
use crate::error::{Error, Result};
use crate::kernels::ThetaParams;
use crate::optim::{chart_to_theta, nelder_mead, theta_to_chart};
use crate::simulate::SamplePath;
use crate::spectral::{periodogram, SpectralConfig, WhittleObjective};
use serde::{Deserialize, Serialize};

/// Output of an estimator run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub theta_hat: ThetaParams,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stderr_alpha: f64,
    pub stderr_hurst: f64,
}

pub const DEFAULT_INIT: ThetaParams = ThetaParams {
    alpha: 1.0,
    hurst: 0.85,
};
pub const DEFAULT_BUDGET: usize = 500;
pub(crate) const SIMPLEX_RADIUS: f64 = 0.3;
pub(crate) const SIMPLEX_XTOL: f64 = 1e-6;

/// Coarse 5×5 grid: α log-spaced on [0.2, 5], H on [0.76, 0.99].
pub(crate) fn prescan_grid() -> Vec<ThetaParams> {
    let mut out = Vec::with_capacity(25);
    for i in 0..5 {
        let alpha = 0.2 * 25f64.powf(i as f64 / 4.0);
        for j in 0..5 {
            let hurst = 0.76 + 0.23 * j as f64 / 4.0;
            out.push(ThetaParams { alpha, hurst });
        }
    }
    out
}

/// Asymptotic standard errors `sqrt(diag(I⁻¹)/T)`.
///
/// NaN when the information cannot be inverted at θ̂, which happens on the edge of the
/// chart; the estimate itself is still reported.
pub(crate) fn standard_errors(theta: ThetaParams, horizon: f64) -> (f64, f64) {
    match fisher_information(theta, 1e-8).and_then(|f| f.inverse()) {
        Ok(inv) => ((inv[1][1] / horizon).sqrt(), (inv[0][0] / horizon).sqrt()),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

/// Minimizes `objective` over the chart, starting from the best of `init` and the pre-scan grid.
pub(crate) fn minimize_over_chart<F: FnMut(ThetaParams) -> Result<f64>>(
    mut objective: F,
    init: ThetaParams,
    budget: usize,
) -> Result<(ThetaParams, f64, usize, bool)> {
    let init = ThetaParams::new(init.alpha, init.hurst)?;
    let mut start = init;
    let mut best = objective(init)?;
    for cand in prescan_grid() {
        let v = objective(cand)?;
        if v < best {
            best = v;
            start = cand;
        }
    }
    let mut failure = None;
    let m = nelder_mead(
        |p| match chart_to_theta(p) {
            None => f64::INFINITY,
            Some(t) => match objective(t) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
        },
        theta_to_chart(start),
        SIMPLEX_RADIUS,
        SIMPLEX_XTOL,
        budget,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let theta = chart_to_theta(m.x)
        .ok_or_else(|| Error::DegenerateData("optimizer left the domain".into()))?;
    Ok((theta, m.fx, m.iterations, m.converged))
}

/// Whittle estimate of θ from a sampled path.
pub fn whittle_estimate(
    path: &SamplePath,
    cfg: SpectralConfig,
    init: ThetaParams,
    opt_budget: usize,
) -> Result<EstimationResult> {
    if path.values.len() < 256 {
        return Err(Error::InsufficientData {
            needed: 256,
            got: path.values.len(),
        });
    }
    let first = path.values[1];
    if path.values[1..].iter().all(|&v| v == first) {
        return Err(Error::DegenerateData("path is constant".into()));
    }
    let obj = WhittleObjective::new(&periodogram(path)?, cfg);
    let (theta_hat, objective, iterations, converged) =
        minimize_over_chart(|t| obj.eval(t), init, opt_budget)?;
    let (stderr_alpha, stderr_hurst) = standard_errors(theta_hat, path.horizon());
    Ok(EstimationResult {
        theta_hat,
        objective,
        iterations,
        converged,
        stderr_alpha,
        stderr_hurst,
    })
}
