//! Continuous-record maximum likelihood and the empirical information of the Girsanov score.
//!
//! For fixed H the drift is affine in α, `b_k = A_k + αB_k`, so the log-likelihood is a
//! quadratic in α whose five coefficients depend on H alone. One kernel sweep per H trial
//! gives them, and the coefficients are cached so the optimizer never repeats a sweep.

use super::drift::drift_parts;
use super::family::{cell_weights, for_each_horizon, KernelFamily};
use crate::error::{domain, Error, Result};
use crate::estimate::{minimize_over_chart, standard_errors, EstimationResult};
use crate::kernels::ThetaParams;
use crate::simulate::{derive_replication_seed, simulate_ou, SamplePath};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::RwLock;

/// Largest grid the likelihood routines accept.
pub const MLE_MAX_STEPS: usize = 4000;
/// Largest grid for [`empirical_fisher`], which needs `∂_H g` at every horizon.
pub const EMPIRICAL_FISHER_MAX_STEPS: usize = 1000;
/// Substeps per sampling step used to simulate paths for [`empirical_fisher`].
pub const EMPIRICAL_FISHER_REFINE: usize = 10;

/// `[ΣAΔX, ΣBΔX, ΣA²Δ, ΣABΔ, ΣB²Δ]` over `k < n`.
type Stats = [f64; 5];

fn quadratic_loglik(s: &Stats, alpha: f64) -> f64 {
    s[0] + alpha * s[1] - 0.5 * (s[2] + 2.0 * alpha * s[3] + alpha * alpha * s[4])
}

/// Log-likelihood of one path as a function of θ, memoized per H.
pub struct ProfileLikelihood<'a> {
    path: &'a SamplePath,
    dx: Vec<f64>,
    cache: RwLock<HashMap<u64, Stats>>,
}

impl<'a> ProfileLikelihood<'a> {
    pub fn new(path: &'a SamplePath) -> Result<Self> {
        let n = path.steps();
        if n > MLE_MAX_STEPS {
            return Err(domain(
                "n",
                format!("{n} steps exceed the continuous-record limit {MLE_MAX_STEPS}; use the Whittle estimator"),
            ));
        }
        if n < 2 {
            return Err(Error::InsufficientData {
                needed: 3,
                got: path.values.len(),
            });
        }
        let dx = path.values.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            path,
            dx,
            cache: RwLock::new(HashMap::new()),
        })
    }

    fn stats(&self, hurst: f64) -> Result<Stats> {
        let key = hurst.to_bits();
        if let Some(s) = self.cache.read().expect("cache poisoned").get(&key) {
            return Ok(*s);
        }
        let (x, dx, delta) = (&self.path.values, &self.dx, self.path.delta);
        let mut s = [0.0; 5];
        let mut add = |a: f64, b: f64, d: f64| {
            s[0] += a * d;
            s[1] += b * d;
            s[2] += a * a * delta;
            s[3] += a * b * delta;
            s[4] += b * b * delta;
        };
        add(0.0, -x[0], dx[0]);
        let mut w = Vec::new();
        for_each_horizon(hurst, delta, dx.len() - 1, false, |k, y, _| {
            cell_weights(hurst, y, &mut w);
            let p = drift_parts(x, dx, &w, k, delta);
            add(p.stoch, p.lin, dx[k]);
        })?;
        self.cache.write().expect("cache poisoned").insert(key, s);
        Ok(s)
    }

    /// `ℓ_T(θ)`.
    pub fn eval(&self, theta: ThetaParams) -> Result<f64> {
        let theta = ThetaParams::new(theta.alpha, theta.hurst)?;
        Ok(quadratic_loglik(&self.stats(theta.hurst)?, theta.alpha))
    }

    /// Number of distinct H values swept so far.
    pub fn sweeps(&self) -> usize {
        self.cache.read().expect("cache poisoned").len()
    }
}

/// Maximizes `ℓ_T(θ)` with the same pre-scan and simplex search as the Whittle estimator.
///
/// `objective` holds the maximized log-likelihood.
pub fn mle_continuous(
    path: &SamplePath,
    init: ThetaParams,
    budget: usize,
) -> Result<EstimationResult> {
    let lik = ProfileLikelihood::new(path)?;
    let (theta_hat, neg, iterations, converged) =
        minimize_over_chart(|t| lik.eval(t).map(|v| -v), init, budget)?;
    let (stderr_alpha, stderr_hurst) = standard_errors(theta_hat, path.horizon());
    Ok(EstimationResult {
        theta_hat,
        objective: -neg,
        iterations,
        converged,
        stderr_alpha,
        stderr_hurst,
    })
}

/// Monte Carlo average of `(2/T)Σ_{k=n/2}^{n−1} ∇b_{t_k}∇b_{t_k}ᵀΔ` in the order (H, α).
///
/// Paths are simulated on a grid [`EMPIRICAL_FISHER_REFINE`] times finer and sampled at Δ.
/// The result does not depend on the rayon pool size.
pub fn empirical_fisher(
    theta0: ThetaParams,
    horizon: f64,
    delta: f64,
    reps: usize,
    master_seed: u64,
) -> Result<[[f64; 2]; 2]> {
    let theta0 = ThetaParams::new(theta0.alpha, theta0.hurst)?;
    if reps == 0 {
        return Err(domain("reps", "must be at least 1"));
    }
    if !(delta > 0.0 && horizon > 0.0) {
        return Err(domain("delta", "horizon and step must be positive"));
    }
    let n = (horizon / delta).round() as usize;
    if n > EMPIRICAL_FISHER_MAX_STEPS {
        return Err(domain(
            "n",
            format!("T/Δ = {n} exceeds {EMPIRICAL_FISHER_MAX_STEPS}"),
        ));
    }
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    let family = KernelFamily::build(theta0.hurst, delta, n, true)?;
    let first = n / 2;
    let window = (n - first) as f64 * delta;
    let per_rep: Vec<[f64; 3]> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let seed = derive_replication_seed(master_seed, r);
            let (path, _) = simulate_ou(
                theta0.alpha,
                theta0.hurst,
                delta,
                n,
                EMPIRICAL_FISHER_REFINE,
                seed,
            )?;
            let proc = super::innovation_drift(&path, theta0, &family)?;
            let mut acc = [0.0; 3];
            for g in &proc.grad_b[first..n] {
                acc[0] += g[0] * g[0];
                acc[1] += g[0] * g[1];
                acc[2] += g[1] * g[1];
            }
            Ok(acc.map(|v| v * delta / window))
        })
        .collect::<Result<_>>()?;
    let mut m = [0.0; 3];
    for a in &per_rep {
        for (mi, ai) in m.iter_mut().zip(a) {
            *mi += ai;
        }
    }
    let m = m.map(|v| v / reps as f64);
    Ok([[m[0], m[1]], [m[1], m[2]]])
}
