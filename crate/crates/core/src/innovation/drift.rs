//! Drift `b_t(X, θ)`, its gradient, the innovation Brownian motion and the Girsanov log-likelihood.
//!
//! All stochastic and Lebesgue integrals are left-point sums on the sampling grid.

use super::family::KernelFamily;
use crate::error::{domain, Error, Result};
use crate::kernels::ThetaParams;
use crate::simulate::{MixedIncrements, SamplePath};
use serde::{Deserialize, Serialize};

/// Drift, gradient and innovation values on the sampling grid `t_k = kΔ`, `k = 0..=n`.
///
/// `grad_b[k] = [∂_H b, ∂_α b]`. Fields that an operation does not compute are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnovationProcess {
    pub delta: f64,
    pub b_values: Vec<f64>,
    pub grad_b: Vec<[f64; 2]>,
    pub bbar_values: Vec<f64>,
}

fn check_grid(family: &KernelFamily, delta: f64, horizons: usize) -> Result<()> {
    if (family.delta() - delta).abs() > 1e-12 * delta {
        return Err(Error::Shape(format!(
            "kernel grid step {} differs from data step {delta}",
            family.delta()
        )));
    }
    if family.len() < horizons {
        return Err(Error::Shape(format!(
            "kernel family covers {} horizons, need {horizons}",
            family.len()
        )));
    }
    Ok(())
}

fn check_hurst(family: &KernelFamily, hurst: f64) -> Result<()> {
    let h = family.hurst();
    if !h.is_nan() && h != hurst {
        return Err(domain(
            "hurst",
            format!("kernel family was built for H = {h}, not {hurst}"),
        ));
    }
    Ok(())
}

/// `Σ_{m=1}^{k} w[m−1]·v[k−m]`: weights run backward in time from `t_k`.
#[inline]
fn backward_dot(w: &[f64], v: &[f64], k: usize) -> f64 {
    w.iter().zip(v[..k].iter().rev()).map(|(a, b)| a * b).sum()
}

/// Per-grid-point pieces `b_k = A_k + α·B_k` with `A_k = Σ g ΔX` and `B_k = −X_k + Σ g X Δ`.
pub(crate) struct DriftParts {
    pub stoch: f64,
    pub lin: f64,
}

pub(crate) fn drift_parts(x: &[f64], dx: &[f64], w: &[f64], k: usize, delta: f64) -> DriftParts {
    DriftParts {
        stoch: backward_dot(w, dx, k),
        lin: -x[k] + delta * backward_dot(w, x, k),
    }
}

/// `b_{t_k}` and `∇b_{t_k}` for every grid point of `path`.
pub fn innovation_drift(
    path: &SamplePath,
    theta: ThetaParams,
    family: &KernelFamily,
) -> Result<InnovationProcess> {
    let theta = ThetaParams::new(theta.alpha, theta.hurst)?;
    let n = path.steps();
    check_grid(family, path.delta, n)?;
    check_hurst(family, theta.hurst)?;
    let x = &path.values;
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta = path.delta;
    let alpha = theta.alpha;
    // dM = dX + αXΔ on each cell
    let dm: Vec<f64> = dx
        .iter()
        .zip(x.iter())
        .map(|(d, xi)| d + alpha * xi * delta)
        .collect();
    let mut b_values = Vec::with_capacity(n + 1);
    let mut grad_b = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let w = family.weights(k);
        let parts = drift_parts(x, &dx, w, k, delta);
        b_values.push(parts.stoch + alpha * parts.lin);
        let d_hurst = match family.dweights(k) {
            Some(dw) => backward_dot(dw, &dm, k),
            None => f64::NAN,
        };
        grad_b.push([d_hurst, parts.lin]);
    }
    Ok(InnovationProcess {
        delta,
        b_values,
        grad_b,
        bbar_values: Vec::new(),
    })
}

/// Innovation `B̄_{t_k} = M_{t_k} − Σ_{j<k} ρ_{t_j}Δ` with `ρ_{t_j} = Σ_i g(t_j, t_j−s_i)ΔM_i`.
///
/// Only `bbar_values` is filled.
pub fn reconstruct_innovation(
    noise: &MixedIncrements,
    family: &KernelFamily,
) -> Result<InnovationProcess> {
    let n = noise.values.len();
    check_grid(family, noise.delta, n.saturating_sub(1))?;
    check_hurst(family, noise.hurst)?;
    let dm = &noise.values;
    let delta = noise.delta;
    let mut bbar = Vec::with_capacity(n + 1);
    let (mut m, mut drift) = (0.0, 0.0);
    bbar.push(0.0);
    for k in 1..=n {
        let j = k - 1;
        drift += delta * backward_dot(family.weights(j), dm, j);
        m += dm[j];
        bbar.push(m - drift);
    }
    Ok(InnovationProcess {
        delta,
        b_values: Vec::new(),
        grad_b: Vec::new(),
        bbar_values: bbar,
    })
}

/// `ℓ_T(θ) = Σ_k b_{t_k}ΔX_k − ½ Σ_k b_{t_k}² Δ`.
pub fn girsanov_loglik(
    path: &SamplePath,
    theta: ThetaParams,
    family: &KernelFamily,
) -> Result<f64> {
    let proc = innovation_drift(path, theta, family)?;
    Ok(loglik_from_drift(&path.values, &proc.b_values, path.delta))
}

pub(crate) fn loglik_from_drift(x: &[f64], b: &[f64], delta: f64) -> f64 {
    x.windows(2)
        .zip(b)
        .map(|(w, &bk)| bk * (w[1] - w[0]) - 0.5 * bk * bk * delta)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::simulate_ou;

    fn theta() -> ThetaParams {
        ThetaParams::new(2.0, 0.8).unwrap()
    }

    #[test]
    fn zero_kernel_degenerates() {
        let (path, _) = simulate_ou(2.0, 0.8, 0.05, 40, 1, 3).unwrap();
        let fam = KernelFamily::zero(0.05, 40);
        let p = innovation_drift(&path, theta(), &fam).unwrap();
        for k in 0..=40 {
            assert_eq!(p.b_values[k], -2.0 * path.values[k]);
            assert_eq!(p.grad_b[k][1], -path.values[k]);
            assert_eq!(p.grad_b[k][0], 0.0);
        }
        assert_eq!(p.b_values.len(), path.values.len());
    }

    #[test]
    fn null_path_and_null_noise() {
        let fam = KernelFamily::build(0.8, 0.05, 30, true).unwrap();
        let path = SamplePath::new(0.05, vec![0.0; 31]).unwrap();
        let p = innovation_drift(&path, theta(), &fam).unwrap();
        assert!(p.b_values.iter().all(|&b| b == 0.0));
        assert!(p.grad_b.iter().all(|g| g[0] == 0.0 && g[1] == 0.0));
        assert_eq!(girsanov_loglik(&path, theta(), &fam).unwrap(), 0.0);
        let noise = MixedIncrements {
            delta: 0.05,
            values: vec![0.0; 30],
            hurst: 0.8,
            seed: 0,
        };
        let r = reconstruct_innovation(&noise, &fam).unwrap();
        assert_eq!(r.bbar_values.len(), 31);
        assert!(r.bbar_values.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn grid_mismatch_is_a_shape_error() {
        let (path, _) = simulate_ou(2.0, 0.8, 0.05, 40, 1, 3).unwrap();
        let short = KernelFamily::zero(0.05, 10);
        assert!(matches!(
            innovation_drift(&path, theta(), &short),
            Err(Error::Shape(_))
        ));
        let other = KernelFamily::zero(0.1, 40);
        assert!(matches!(
            innovation_drift(&path, theta(), &other),
            Err(Error::Shape(_))
        ));
        let fam = KernelFamily::build(0.85, 0.05, 40, false).unwrap();
        assert!(innovation_drift(&path, theta(), &fam).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (delta, n) = (0.05, 60);
        let (path, _) = simulate_ou(2.0, 0.8, delta, n, 4, 11).unwrap();
        let th = theta();
        let fam = KernelFamily::build(0.8, delta, n, true).unwrap();
        let p = innovation_drift(&path, th, &fam).unwrap();
        let eps = 1e-4;
        let at = |a: f64, h: f64| {
            let f = KernelFamily::build(h, delta, n, false).unwrap();
            innovation_drift(&path, ThetaParams::new(a, h).unwrap(), &f)
                .unwrap()
                .b_values
        };
        let (hp, hm) = (at(2.0, 0.8 + eps), at(2.0, 0.8 - eps));
        let (ap, am) = (at(2.0 + eps, 0.8), at(2.0 - eps, 0.8));
        for k in 5..n {
            let fd_h = (hp[k] - hm[k]) / (2.0 * eps);
            let fd_a = (ap[k] - am[k]) / (2.0 * eps);
            let [gh, ga] = p.grad_b[k];
            assert!(
                (fd_h - gh).abs() <= 1e-3 * gh.abs().max(1e-3),
                "k={k}: ∂H {gh} vs {fd_h}"
            );
            assert!(
                (fd_a - ga).abs() <= 1e-3 * ga.abs().max(1e-3),
                "k={k}: ∂α {ga} vs {fd_a}"
            );
        }
    }

    #[test]
    fn appending_a_flat_step_changes_loglik_by_the_drift_term() {
        let (delta, n) = (0.05, 50);
        let (path, _) = simulate_ou(2.0, 0.8, delta, n, 1, 8).unwrap();
        let fam = KernelFamily::build(0.8, delta, n + 1, false).unwrap();
        let base = girsanov_loglik(&path, theta(), &fam).unwrap();
        let mut vals = path.values.clone();
        vals.push(*vals.last().unwrap());
        let longer = SamplePath::new(delta, vals).unwrap();
        let extended = girsanov_loglik(&longer, theta(), &fam).unwrap();
        let b_last = innovation_drift(&longer, theta(), &fam).unwrap().b_values[n];
        let expected = base - 0.5 * b_last * b_last * delta;
        assert!((extended - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn innovation_increments_are_white_in_the_small() {
        // a cheap version of the ensemble check: per-step variance near Δ
        let (delta, n, reps) = (0.02, 200, 100);
        let fam = KernelFamily::build(0.8, delta, n, false).unwrap();
        let mut acc = 0.0;
        for r in 0..reps {
            let (_, noise) = simulate_ou(2.0, 0.8, delta, n, 1, 1000 + r).unwrap();
            let p = reconstruct_innovation(&noise, &fam).unwrap();
            acc += p.bbar_values[n] * p.bbar_values[n];
        }
        let ratio = acc / reps as f64 / (n as f64 * delta);
        assert!((0.7..1.3).contains(&ratio), "{ratio}");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn zero_kernel_gives_the_markov_likelihood(
            values in proptest::collection::vec(-3.0f64..3.0, 2..30),
            alpha in 0.1f64..5.0,
        ) {
            let delta = 0.05;
            let path = SamplePath::new(delta, values.clone()).unwrap();
            let fam = KernelFamily::zero(delta, values.len());
            let got = girsanov_loglik(&path, ThetaParams::new(alpha, 0.8).unwrap(), &fam).unwrap();
            let expect: f64 = values
                .windows(2)
                .map(|w| -alpha * w[0] * (w[1] - w[0]) - 0.5 * alpha * alpha * w[0] * w[0] * delta)
                .sum();
            proptest::prop_assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }
}
