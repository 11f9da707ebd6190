//! Exact Gaussian simulation of mixed fractional noise and the OU path built on it.
//!
//! Increments of `B^H + W` are drawn by circulant embedding of the
//! autocovariance sequence (Davies–Harte), then pushed through the
//! exponential propagator `X_{k+1} = e^{−αδ} X_k + ΔM_{k+1}`.

use crate::error::{domain, Error, Result};
use crate::kernels::mixed_increment_autocov;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Increments `ΔM_k = M_{kΔ} − M_{(k−1)Δ}`, k = 1..n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedIncrements {
    pub delta: f64,
    pub values: Vec<f64>,
    pub hurst: f64,
    pub seed: u64,
}

impl MixedIncrements {
    /// Cumulative sums `M_0 = 0, M_1, …, M_n`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for v in &self.values {
            acc += v;
            out.push(acc);
        }
        out
    }
}

/// Uniformly sampled trajectory `X_0, …, X_n` at `t = kΔ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub delta: f64,
    pub x0: f64,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn new(delta: f64, values: Vec<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain("delta", format!("{delta} must be positive")));
        }
        if values.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateData("non-finite path value".into()));
        }
        Ok(Self {
            delta,
            x0: values[0],
            values,
        })
    }

    /// Number of steps n (the path has n + 1 points).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Horizon `T = nΔ`.
    pub fn horizon(&self) -> f64 {
        self.steps() as f64 * self.delta
    }

    /// Drops the first `k` points, re-basing time at the new first point.
    pub fn discard_burn_in(&self, k: usize) -> Result<Self> {
        if k >= self.values.len() {
            return Err(Error::Shape(format!(
                "burn-in {k} exceeds path length {}",
                self.values.len()
            )));
        }
        Self::new(self.delta, self.values[k..].to_vec())
    }

    /// Time stamps `kΔ`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len())
            .map(|k| k as f64 * self.delta)
            .collect()
    }
}

/// Eigenvalues of the size-2n circulant embedding, clamped as in the simulator.
///
/// Tiny negatives down to `−1e−10·max` are set to zero; anything below is an error.
pub fn circulant_eigenvalues(n: usize, hurst: f64, delta: f64) -> Result<Vec<f64>> {
    let big_n = 2 * n;
    let mut row: Vec<Complex64> = (0..big_n)
        .map(|j| {
            let lag = if j <= n { j } else { big_n - j };
            Complex64::new(mixed_increment_autocov(lag, hurst, delta), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(big_n).process(&mut row);
    let max = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
    let min = row.iter().map(|c| c.re).fold(f64::MAX, f64::min);
    if min < -1e-10 * max {
        return Err(Error::Embedding {
            min_eigenvalue: min,
        });
    }
    Ok(row.into_iter().map(|c| c.re.max(0.0)).collect())
}

/// Stationary Gaussian increments of `B^H + W` at step Δ with exact covariance.
pub fn simulate_mixed_increments(
    n: usize,
    hurst: f64,
    delta: f64,
    seed: u64,
) -> Result<MixedIncrements> {
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain("delta", format!("{delta} must be positive")));
    }
    if !(hurst > 0.5 && hurst < 1.0) {
        return Err(domain("hurst", format!("{hurst} must lie in (1/2, 1)")));
    }
    let eig = circulant_eigenvalues(n, hurst, delta)?;
    let big_n = eig.len();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = 1.0 / big_n as f64;
    let mut buf: Vec<Complex64> = eig
        .iter()
        .map(|&l| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(a, b) * (l * scale).sqrt()
        })
        .collect();
    FftPlanner::new().plan_fft_forward(big_n).process(&mut buf);
    Ok(MixedIncrements {
        delta,
        values: buf[..n].iter().map(|c| c.re).collect(),
        hurst,
        seed,
    })
}

/// Left-point discretization of `X_t = ∫_0^t e^{−α(t−u)} dM_u` with `X_0 = 0`.
///
/// `inc` is on the fine grid `δ = Δ/refine`; the result is subsampled to step Δ.
/// `alpha = 0` is accepted and reduces to a cumulative sum.
pub fn build_ou_path(inc: &MixedIncrements, alpha: f64, refine: usize) -> Result<SamplePath> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(domain("alpha", format!("{alpha} must be nonnegative")));
    }
    if refine == 0 || !inc.values.len().is_multiple_of(refine) {
        return Err(Error::Shape(format!(
            "refine {refine} does not divide {} increments",
            inc.values.len()
        )));
    }
    let phi = (-alpha * inc.delta).exp();
    let mut values = Vec::with_capacity(inc.values.len() / refine + 1);
    let mut x = 0.0;
    values.push(x);
    for chunk in inc.values.chunks(refine) {
        for dm in chunk {
            x = phi * x + dm;
        }
        values.push(x);
    }
    Ok(SamplePath {
        delta: inc.delta * refine as f64,
        x0: 0.0,
        values,
    })
}

/// Simulates `n` coarse steps of the OU path at θ, step Δ, refinement factor `refine`.
pub fn simulate_ou(
    alpha: f64,
    hurst: f64,
    delta: f64,
    n: usize,
    refine: usize,
    seed: u64,
) -> Result<(SamplePath, MixedIncrements)> {
    let refine = refine.max(1);
    let inc = simulate_mixed_increments(n * refine, hurst, delta / refine as f64, seed)?;
    let path = build_ou_path(&inc, alpha, refine)?;
    Ok((path, inc))
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `replication` under `master`.
///
/// Both mixing steps are bijections of u64, so distinct replications under one
/// master never collide, and distinct masters differ at replication 0.
pub fn derive_replication_seed(master: u64, replication: u64) -> u64 {
    let stream = mix64(replication.wrapping_add(0x9e37_79b9_7f4a_7c15));
    mix64(master.wrapping_mul(0xd1b5_4a32_d192_ed03) ^ stream)
}

/// Stationary variance of the continuous-time process, `1/(2α) + HΓ(2H)α^{−2H}`.
pub fn stationary_variance(alpha: f64, hurst: f64) -> f64 {
    0.5 / alpha + hurst * crate::special::gamma(2.0 * hurst) * alpha.powf(-2.0 * hurst)
}
