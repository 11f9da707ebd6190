//! Spectral density of the sampled process, periodogram and Whittle contrast.
//!
//! Sampling at step Δ folds the continuous density `(1/2π)(1+K̂(λ))/(α²+λ²)`
//! onto `(−π, π]`. The Wiener part folds in closed form to a sampled AR(1)
//! density; the fractional part is an aliasing sum over `k ∈ ℤ`, truncated at
//! `|k| ≤ K` with an exact series for the remainder.

use crate::error::{Error, Result};
use crate::kernels::{spectral_constant_ah, ThetaParams};
use crate::simulate::SamplePath;
use crate::special::hurwitz_zeta;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Truncation control for the aliasing sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub truncation_k: usize,
    pub tail_correction: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            truncation_k: 10,
            tail_correction: true,
        }
    }
}

impl SpectralConfig {
    pub fn new(truncation_k: usize, tail_correction: bool) -> Result<Self> {
        if truncation_k == 0 {
            return Err(crate::error::domain("truncation_K", "must be at least 1"));
        }
        Ok(Self {
            truncation_k,
            tail_correction,
        })
    }
}

/// `f_Δ` at fixed (θ, Δ, cfg), with all λ-independent work done once.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    k: usize,
    frac_scale: f64,
    exponent: f64,
    c2: f64,
    ar_scale: f64,
    ar_phi: f64,
    ar_phi2: f64,
    // remainder Σ_{|k|>K} as a polynomial in (λ/2π)²
    tail: Vec<f64>,
}

impl SpectralDensity {
    pub fn new(theta: ThetaParams, delta: f64, cfg: SpectralConfig) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(crate::error::domain(
                "delta",
                format!("{delta} must be positive"),
            ));
        }
        if cfg.truncation_k == 0 {
            return Err(crate::error::domain("truncation_K", "must be at least 1"));
        }
        let (alpha, h) = (theta.alpha, theta.hurst);
        let c = alpha * delta;
        let mut k = cfg.truncation_k;
        if cfg.tail_correction {
            // keep the remainder series in its fast-converging regime
            k = k.max((c / PI).ceil() as usize);
        }
        let frac_scale = spectral_constant_ah(h) * delta.powf(2.0 * h) / TWO_PI;
        let ar_phi = (-c).exp();
        let mut me = Self {
            k,
            frac_scale,
            exponent: 1.0 - 2.0 * h,
            c2: c * c,
            ar_scale: (1.0 - ar_phi * ar_phi) / (2.0 * alpha) / TWO_PI,
            ar_phi,
            ar_phi2: ar_phi * ar_phi,
            tail: Vec::new(),
        };
        if cfg.tail_correction {
            me.tail = remainder_coefficients(1.0 + 2.0 * h, c, k);
        }
        Ok(me)
    }

    /// Truncation actually used (may exceed the configured K when αΔ is large).
    pub fn effective_k(&self) -> usize {
        self.k
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        let l = reduce(lambda);
        if l == 0.0 {
            return Err(Error::SingularArgument {
                name: "f_delta",
                value: lambda,
            });
        }
        Ok(self.eval_reduced(l))
    }

    fn eval_reduced(&self, l: f64) -> f64 {
        let mut s = 0.0;
        for k in -(self.k as i64)..=(self.k as i64) {
            let u = l + TWO_PI * k as f64;
            s += u.abs().powf(self.exponent) / (self.c2 + u * u);
        }
        self.frac_scale * (s + self.remainder(l)) + self.ar_term(l.cos())
    }

    /// Fractional-part remainder `Σ_{|k|>K}` (without the outer scale).
    fn remainder(&self, l: f64) -> f64 {
        let y2 = (l / TWO_PI).powi(2);
        let mut acc = 0.0;
        for &a in self.tail.iter().rev() {
            acc = acc * y2 + a;
        }
        acc
    }

    fn ar_term(&self, cos_l: f64) -> f64 {
        self.ar_scale / (1.0 + self.ar_phi2 - 2.0 * cos_l * self.ar_phi)
    }
}

fn reduce(lambda: f64) -> f64 {
    let r = lambda - TWO_PI * (lambda / TWO_PI).round();
    if r <= -PI {
        r + TWO_PI
    } else {
        r
    }
}

/// Coefficients `A_j` with `Σ_{|k|>K} |λ+2πk|^{1−2H}/(c²+(λ+2πk)²) = Σ_j A_j y^{2j}`, `y = λ/2π`.
///
/// Expands `u^{1−2H}/(c²+u²) = Σ_m (−c²)^m u^{−p−2m}` and then
/// `Σ_{k>K} [(k+y)^{−q} + (k−y)^{−q}] = 2 Σ_j C(q+2j−1, 2j) y^{2j} ζ(q+2j, K+1)`.
fn remainder_coefficients(p: f64, c: f64, k: usize) -> Vec<f64> {
    let q0 = (k + 1) as f64;
    let x = c / (TWO_PI * q0);
    let mut coef = Vec::new();
    for j in 0..40 {
        let two_j = 2.0 * j as f64;
        let mut sum_m = 0.0;
        let mut sign_pow = 1.0;
        for m in 0..200 {
            let q = p + 2.0 * m as f64;
            // C(q+2j−1, 2j)
            let mut binom = 1.0;
            for i in 0..(2 * j) {
                binom *= (q + i as f64) / (i as f64 + 1.0);
            }
            let term =
                sign_pow * TWO_PI.powf(-q) * c.powi(2 * m) * binom * hurwitz_zeta(q + two_j, q0);
            sum_m += term;
            sign_pow = -sign_pow;
            if term.abs() <= 1e-18 * sum_m.abs() || (m > 0 && x.powi(2 * m) < 1e-18) {
                break;
            }
        }
        let a = 2.0 * sum_m;
        coef.push(a);
        // y ≤ 1/2, so the j-th term is at most A_j 4^{−j}
        if j > 0 && (a * 0.25f64.powi(j)).abs() < 1e-18 * coef[0].abs() {
            break;
        }
    }
    coef
}

/// `f_Δ(λ; θ)`, the spectral density of `(X_{kΔ})`.
pub fn f_delta(lambda: f64, theta: ThetaParams, delta: f64, cfg: SpectralConfig) -> Result<f64> {
    SpectralDensity::new(theta, delta, cfg)?.eval(lambda)
}

/// Upper bound on the discarded aliasing terms `|k| > K` for `λ ∈ (−π, π]`.
///
/// Uses `|λ + 2πk| ≥ 2π(|k| − ½)` and integral comparison.
pub fn f_delta_tail_bound(_lambda: f64, theta: ThetaParams, delta: f64, k: usize) -> f64 {
    let h = theta.hurst;
    let scale = spectral_constant_ah(h) * delta.powf(2.0 * h) / TWO_PI;
    let k = k.max(1) as f64;
    2.0 * scale * TWO_PI.powf(-1.0 - 2.0 * h) * (k - 0.5).powf(-2.0 * h) / (2.0 * h)
}

/// Periodogram ordinates at `λ_j = 2πj/n`, `j = 1..⌊n/2⌋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    pub n: usize,
    pub delta: f64,
    pub ordinates: Vec<f64>,
}

impl Periodogram {
    pub fn frequency(&self, j: usize) -> f64 {
        TWO_PI * j as f64 / self.n as f64
    }

    /// `(λ_j, I_j)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ordinates
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.frequency(i + 1), v))
    }
}

/// `(1/2πn)|Σ_k x_k e^{−iλk}|²` at every Fourier frequency `j = 0..n−1`.
pub fn full_periodogram(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (TWO_PI * n as f64);
    buf.iter().map(|c| c.norm_sqr() * norm).collect()
}

/// Periodogram of `X_Δ, …, X_{nΔ}`; zero frequency is dropped, the mean is not removed.
pub fn periodogram(path: &SamplePath) -> Result<Periodogram> {
    let x = &path.values[1..];
    if x.len() < 8 {
        return Err(Error::InsufficientData {
            needed: 8,
            got: x.len(),
        });
    }
    let full = full_periodogram(x);
    Ok(Periodogram {
        n: x.len(),
        delta: path.delta,
        ordinates: full[1..=x.len() / 2].to_vec(),
    })
}

/// `U_n(θ) = (1/n) Σ_j [log f_Δ(λ_j) + I_j/f_Δ(λ_j)]`.
pub fn whittle_contrast(pg: &Periodogram, theta: ThetaParams, cfg: SpectralConfig) -> Result<f64> {
    let f = SpectralDensity::new(theta, pg.delta, cfg)?;
    let mut s = 0.0;
    for (l, i) in pg.pairs() {
        let fv = f.eval(l)?;
        s += fv.ln() + i / fv;
    }
    Ok(s / pg.n as f64)
}

/// Whittle contrast with the frequency-dependent parts of `f_Δ` tabulated.
///
/// Gives the same value as [`whittle_contrast`] up to rounding, several times faster.
#[derive(Debug, Clone)]
pub struct WhittleObjective {
    n: usize,
    delta: f64,
    cfg: SpectralConfig,
    ordinates: Vec<f64>,
    lambdas: Vec<f64>,
    cos_l: Vec<f64>,
    // per frequency, per alias: (ln|u|, u²); empty when too large to keep
    table: Vec<(f64, f64)>,
    width: usize,
}

const TABLE_LIMIT: usize = 8_000_000;

impl WhittleObjective {
    pub fn new(pg: &Periodogram, cfg: SpectralConfig) -> Self {
        let lambdas: Vec<f64> = (1..=pg.ordinates.len()).map(|j| pg.frequency(j)).collect();
        let width = 2 * cfg.truncation_k + 1;
        let mut table = Vec::new();
        if width * lambdas.len() <= TABLE_LIMIT {
            table.reserve(width * lambdas.len());
            for &l in &lambdas {
                for k in -(cfg.truncation_k as i64)..=(cfg.truncation_k as i64) {
                    let u = l + TWO_PI * k as f64;
                    table.push((u.abs().ln(), u * u));
                }
            }
        }
        Self {
            n: pg.n,
            delta: pg.delta,
            cfg,
            ordinates: pg.ordinates.clone(),
            cos_l: lambdas.iter().map(|l| l.cos()).collect(),
            lambdas,
            table,
            width,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, theta: ThetaParams) -> Result<f64> {
        let f = SpectralDensity::new(theta, self.delta, self.cfg)?;
        if self.table.is_empty() || f.effective_k() != self.cfg.truncation_k {
            let mut s = 0.0;
            for (l, i) in self.lambdas.iter().zip(&self.ordinates) {
                let fv = f.eval_reduced(*l);
                s += fv.ln() + i / fv;
            }
            return Ok(s / self.n as f64);
        }
        let mut s = 0.0;
        for (j, row) in self.table.chunks_exact(self.width).enumerate() {
            let mut acc = 0.0;
            for &(ln_u, u2) in row {
                acc += (f.exponent * ln_u).exp() / (f.c2 + u2);
            }
            let l = self.lambdas[j];
            let fv = f.frac_scale * (acc + f.remainder(l)) + f.ar_term(self.cos_l[j]);
            s += fv.ln() + self.ordinates[j] / fv;
        }
        Ok(s / self.n as f64)
    }
}
