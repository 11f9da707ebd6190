//! Covariance and spectral kernels of fractional noise.
//!
//! `K_H(τ) = H(2H−1)|τ|^{2H−2}` is the covariance density of fBm increments and
//! `K̂_H(λ) = a_H|λ|^{1−2H}` its Fourier transform, with `a_H = Γ(2H+1) sin(πH)`.

use crate::error::{domain, Error, Result};
use crate::special::{digamma, gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Model parameters θ = (H, α). Construction enforces α > 0 and H ∈ (3/4, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    pub alpha: f64,
    pub hurst: f64,
}

impl ThetaParams {
    pub fn new(alpha: f64, hurst: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain("alpha", format!("{alpha} must be positive")));
        }
        if !(hurst > 0.75 && hurst < 1.0) {
            return Err(domain("hurst", format!("{hurst} must lie in (3/4, 1)")));
        }
        Ok(Self { alpha, hurst })
    }
}

/// Kernel evaluator at fixed H with the H-dependent constants cached.
#[derive(Debug, Clone, Copy)]
pub struct FractionalKernel {
    hurst: f64,
    a_h: f64,
    // ∂_H log a_H = 2ψ(2H+1) + π cot(πH)
    dlog_a_h: f64,
    // H(2H−1) and ∂_H log of it
    c_h: f64,
    dlog_c_h: f64,
}

impl FractionalKernel {
    /// Accepts H ∈ (1/2, 1); estimation code narrows this through [`ThetaParams`].
    pub fn new(hurst: f64) -> Result<Self> {
        if !(hurst > 0.5 && hurst < 1.0) {
            return Err(domain("hurst", format!("{hurst} must lie in (1/2, 1)")));
        }
        Ok(Self {
            hurst,
            a_h: spectral_constant_ah(hurst),
            dlog_a_h: 2.0 * digamma(2.0 * hurst + 1.0) + PI / (PI * hurst).tan(),
            c_h: hurst * (2.0 * hurst - 1.0),
            dlog_c_h: (4.0 * hurst - 1.0) / (hurst * (2.0 * hurst - 1.0)),
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn a_h(&self) -> f64 {
        self.a_h
    }

    /// `∂_H log a_H`.
    pub fn dlog_a_h(&self) -> f64 {
        self.dlog_a_h
    }

    /// `H(2H−1)`.
    pub fn c_h(&self) -> f64 {
        self.c_h
    }

    pub fn k(&self, tau: f64) -> Result<f64> {
        if tau == 0.0 {
            return Err(Error::SingularArgument {
                name: "kernel_K",
                value: tau,
            });
        }
        Ok(self.k_unchecked(tau))
    }

    #[inline]
    pub(crate) fn k_unchecked(&self, tau: f64) -> f64 {
        self.c_h * tau.abs().powf(2.0 * self.hurst - 2.0)
    }

    /// `∂_H K_H(τ)`.
    #[inline]
    pub(crate) fn dk_unchecked(&self, tau: f64) -> f64 {
        self.k_unchecked(tau) * (self.dlog_c_h + 2.0 * tau.abs().ln())
    }

    pub fn hat_k(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Err(Error::SingularArgument {
                name: "kernel_hat_K",
                value: lambda,
            });
        }
        Ok(self.a_h * lambda.abs().powf(1.0 - 2.0 * self.hurst))
    }

    pub fn dh_log_one_plus_hat_k(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Err(Error::SingularArgument {
                name: "dH_log_one_plus_hatK",
                value: lambda,
            });
        }
        Ok(self.dh_log_unchecked(lambda))
    }

    #[inline]
    pub(crate) fn dh_log_unchecked(&self, lambda: f64) -> f64 {
        let l = lambda.abs();
        let hk = self.a_h * l.powf(1.0 - 2.0 * self.hurst);
        (self.dlog_a_h - 2.0 * l.ln()) * hk / (1.0 + hk)
    }
}

/// `Γ(2H+1)·sin(πH)`, valid for H ∈ (0, 1).
pub fn spectral_constant_ah(hurst: f64) -> f64 {
    gamma(2.0 * hurst + 1.0) * (PI * hurst).sin()
}

pub fn kernel_k(tau: f64, hurst: f64) -> Result<f64> {
    FractionalKernel::new(hurst)?.k(tau)
}

pub fn kernel_hat_k(lambda: f64, hurst: f64) -> Result<f64> {
    FractionalKernel::new(hurst)?.hat_k(lambda)
}

pub fn dh_log_one_plus_hat_k(lambda: f64, hurst: f64) -> Result<f64> {
    FractionalKernel::new(hurst)?.dh_log_one_plus_hat_k(lambda)
}

/// Autocovariance of fractional Gaussian noise sampled at step Δ.
pub fn fgn_autocov(k: usize, hurst: f64, delta: f64) -> f64 {
    let two_h = 2.0 * hurst;
    let k = k as f64;
    let core = 0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h));
    delta.powf(two_h) * core
}

/// Autocovariance of increments of `B^H + W` at step Δ.
pub fn mixed_increment_autocov(k: usize, hurst: f64, delta: f64) -> f64 {
    fgn_autocov(k, hurst, delta) + if k == 0 { delta } else { 0.0 }
}
