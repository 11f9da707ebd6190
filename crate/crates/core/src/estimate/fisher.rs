//! Fisher information of θ = (H, α) and the LAN scaling φ(T).
//!
//! With `D(λ) = ∂_H log(1+K̂_H(λ))`,
//! `i11 = (1/4π)∫_ℝ D²`, `i12 = −(α/2π)∫_ℝ D/(α²+λ²)`, `i22 = 1/(2α)`.
//! The integrals run in `u = ln λ` between `1e−10` and `1e10`; outside that
//! window the integrands are replaced by their convergent power-log expansions,
//! integrated in closed form.

use crate::error::{Error, Result};
use crate::kernels::{FractionalKernel, ThetaParams};
use crate::quad::integrate_breaks;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const LN_LO: f64 = -23.025_850_929_940_457; // ln 1e−10
const LN_HI: f64 = 23.025_850_929_940_457;

/// The 2×2 information matrix, indexed (H, α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherMatrix {
    pub i11: f64,
    pub i12: f64,
    pub i22: f64,
    pub theta: ThetaParams,
    pub quad_tol: f64,
}

impl FisherMatrix {
    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.i11, self.i12], [self.i12, self.i22]]
    }

    pub fn determinant(&self) -> f64 {
        self.i11 * self.i22 - self.i12 * self.i12
    }

    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        inverse_2x2(self.as_array())
    }
}

pub(crate) fn inverse_2x2(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(det > 0.0 && m[0][0] > 0.0) {
        return Err(Error::DegenerateInformation);
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// `∫_L^∞ λ^{−s} ln^m λ dλ` for s > 1, m ≤ 2.
fn upper_power_log(s: f64, m: usize, ln_l: f64) -> f64 {
    let sig = s - 1.0;
    let lead = (-sig * ln_l).exp();
    let mut acc = 0.0;
    let mut fall = 1.0; // m!/(m−i)!
    for i in 0..=m {
        acc += fall * ln_l.powi((m - i) as i32) / sig.powi(i as i32 + 1);
        fall *= (m - i) as f64;
    }
    lead * acc
}

/// `∫_0^ε λ^{s} ln^m λ dλ` for s > −1, m ≤ 2.
fn lower_power_log(s: f64, m: usize, ln_e: f64) -> f64 {
    let sig = s + 1.0;
    let lead = (sig * ln_e).exp();
    let mut acc = 0.0;
    let mut fall = 1.0;
    let mut sign = 1.0;
    for i in 0..=m {
        acc += sign * fall * ln_e.powi((m - i) as i32) / sig.powi(i as i32 + 1);
        fall *= (m - i) as f64;
        sign = -sign;
    }
    lead * acc
}

/// `∫ λ^{s}(c − 2 ln λ)² dλ` over the lower (`upper = false`, s > −1) or upper tail (exponent −s).
fn quad_poly(c: f64, s: f64, ln_edge: f64, upper: bool) -> f64 {
    let f = |m| {
        if upper {
            upper_power_log(s, m, ln_edge)
        } else {
            lower_power_log(s, m, ln_edge)
        }
    };
    c * c * f(0) - 4.0 * c * f(1) + 4.0 * f(2)
}

fn lin_poly(c: f64, s: f64, ln_edge: f64, upper: bool) -> f64 {
    let f = |m| {
        if upper {
            upper_power_log(s, m, ln_edge)
        } else {
            lower_power_log(s, m, ln_edge)
        }
    };
    c * f(0) - 2.0 * f(1)
}

/// Tails of `∫_0^∞ D²` outside `[e^{ln_lo}, e^{ln_hi}]`.
fn d2_tails(k: &FractionalKernel, ln_lo: f64, ln_hi: f64) -> f64 {
    let (a, c) = (k.a_h(), k.dlog_a_h());
    let beta = 2.0 * k.hurst() - 1.0;
    let mut total = 0.0;
    // λ → 0: D = (c − 2ℓ)/(1 + r), r = λ^β/a; (1+r)^{−2} = Σ (−1)^j (j+1) r^j
    // λ → ∞: D = (c − 2ℓ) K̂/(1 + K̂), K̂ = aλ^{−β}; K̂²(1+K̂)^{−2} = Σ (−1)^j (j+1) K̂^{j+2}
    for j in 0..4 {
        let w = if j % 2 == 0 { 1.0 } else { -1.0 } * (j + 1) as f64;
        total += w * a.powi(-j) * quad_poly(c, j as f64 * beta, ln_lo, false);
        total += w * a.powi(j + 2) * quad_poly(c, (j + 2) as f64 * beta, ln_hi, true);
    }
    total
}

/// Tails of `∫_0^∞ D/(α²+λ²)`.
fn d_weighted_tails(k: &FractionalKernel, alpha: f64, ln_lo: f64, ln_hi: f64) -> f64 {
    let (a, c) = (k.a_h(), k.dlog_a_h());
    let beta = 2.0 * k.hurst() - 1.0;
    let a2 = alpha * alpha;
    let mut total = 0.0;
    // λ → 0: (c−2ℓ)(1 − r + r²)(1 − λ²/α²)/α²
    for j in 0..3 {
        let w = if j % 2 == 0 { 1.0 } else { -1.0 } / a.powi(j);
        total += w * lin_poly(c, j as f64 * beta, ln_lo, false) / a2;
        total -= w * lin_poly(c, j as f64 * beta + 2.0, ln_lo, false) / (a2 * a2);
    }
    // λ → ∞: (c−2ℓ)(K̂ − K̂²) λ^{−2}(1 − α²/λ²)
    for j in 0..2 {
        let w = if j == 0 { 1.0 } else { -1.0 } * a.powi(j + 1);
        let s = (j + 1) as f64 * beta + 2.0;
        total += w * (lin_poly(c, s, ln_hi, true) - a2 * lin_poly(c, s + 2.0, ln_hi, true));
    }
    total
}

fn unit_breaks(alpha: f64) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=46)
        .map(|i| LN_LO + (LN_HI - LN_LO) * i as f64 / 46.0)
        .collect();
    let la = alpha.ln();
    if la > LN_LO && la < LN_HI {
        b.push(la);
        b.sort_by(f64::total_cmp);
    }
    b
}

/// Fisher information at θ with relative quadrature tolerance `tol ∈ (0, 1e−4]`.
pub fn fisher_information(theta: ThetaParams, tol: f64) -> Result<FisherMatrix> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(crate::error::domain(
            "tol",
            format!("{tol} must lie in (0, 1e-4]"),
        ));
    }
    let theta = ThetaParams::new(theta.alpha, theta.hurst)?;
    let k = FractionalKernel::new(theta.hurst)?;
    let alpha = theta.alpha;
    let breaks = unit_breaks(alpha);
    let target = 0.1 * tol;

    let q11 = integrate_breaks(
        |u| {
            let l = u.exp();
            let d = k.dh_log_unchecked(l);
            d * d * l
        },
        &breaks,
        0.0,
        target,
        20_000,
    );
    let int11 = q11.value + d2_tails(&k, LN_LO, LN_HI);
    let rel11 = q11.abs_err / int11.abs();
    if !(rel11 <= tol) {
        return Err(Error::Accuracy {
            what: "i11 quadrature",
            estimate: int11 / (2.0 * PI),
            bound: rel11,
        });
    }

    let q12 = integrate_breaks(
        |u| {
            let l = u.exp();
            k.dh_log_unchecked(l) * l / (alpha * alpha + l * l)
        },
        &breaks,
        0.0,
        target,
        20_000,
    );
    let int12 = q12.value + d_weighted_tails(&k, alpha, LN_LO, LN_HI);
    // absolute floor: i12 can cross zero, so judge its error against the i11/i22 scale
    let scale12 = int12.abs().max((int11 / alpha).sqrt() * 1e-3);
    let rel12 = q12.abs_err / scale12;
    if !(rel12 <= tol) {
        return Err(Error::Accuracy {
            what: "i12 quadrature",
            estimate: -alpha / PI * int12,
            bound: rel12,
        });
    }

    Ok(FisherMatrix {
        i11: int11 / (2.0 * PI),
        i12: -alpha / PI * int12,
        i22: 0.5 / alpha,
        theta,
        quad_tol: rel11.max(rel12),
    })
}

/// `i12` through the complex form `−(1/2π) Re ∫_ℝ D(λ)/(α − iλ) dλ`, integrating each
/// half-line separately. Returns the value and the imaginary part, which must vanish.
pub fn i12_complex_form(theta: ThetaParams, tol: f64) -> Result<(f64, f64)> {
    let k = FractionalKernel::new(theta.hurst)?;
    let alpha = theta.alpha;
    let breaks = unit_breaks(alpha);
    let mut re = 0.0;
    let mut im = 0.0;
    for sign in [-1.0, 1.0] {
        // λ = sign·e^u; 1/(α − iλ) = (α + iλ)/(α² + λ²)
        let part = |want_im: bool| {
            integrate_breaks(
                |u| {
                    let l = sign * u.exp();
                    let w = k.dh_log_unchecked(l) * u.exp() / (alpha * alpha + l * l);
                    if want_im {
                        w * l
                    } else {
                        w * alpha
                    }
                },
                &breaks,
                0.0,
                0.1 * tol,
                20_000,
            )
        };
        re += part(false).value + alpha * d_weighted_tails(&k, alpha, LN_LO, LN_HI);
        im += part(true).value;
    }
    Ok((-re / (2.0 * PI), im / (2.0 * PI)))
}

/// Brute-force `(i11, i12)`: trapezoid rule with `nodes` points uniform in `ln λ` on
/// `[lo, hi]`, plus the closed-form tails outside that window.
pub fn fisher_trapezoid(theta: ThetaParams, lo: f64, hi: f64, nodes: usize) -> Result<(f64, f64)> {
    let theta = ThetaParams::new(theta.alpha, theta.hurst)?;
    if !(lo > 0.0 && hi > lo) || nodes < 2 {
        return Err(crate::error::domain(
            "window",
            format!("[{lo}, {hi}] with {nodes} nodes"),
        ));
    }
    let k = FractionalKernel::new(theta.hurst)?;
    let alpha = theta.alpha;
    let (ulo, uhi) = (lo.ln(), hi.ln());
    let h = (uhi - ulo) / (nodes - 1) as f64;
    let (mut s11, mut s12) = (0.0, 0.0);
    for i in 0..nodes {
        let l = (ulo + i as f64 * h).exp();
        let d = k.dh_log_unchecked(l);
        let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
        s11 += w * d * d * l;
        s12 += w * d * l / (alpha * alpha + l * l);
    }
    let int11 = h * s11 + d2_tails(&k, ulo, uhi);
    let int12 = h * s12 + d_weighted_tails(&k, alpha, ulo, uhi);
    Ok((int11 / (2.0 * PI), -alpha / PI * int12))
}

/// `φ(T) = T^{−1/2} I^{−1/2}` with the symmetric positive definite square root.
pub fn local_scaling(horizon: f64, fisher: &FisherMatrix) -> Result<[[f64; 2]; 2]> {
    if !(horizon > 0.0) {
        return Err(crate::error::domain(
            "horizon",
            format!("{horizon} must be positive"),
        ));
    }
    let m = fisher.as_array();
    let det = fisher.determinant();
    if !(det > 0.0 && m[0][0] > 0.0) {
        return Err(Error::DegenerateInformation);
    }
    // √M = (M + √det·I)/√(tr M + 2√det) for 2×2 SPD M
    let sd = det.sqrt();
    let t = (m[0][0] + m[1][1] + 2.0 * sd).sqrt();
    let root = [
        [(m[0][0] + sd) / t, m[0][1] / t],
        [m[1][0] / t, (m[1][1] + sd) / t],
    ];
    let inv = inverse_2x2(root)?;
    let s = horizon.powf(-0.5);
    Ok([
        [s * inv[0][0], s * inv[0][1]],
        [s * inv[1][0], s * inv[1][1]],
    ])
}
