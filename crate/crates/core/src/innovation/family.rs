//! Kernels `g(t_k, ·)` for every horizon `t_k = kΔ` of a sampling grid.
//!
//! On the grid `u_i = iΔ` the unknowns are `y_i = g(t_k, u_i)`, `i = 1..k`. The
//! function is linear between nodes and follows `y₁(u/Δ)^{2H−2}` on the first cell,
//! which carries the singularity at the origin. Collocating at the nodes gives
//! `A_k = T_k + p e₁ᵀ − c_k e_kᵀ`. Here `T_k` is the leading block of one symmetric
//! Toeplitz matrix, `p` swaps in the singular first-cell shape, and `c_k` trims the
//! half hat that would stick out past `t_k`. The Levinson recursion gives `T_k⁻¹`
//! applied to nested right-hand sides, and a 2×2 Woodbury step adds the two border
//! columns. All horizons together cost `O(n²)`, or `O(n³)` with H-derivatives.

use super::toeplitz::Levinson;
use crate::error::{domain, Result};
use crate::kernels::FractionalKernel;
use crate::quad::{gk21, tanh_sinh};
use crate::special::{beta, digamma};

/// Unit-step moments of `K` at fixed H, each as `(value, ∂_H value)`.
struct UnitMoments {
    kern: FractionalKernel,
    h: f64,
    a: f64,
}

impl UnitMoments {
    fn p0(&self, y: f64) -> (f64, f64) {
        if y == 0.0 {
            return (0.0, 0.0);
        }
        let p = y.powf(2.0 * self.h - 1.0);
        (self.h * p, p * (1.0 + 2.0 * self.h * y.ln()))
    }

    fn p2(&self, y: f64) -> (f64, f64) {
        if y == 0.0 {
            return (0.0, 0.0);
        }
        let p = y.powf(2.0 * self.h);
        (0.5 * p, p * y.ln())
    }

    fn smooth(&self, d: f64, weight: impl Fn(f64) -> f64) -> (f64, f64) {
        let k = &self.kern;
        (
            gk21(&|x: f64| k.k_unchecked(d + x) * weight(x), 0.0, 1.0).0,
            gk21(&|x: f64| k.dk_unchecked(d + x) * weight(x), 0.0, 1.0).0,
        )
    }

    /// `∫₀¹ K(d+x)(1−x) dx`.
    fn right_half(&self, d: usize) -> (f64, f64) {
        if d >= 2 {
            return self.smooth(d as f64, |x| 1.0 - x);
        }
        let d = d as f64;
        let (p0, dp0) = self.p0(d);
        let (u, du) = self.p2(d + 1.0);
        let (l, dl) = self.p2(d);
        (u - l - p0, du - dl - dp0)
    }

    /// `∫₀¹ K(d+x) x dx`.
    fn left_half(&self, d: usize) -> (f64, f64) {
        if d >= 2 {
            return self.smooth(d as f64, |x| x);
        }
        let d = d as f64;
        let (p0, dp0) = self.p0(d + 1.0);
        let (u, du) = self.p2(d + 1.0);
        let (l, dl) = self.p2(d);
        (p0 - u + l, dp0 - du + dl)
    }

    /// Full hat at distance `d` nodes.
    fn hat(&self, d: usize) -> (f64, f64) {
        let r = self.right_half(d);
        let l = if d == 0 { r } else { self.left_half(d - 1) };
        (r.0 + l.0, r.1 + l.1)
    }

    /// `∫₀¹ K(i−x) x^{2H−2} dx` for i ≥ 1.
    fn singular_cell(&self, i: usize) -> (f64, f64) {
        let a = self.a;
        let c = self.kern.c_h();
        let dc = 4.0 * self.h - 1.0;
        let (j, dj) = if i == 1 {
            let b = beta(a + 1.0, a + 1.0);
            (b, b * 4.0 * (digamma(a + 1.0) - digamma(2.0 * a + 2.0)))
        } else {
            let fi = i as f64;
            let f = |x: f64| (fi - x).powf(a) * x.powf(a);
            (
                tanh_sinh(f, 0.0, 1.0, 1e-14).value,
                tanh_sinh(
                    |x: f64| 2.0 * f(x) * ((fi - x).ln() + x.ln()),
                    0.0,
                    1.0,
                    1e-14,
                )
                .value,
            )
        };
        (c * j, dc * j + c * dj)
    }
}

/// Nodal values `g(t_k, iΔ)` and optional H-derivatives, handed out one horizon at a time.
pub(crate) fn for_each_horizon<F>(
    hurst: f64,
    delta: f64,
    n: usize,
    derivative: bool,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &[f64], Option<&[f64]>),
{
    if !(hurst > 0.5 && hurst < 1.0) {
        return Err(domain("hurst", format!("{hurst} must lie in (1/2, 1)")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain("delta", format!("{delta} must be positive")));
    }
    if n == 0 {
        return Ok(());
    }
    let kern = FractionalKernel::new(hurst)?;
    let mom = UnitMoments {
        kern,
        h: hurst,
        a: 2.0 * hurst - 2.0,
    };
    let scale = delta.powf(2.0 * hurst - 1.0);
    let dscale = 2.0 * delta.ln() * scale;
    let scaled = |(v, dv): (f64, f64)| (scale * v, dscale * v + scale * dv);

    let mut row = Vec::with_capacity(n);
    let mut drow = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    let mut dp = Vec::with_capacity(n);
    let mut edge = Vec::with_capacity(n);
    let mut dedge = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let mut drhs = Vec::with_capacity(n);
    for i in 0..n {
        let (w, dw) = scaled(mom.hat(i));
        row.push(if i == 0 { 1.0 + w } else { w });
        drow.push(dw);
        let (s, ds) = mom.singular_cell(i + 1);
        let (r, dr) = mom.right_half(i);
        let (pv, dpv) = scaled((s - r, ds - dr));
        p.push(pv);
        dp.push(dpv);
        let (e, de) = scaled((r, dr));
        edge.push(e);
        dedge.push(de);
        let u = (i + 1) as f64 * delta;
        rhs.push(kern.k_unchecked(u));
        drhs.push(kern.dk_unchecked(u));
    }

    let mut lev = Levinson::new(&row, derivative);
    let mut x_b = lev.start(rhs[0]);
    let mut x_p = lev.start(p[0]);
    let mut x_e = lev.start(edge[0]);
    let mut y = Vec::with_capacity(n);
    let mut dy = Vec::with_capacity(n);
    for k in 1..=n {
        border_solve(&x_b, &x_p, &x_e, &mut y);
        let dy_ref = if derivative {
            // A_k ∂y = ∂b − (∂A_k) y
            let mut q: Vec<f64> = (0..k)
                .map(|i| {
                    let conv: f64 = (0..k).map(|j| drow[i.abs_diff(j)] * y[j]).sum();
                    drhs[i] - conv - dp[i] * y[0] + dedge[k - 1 - i] * y[k - 1]
                })
                .collect();
            q = lev.solve(&q);
            border_solve(&q, &x_p, &x_e, &mut dy);
            Some(dy.as_slice())
        } else {
            None
        };
        visit(k, &y, dy_ref);
        if k < n {
            lev.extend(&mut x_b, rhs[k]);
            lev.extend(&mut x_p, p[k]);
            lev.extend(&mut x_e, edge[k]);
            if k + 1 < n {
                lev.advance();
            }
        }
    }
    Ok(())
}

/// Adds the two border columns to a Toeplitz solution `x = T_k⁻¹b`.
fn border_solve(x: &[f64], tp: &[f64], te: &[f64], out: &mut Vec<f64>) {
    let k = x.len();
    out.clear();
    if k == 1 {
        // both borders act on the single column
        out.push(x[0] / (1.0 + tp[0] - te[0]));
        return;
    }
    // Z = [T⁻¹p, −J T⁻¹e]
    let c00 = 1.0 + tp[0];
    let c01 = -te[k - 1];
    let c10 = tp[k - 1];
    let c11 = 1.0 - te[0];
    let det = c00 * c11 - c01 * c10;
    let xi0 = (c11 * x[0] - c01 * x[k - 1]) / det;
    let xi1 = (c00 * x[k - 1] - c10 * x[0]) / det;
    out.extend((0..k).map(|i| x[i] - xi0 * tp[i] + xi1 * te[k - 1 - i]));
}

/// Cell-averaged kernel weights for every horizon of a grid.
///
/// `weights(k)[m−1]` is the mean of `g(t_k, u)` over `u ∈ [(m−1)Δ, mΔ]`, the weight of the
/// increment that ends `m−1` steps before `t_k`. On the first cell the mean of the
/// singular shape is `y₁/(2H−1)`.
#[derive(Debug, Clone)]
pub struct KernelFamily {
    hurst: f64,
    delta: f64,
    weights: Vec<Vec<f64>>,
    dweights: Option<Vec<Vec<f64>>>,
}

pub(crate) fn cell_weights(hurst: f64, y: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.push(y[0] / (2.0 * hurst - 1.0));
    out.extend(y.windows(2).map(|w| 0.5 * (w[0] + w[1])));
}

fn cell_dweights(hurst: f64, y: &[f64], dy: &[f64]) -> Vec<f64> {
    let e = 2.0 * hurst - 1.0;
    let mut out = Vec::with_capacity(y.len());
    out.push(dy[0] / e - 2.0 * y[0] / (e * e));
    out.extend(dy.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    out
}

impl KernelFamily {
    /// Solves every horizon `t_k = kΔ`, `k = 1..=n`.
    pub fn build(hurst: f64, delta: f64, n: usize, derivative: bool) -> Result<Self> {
        let mut weights = Vec::with_capacity(n);
        let mut dweights = derivative.then(|| Vec::with_capacity(n));
        let mut buf = Vec::new();
        for_each_horizon(hurst, delta, n, derivative, |_, y, dy| {
            cell_weights(hurst, y, &mut buf);
            weights.push(buf.clone());
            if let (Some(dw), Some(dy)) = (dweights.as_mut(), dy) {
                dw.push(cell_dweights(hurst, y, dy));
            }
        })?;
        Ok(Self {
            hurst,
            delta,
            weights,
            dweights,
        })
    }

    /// Test hook: `g ≡ 0` for every horizon, with zero derivative.
    pub fn zero(delta: f64, n: usize) -> Self {
        let weights: Vec<Vec<f64>> = (1..=n).map(|k| vec![0.0; k]).collect();
        Self {
            hurst: f64::NAN,
            delta,
            dweights: Some(weights.clone()),
            weights,
        }
    }

    /// NaN for the zero hook.
    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of horizons.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weights of horizon `k ≥ 1`; horizon 0 has none.
    pub fn weights(&self, k: usize) -> &[f64] {
        if k == 0 {
            &[]
        } else {
            &self.weights[k - 1]
        }
    }

    pub fn dweights(&self, k: usize) -> Option<&[f64]> {
        let d = self.dweights.as_ref()?;
        Some(if k == 0 { &[] } else { d[k - 1].as_slice() })
    }

    pub fn has_derivative(&self) -> bool {
        self.dweights.is_some()
    }
}
