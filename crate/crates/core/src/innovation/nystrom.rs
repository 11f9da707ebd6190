//! Product-integration Nyström solver for the kernel equation
//! `g(s) + ∫₀ᵗ K(r−s) g(r) dr = K(s)`, `0 < s ≤ t`.
//!
//! The unknown is split as `g = K − v`. The remainder `v` solves the same operator
//! equation with the bounded right-hand side `F(s) = ∫₀ᵗ K(r−s) K(r) dr`, and is
//! represented piecewise linearly on a mesh graded geometrically toward both ends.
//! On the first cell the linear shape is replaced by `(s/x₁)^{4H−3}`, which is the
//! leading singular term of `v` at the origin. All weights against `|r−s|^{2H−2}`
//! are integrated exactly, and the H-derivative comes from differentiating the
//! discrete system, so it is the exact derivative of the discrete solution.

use crate::error::{domain, Error, Result};
use crate::kernels::FractionalKernel;
use crate::quad::{integrate, tanh_sinh};
use crate::special::{beta, digamma};
use nalgebra::{DMatrix, DVector};

const MAX_CONDITION: f64 = 1e12;
// Mesh layout: first node at LEFT_GAP·t, last gap RIGHT_GAP·t, cells no wider than
// CAP·t/2, and LEFT_SHARE of the graded cells on the left half where v is roughest.
const LEFT_GAP: f64 = 1e-10;
const RIGHT_GAP: f64 = 1e-6;
const CAP: f64 = 0.3;
const LEFT_SHARE: f64 = 0.75;

#[derive(Debug, Clone, Copy)]
struct FractionalWeight {
    kern: FractionalKernel,
    h: f64,
    a: f64,
    c: f64,
    dc: f64,
}

/// Kernel of the equation. `Constant` is a test hook with a closed-form solution.
#[derive(Debug, Clone, Copy)]
enum Kernel {
    Fractional(FractionalWeight),
    Constant(f64),
}

/// Each method returns `(value, ∂_H value)`.
impl Kernel {
    fn k(&self, y: f64) -> (f64, f64) {
        match self {
            Kernel::Fractional(w) => (w.kern.k_unchecked(y), w.kern.dk_unchecked(y)),
            Kernel::Constant(c) => (*c, 0.0),
        }
    }

    /// `∫₀^y K`.
    fn p0(&self, y: f64) -> (f64, f64) {
        match self {
            Kernel::Fractional(w) => {
                if y == 0.0 {
                    return (0.0, 0.0);
                }
                let l = y.abs();
                let p = y.signum() * l.powf(2.0 * w.h - 1.0);
                (w.h * p, p * (1.0 + 2.0 * w.h * l.ln()))
            }
            Kernel::Constant(c) => (c * y, 0.0),
        }
    }

    /// `∫₀^y K(z) z dz`.
    fn p1(&self, y: f64) -> (f64, f64) {
        match self {
            Kernel::Fractional(w) => {
                if y == 0.0 {
                    return (0.0, 0.0);
                }
                let l = y.abs();
                let q = l.powf(2.0 * w.h);
                (
                    0.5 * (2.0 * w.h - 1.0) * q,
                    q * (1.0 + (2.0 * w.h - 1.0) * l.ln()),
                )
            }
            Kernel::Constant(c) => (0.5 * c * y * y, 0.0),
        }
    }

    /// Shape of the first-cell basis function at `ξ = s/x₁`.
    fn shape(&self, xi: f64) -> (f64, f64) {
        match self {
            Kernel::Fractional(w) => {
                if xi <= 0.0 {
                    return (0.0, 0.0);
                }
                let p = xi.powf(2.0 * w.a + 1.0);
                (p, 4.0 * p * xi.ln())
            }
            Kernel::Constant(_) => (xi, 0.0),
        }
    }

    /// `∫₀^{x₁} K(r−s) ψ(r/x₁) dr`.
    fn first_cell(&self, s: f64, x1: f64) -> (f64, f64) {
        match self {
            Kernel::Fractional(w) => {
                let (j, dj) = w.cell_integral(s / x1);
                let scale = w.c * x1.powf(w.a + 1.0);
                let dscale = scale * (w.dc / w.c + 2.0 * x1.ln());
                (scale * j, dscale * j + scale * dj)
            }
            Kernel::Constant(c) => (0.5 * c * x1, 0.0),
        }
    }

    /// `F(s) = ∫₀ᵗ K(r−s) K(r) dr`.
    fn rhs(&self, s: f64, t: f64) -> (f64, f64) {
        match self {
            Kernel::Fractional(w) => w.rhs(s, t),
            Kernel::Constant(c) => (c * c * t, 0.0),
        }
    }

    fn shape_log_rate(&self) -> f64 {
        match self {
            Kernel::Fractional(_) => 4.0,
            Kernel::Constant(_) => 0.0,
        }
    }
}

impl FractionalWeight {
    fn new(hurst: f64) -> Result<Self> {
        let kern = FractionalKernel::new(hurst)?;
        Ok(Self {
            kern,
            h: hurst,
            a: 2.0 * hurst - 2.0,
            c: kern.c_h(),
            dc: 4.0 * hurst - 1.0,
        })
    }

    /// `J(σ) = ∫₀¹ |σ−w|^a w^β dw` with β = 2a+1, and its H-derivative.
    fn cell_integral(&self, sigma: f64) -> (f64, f64) {
        let a = self.a;
        let b = 2.0 * a + 1.0;
        if sigma == 0.0 {
            let p = 3.0 * a + 2.0;
            return (1.0 / p, -6.0 / (p * p));
        }
        if sigma == 1.0 {
            let bb = beta(b + 1.0, a + 1.0);
            let top = digamma(a + b + 2.0);
            return (
                bb,
                bb * (2.0 * (digamma(a + 1.0) - top) + 4.0 * (digamma(b + 1.0) - top)),
            );
        }
        // Each piece is written in a local variable y ≥ 0 that vanishes at the
        // singular point, so tanh–sinh nodes resolve it to full precision.
        let mut out = (0.0, 0.0);
        let mut add = |f: &dyn Fn(f64) -> (f64, f64, f64), len: f64| {
            out.0 += tanh_sinh(|y| f(y).0, 0.0, len, 1e-14).value;
            out.1 += tanh_sinh(|y| f(y).0 * (2.0 * f(y).1 + 4.0 * f(y).2), 0.0, len, 1e-14).value;
        };
        // each closure returns (integrand, ln|σ−w|, ln w)
        if sigma < 1.0 {
            add(
                &|w: f64| ((sigma - w).powf(a) * w.powf(b), (sigma - w).ln(), w.ln()),
                0.5 * sigma,
            );
            add(
                &|y: f64| (y.powf(a) * (sigma - y).powf(b), y.ln(), (sigma - y).ln()),
                0.5 * sigma,
            );
            add(
                &|y: f64| (y.powf(a) * (sigma + y).powf(b), y.ln(), (sigma + y).ln()),
                1.0 - sigma,
            );
        } else {
            let gap = sigma - 1.0;
            add(
                &|y: f64| {
                    (
                        (gap + y).powf(a) * (1.0 - y).powf(b),
                        (gap + y).ln(),
                        (1.0 - y).ln(),
                    )
                },
                1.0,
            );
        }
        out
    }

    fn rhs(&self, s: f64, t: f64) -> (f64, f64) {
        let (a, c, dc) = (self.a, self.c, self.dc);
        let b = 2.0 * a + 1.0;
        if s == 0.0 {
            let tb = t.powf(b);
            let v = tb / b;
            return (
                c * c * v,
                2.0 * c * dc * v + c * c * 4.0 * (tb * t.ln() / b - tb / (b * b)),
            );
        }
        let b0 = beta(a + 1.0, a + 1.0);
        let db0 = b0 * 4.0 * (digamma(a + 1.0) - digamma(2.0 * a + 2.0));
        let sb = s.powf(b);
        let (p, dp) = (sb * b0, sb * (4.0 * s.ln() * b0 + db0));
        // Q(s) = ∫₀^{t−s} u^a (u+s)^a du
        let len = t - s;
        let (mut q, mut dq) = (0.0, 0.0);
        if len > 0.0 {
            let m1 = s.min(len);
            let f = |u: f64| u.powf(a) * (u + s).powf(a);
            q += tanh_sinh(f, 0.0, m1, 1e-14).value;
            dq += tanh_sinh(
                |u: f64| 2.0 * f(u) * (u.ln() + (u + s).ln()),
                0.0,
                m1,
                1e-14,
            )
            .value;
            if len > m1 {
                let g = |y: f64| ((a + 1.0) * y).exp() * (y.exp() + s).powf(a);
                let (lo, hi) = (m1.ln(), len.ln());
                q += integrate(g, lo, hi, 1e-16, 1e-14).value;
                dq += integrate(
                    |y: f64| 2.0 * g(y) * (y + (y.exp() + s).ln()),
                    lo,
                    hi,
                    1e-16,
                    1e-14,
                )
                .value;
            }
        }
        (c * c * (p + q), 2.0 * c * dc * (p + q) + c * c * (dp + dq))
    }
}

/// Nodes `0 = x₀ < x₁ < … < x_m = t`, geometric toward both ends with a capped middle.
fn graded_mesh(t: f64, m: usize) -> Vec<f64> {
    let half = 0.5 * t;
    let cap = CAP * half;
    // nodes from lo to half with density 1/min(x, cap)
    let side = |lo: f64, n: usize| -> Vec<f64> {
        let knee = (cap / lo).ln();
        let total = knee + (half - cap) / cap;
        (0..=n)
            .map(|i| {
                let q = total * i as f64 / n as f64;
                if i == n {
                    half
                } else if q <= knee {
                    lo * q.exp()
                } else {
                    cap + (q - knee) * cap
                }
            })
            .collect()
    };
    let inner = m - 2;
    let n_left = ((inner as f64) * LEFT_SHARE).round() as usize;
    let left = side(LEFT_GAP * t, n_left);
    let right = side(RIGHT_GAP * t, inner - n_left);
    let mut x = Vec::with_capacity(m + 1);
    x.push(0.0);
    x.extend_from_slice(&left);
    x.extend(right.iter().rev().skip(1).map(|r| t - r));
    x.push(t);
    x
}

/// Discretized solution `g(t, ·)` and `∂_H g(t, ·)` at the nodes `s₁ < … < s_m = t`.
///
/// The node at the origin, where `g` is infinite, is not listed.
#[derive(Debug, Clone)]
pub struct NystromSolution {
    pub horizon_t: f64,
    /// NaN for the constant test kernel.
    pub hurst: f64,
    pub nodes: Vec<f64>,
    pub g_values: Vec<f64>,
    pub dh_values: Vec<f64>,
    /// Largest residual of the equation over all cell midpoints.
    pub residual_sup: f64,
    /// 1-norm condition number of the system matrix.
    pub condition: f64,
    mesh: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    kernel: Kernel,
}

impl NystromSolution {
    fn cell(&self, s: f64) -> Result<usize> {
        if !(s > 0.0 && s <= self.horizon_t) {
            return Err(domain(
                "s",
                format!("{s} must lie in (0, {}]", self.horizon_t),
            ));
        }
        Ok(self.mesh.partition_point(|&x| x < s).max(1) - 1)
    }

    fn remainder(&self, s: f64, values: &[f64]) -> Result<f64> {
        let c = self.cell(s)?;
        let (x0, x1) = (self.mesh[c], self.mesh[c + 1]);
        let w = if c == 0 {
            self.kernel.shape(s / x1).0
        } else {
            (s - x0) / (x1 - x0)
        };
        Ok(values[c] + (values[c + 1] - values[c]) * w)
    }

    /// `g(t, s)` for `s ∈ (0, t]`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        Ok(self.kernel.k(s).0 - self.remainder(s, &self.v)?)
    }

    /// `∂_H g(t, s)` for `s ∈ (0, t]`.
    pub fn eval_dh(&self, s: f64) -> Result<f64> {
        let mut dv = self.remainder(s, &self.dv)?;
        if self.cell(s)? == 0 {
            // the first-cell shape itself moves with H
            let xi = s / self.mesh[1];
            dv += (self.v[1] - self.v[0])
                * self.kernel.shape(xi).0
                * self.kernel.shape_log_rate()
                * xi.ln();
        }
        Ok(self.kernel.k(s).1 - dv)
    }
}

/// Solves for `g(t, ·)` with `m` cells and fails if the residual exceeds `tol`.
pub fn solve_g(t: f64, hurst: f64, m: usize, tol: f64) -> Result<NystromSolution> {
    if !(hurst > 0.75 && hurst < 1.0) {
        return Err(domain("hurst", format!("{hurst} must lie in (3/4, 1)")));
    }
    solve(
        Kernel::Fractional(FractionalWeight::new(hurst)?),
        hurst,
        t,
        m,
        tol,
    )
}

/// Same solver with `K ≡ c`; the exact solution is `g ≡ c/(1+ct)`.
pub fn solve_g_constant(c: f64, t: f64, m: usize, tol: f64) -> Result<NystromSolution> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(domain("c", "must be finite and nonnegative"));
    }
    solve(Kernel::Constant(c), f64::NAN, t, m, tol)
}

fn weights_row(kernel: &Kernel, s: f64, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    let mut prev0 = kernel.p0(x[0] - s);
    let mut prev1 = kernel.p1(x[0] - s);
    for c in 0..n - 1 {
        let (u, v) = (x[c], x[c + 1]);
        let q0 = kernel.p0(v - s);
        let q1 = kernel.p1(v - s);
        let m0 = (q0.0 - prev0.0, q0.1 - prev0.1);
        let m1 = if c == 0 {
            kernel.first_cell(s, v)
        } else {
            let h = v - u;
            (
                (q1.0 - prev1.0 + (s - u) * m0.0) / h,
                (q1.1 - prev1.1 + (s - u) * m0.1) / h,
            )
        };
        w[c + 1] += m1.0;
        w[c] += m0.0 - m1.0;
        dw[c + 1] += m1.1;
        dw[c] += m0.1 - m1.1;
        prev0 = q0;
        prev1 = q1;
    }
    (w, dw)
}

fn solve(kernel: Kernel, hurst: f64, t: f64, m: usize, tol: f64) -> Result<NystromSolution> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("t", format!("{t} must be positive")));
    }
    if m < 16 {
        return Err(domain("m", format!("{m} cells; need at least 16")));
    }
    if !(tol > 0.0) {
        return Err(domain("tol", "must be positive"));
    }
    let x = graded_mesh(t, m);
    let n = x.len();
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut da = DMatrix::<f64>::zeros(n, n);
    let mut f = DVector::<f64>::zeros(n);
    let mut df = DVector::<f64>::zeros(n);
    for (i, &s) in x.iter().enumerate() {
        let (w, dw) = weights_row(&kernel, s, &x);
        for j in 0..n {
            a[(i, j)] += w[j];
            da[(i, j)] = dw[j];
        }
        let (fv, dfv) = kernel.rhs(s, t);
        f[i] = fv;
        df[i] = dfv;
    }
    let norm1 = |mat: &DMatrix<f64>| {
        mat.column_iter()
            .map(|col| col.abs().sum())
            .fold(0.0, f64::max)
    };
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::Conditioning(f64::INFINITY))?;
    let condition = norm1(&a) * norm1(&inv);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conditioning(condition));
    }
    let v = &inv * &f;
    let dv = &inv * (&df - &da * &v);

    let mut sol = NystromSolution {
        horizon_t: t,
        hurst,
        nodes: x[1..].to_vec(),
        g_values: x[1..]
            .iter()
            .zip(v.iter().skip(1))
            .map(|(&s, &vi)| kernel.k(s).0 - vi)
            .collect(),
        dh_values: x[1..]
            .iter()
            .zip(dv.iter().skip(1))
            .map(|(&s, &d)| kernel.k(s).1 - d)
            .collect(),
        residual_sup: 0.0,
        condition,
        mesh: x,
        v: v.iter().copied().collect(),
        dv: dv.iter().copied().collect(),
        kernel,
    };
    sol.residual_sup = residual_sup(&sol);
    if !sol.g_values.iter().all(|g| g.is_finite()) {
        return Err(Error::DegenerateData("non-finite kernel values".into()));
    }
    if !(sol.residual_sup <= tol) {
        return Err(Error::Accuracy {
            what: "Fredholm residual (increase m)",
            estimate: sol.residual_sup,
            bound: tol,
        });
    }
    Ok(sol)
}

/// Re-substitutes the solution into the equation at every cell midpoint.
fn residual_sup(sol: &NystromSolution) -> f64 {
    let x = &sol.mesh;
    let t = sol.horizon_t;
    (0..x.len() - 1)
        .map(|c| {
            let s = 0.5 * (x[c] + x[c + 1]);
            let (w, _) = weights_row(&sol.kernel, s, x);
            let conv: f64 = w.iter().zip(&sol.v).map(|(a, b)| a * b).sum();
            let vh = sol.remainder(s, &sol.v).unwrap_or(f64::NAN);
            (sol.kernel.rhs(s, t).0 - conv - vh).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_shape() {
        for &(t, m) in &[(1.0, 16), (5.0, 128), (20.0, 512)] {
            let x = graded_mesh(t, m);
            assert_eq!(x.len(), m + 1);
            assert!(x.windows(2).all(|w| w[1] > w[0]), "t={t} m={m}");
            assert_eq!(x[0], 0.0);
            assert_eq!(x[m], t);
            assert!((x[1] / t - LEFT_GAP).abs() < 1e-20);
        }
    }

    #[test]
    fn constant_kernel_closed_form() {
        for &(c, t) in &[(1.0, 1.0), (2.0, 3.0), (0.0, 2.0)] {
            let sol = solve_g_constant(c, t, 64, 1e-10).unwrap();
            let exact = c / (1.0 + c * t);
            for (&s, &g) in sol.nodes.iter().zip(&sol.g_values) {
                assert!((g - exact).abs() < 1e-10, "c={c} t={t} s={s}: {g}");
            }
            assert!((sol.eval(0.37 * t).unwrap() - exact).abs() < 1e-10);
            assert!(sol.dh_values.iter().all(|d| d.abs() < 1e-12));
        }
    }

    #[test]
    fn cell_integral_matches_closed_forms_and_limits() {
        let w = FractionalWeight::new(0.8).unwrap();
        // high-precision reference values at H = 0.8
        for &(sigma, j, dj) in &[
            (0.5, 1.859589941350302376, -14.780695784783536278),
            (1.0, 1.4680627007757263487, -8.7310777324782753291),
            (3.0, 0.58397533602398182532, -0.83508702080288544505),
        ] {
            let (v, dv) = w.cell_integral(sigma);
            assert!((v - j).abs() < 1e-13 * j, "σ={sigma}: {v} vs {j}");
            assert!(
                (dv - dj).abs() < 1e-12 * dj.abs(),
                "σ={sigma}: {dv} vs {dj}"
            );
        }
        let (j0, _) = w.cell_integral(0.0);
        let (js, _) = w.cell_integral(1e-12);
        assert!((js - j0).abs() < 1e-3 * j0);
        // ∂_H by finite differences
        for &sigma in &[0.5, 1.0, 3.0, 1e4] {
            let hp = FractionalWeight::new(0.8 + 1e-6)
                .unwrap()
                .cell_integral(sigma)
                .0;
            let hm = FractionalWeight::new(0.8 - 1e-6)
                .unwrap()
                .cell_integral(sigma)
                .0;
            let d = w.cell_integral(sigma).1;
            assert!(
                ((hp - hm) / 2e-6 - d).abs() < 1e-6 * d.abs().max(1.0),
                "σ={sigma}"
            );
        }
    }

    #[test]
    fn rhs_matches_direct_quadrature() {
        let w = FractionalWeight::new(0.8).unwrap();
        let t = 3.0;
        for &s in &[0.0, 1e-7, 0.4, 1.5, 2.999, 3.0] {
            let (f, df) = w.rhs(s, t);
            let direct = |hh: f64| {
                let k = FractionalKernel::new(hh).unwrap();
                let g = |r: f64| k.k_unchecked(r - s) * k.k_unchecked(r);
                let mut v = 0.0;
                if s > 0.0 {
                    v += tanh_sinh(g, 0.0, s, 1e-13).value;
                }
                if s < t {
                    v += tanh_sinh(g, s, t, 1e-13).value;
                }
                v
            };
            assert!(
                (direct(0.8) - f).abs() < 1e-9 * f,
                "s={s}: {f} vs {}",
                direct(0.8)
            );
            let fd = (direct(0.8 + 1e-5) - direct(0.8 - 1e-5)) / 2e-5;
            assert!((fd - df).abs() < 1e-5 * df.abs(), "s={s}: {df} vs {fd}");
        }
    }

    #[test]
    fn residual_decreases_under_refinement() {
        let r: Vec<f64> = [32, 128, 512]
            .iter()
            .map(|&m| solve_g(5.0, 0.8, m, 1.0).unwrap().residual_sup)
            .collect();
        assert!(r[2] < r[1] && r[1] < r[0], "{r:?}");
        assert!(r[2] <= 1e-4, "{r:?}");
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let (t, h, m) = (2.0, 0.8, 64);
        let sol = solve_g(t, h, m, 1.0).unwrap();
        let up = solve_g(t, h + 1e-4, m, 1.0).unwrap();
        let dn = solve_g(t, h - 1e-4, m, 1.0).unwrap();
        for i in 0..sol.nodes.len() {
            let s = sol.nodes[i];
            if s < 0.01 * t || s > 0.99 * t {
                continue;
            }
            let fd = (up.g_values[i] - dn.g_values[i]) / 2e-4;
            let d = sol.dh_values[i];
            assert!((fd - d).abs() <= 1e-4 * d.abs(), "s={s}: {d} vs {fd}");
        }
        // off-node evaluation, including inside the first cell
        for &s in &[0.5 * sol.nodes[0], 0.3, 1.7] {
            let fd = (up.eval(s).unwrap() - dn.eval(s).unwrap()) / 2e-4;
            let d = sol.eval_dh(s).unwrap();
            assert!((fd - d).abs() <= 1e-4 * d.abs(), "s={s}: {d} vs {fd}");
        }
    }

    #[test]
    fn tolerance_and_domain_errors() {
        assert!(matches!(
            solve_g(1.0, 0.8, 16, 1e-14),
            Err(Error::Accuracy { .. })
        ));
        assert!(solve_g(1.0, 0.7, 64, 1.0).is_err());
        assert!(solve_g(0.0, 0.8, 64, 1.0).is_err());
        assert!(solve_g(1.0, 0.8, 15, 1.0).is_err());
        let sol = solve_g(1.0, 0.8, 32, 1.0).unwrap();
        assert!(sol.eval(0.0).is_err() && sol.eval(1.5).is_err());
        assert!(sol.g_values.iter().all(|g| g.is_finite()));
    }

    #[test]
    fn solution_is_usable_between_nodes() {
        let sol = solve_g(2.0, 0.85, 128, 1e-3).unwrap();
        assert!(sol
            .g_values
            .iter()
            .chain(&sol.dh_values)
            .all(|v| v.is_finite()));
        for w in sol.nodes.windows(2) {
            let v = sol.eval(0.5 * (w[0] + w[1])).unwrap();
            assert!(v.is_finite() && v > 0.0);
        }
    }
}
