//! The sectionally holomorphic function `Λ(z)`, its boundary values, argument and factorization.
//!
//! `Λ(z) = 1 + ½Γ(2H+1)(z^{1−2H} + (−z)^{1−2H})` with principal branches. It factors as
//! `Λ(z) = Y_c(z)Y_c(−z)`, where `Y_c(z) = exp((1/π)∫₀^∞ α(τ)/(τ−z) dτ)` and `α(τ)` is the
//! argument of the upper boundary value `Λ⁺(τ)`.

use crate::error::{domain, Error, Result};
use crate::kernels::spectral_constant_ah;
use crate::quad::integrate_breaks;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Which side of the real axis a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// Closest approach to the positive half-axis that [`yc`] accepts.
pub const MIN_AXIS_DISTANCE: f64 = 1e-8;

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.75 && hurst < 1.0 {
        Ok(())
    } else {
        Err(domain("hurst", format!("{hurst} must lie in (3/4, 1)")))
    }
}

/// `Λ(z)` for `Im z ≠ 0`.
pub fn lambda_z(z: Complex64, hurst: f64) -> Result<Complex64> {
    check_hurst(hurst)?;
    if z.im == 0.0 || !z.is_finite() {
        return Err(domain(
            "z",
            format!("{z} lies on the real axis where Λ has two boundary values"),
        ));
    }
    let e = 1.0 - 2.0 * hurst;
    Ok(1.0 + 0.5 * gamma(2.0 * hurst + 1.0) * (z.powf(e) + (-z).powf(e)))
}

/// Boundary value `Λ^±(τ)` on the real axis.
pub fn lambda_boundary(tau: f64, side: Side, hurst: f64) -> Result<Complex64> {
    check_hurst(hurst)?;
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::SingularArgument {
            name: "tau",
            value: tau,
        });
    }
    let sign = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    } * tau.signum();
    let phase = Complex64::from_polar(1.0, sign * (hurst - 0.5) * PI);
    Ok(1.0 + spectral_constant_ah(hurst) * tau.abs().powf(1.0 - 2.0 * hurst) * phase)
}

/// `α(τ) = arg Λ⁺(τ)`, odd and decreasing on `(0, ∞)` from `π(H−½)`.
pub fn arg_alpha(tau: f64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    if tau == 0.0 || tau.is_nan() {
        return Err(Error::SingularArgument {
            name: "tau",
            value: tau,
        });
    }
    Ok(tau.signum() * arg_alpha_pos(tau.abs(), hurst))
}

fn arg_alpha_pos(tau: f64, hurst: f64) -> f64 {
    let a = spectral_constant_ah(hurst);
    let phi = (hurst - 0.5) * PI;
    (a * phi.sin() / (tau.powf(2.0 * hurst - 1.0) + a * phi.cos())).atan()
}

/// Quadrature settings for the Cauchy integral in [`yc`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFactorization {
    pub hurst: f64,
    /// Absolute error target on the exponent `log Y_c`.
    pub quad_tol: f64,
    /// Integrals run numerically up to `tail_cut·max(1, |z|)`; beyond it the argument's
    /// power series is integrated in closed form.
    pub tail_cut: f64,
}

const MAX_PIECES: usize = 20_000;

impl AnalyticFactorization {
    pub fn new(hurst: f64, quad_tol: f64) -> Result<Self> {
        check_hurst(hurst)?;
        if !(quad_tol > 0.0) {
            return Err(domain("tol", "must be positive"));
        }
        Ok(Self {
            hurst,
            quad_tol,
            tail_cut: 1e6,
        })
    }

    /// `log Y_c(z)`.
    pub fn log_yc(&self, z: Complex64) -> Result<Complex64> {
        let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
        if !(dist > MIN_AXIS_DISTANCE) || !z.is_finite() {
            return Err(domain(
                "z",
                format!("{z} is within {MIN_AXIS_DISTANCE:e} of the positive half-axis"),
            ));
        }
        let h = self.hurst;
        let r = z.norm();
        let lo = 1e-14 * r.min(1.0);
        let hi = self.tail_cut * r.max(1.0);
        let (ulo, uhi, uz) = (lo.ln(), hi.ln(), r.ln());

        // τ = e^u; the denominator is smallest near u = ln|z|, with width ~ angle to the axis
        let width = z.arg().abs().clamp(1e-12, 1.0);
        let mut breaks = vec![ulo, uhi];
        let mut u = ulo.ceil();
        while u < uhi {
            breaks.push(u);
            u += 12.0;
        }
        for k in -1..=1 {
            let b = uz + k as f64 * 4.0 * width;
            if b > ulo && b < uhi {
                breaks.push(b);
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let integrand = |u: f64| {
            let tau = u.exp();
            arg_alpha_pos(tau, h) * tau / (tau - z)
        };
        let tol = 0.5 * self.quad_tol * PI;
        let re = integrate_breaks(|u| integrand(u).re, &breaks, tol, 0.0, MAX_PIECES);
        let im = integrate_breaks(|u| integrand(u).im, &breaks, tol, 0.0, MAX_PIECES);
        if !(re.converged && im.converged) {
            return Err(Error::Accuracy {
                what: "Cauchy integral",
                estimate: re.value,
                bound: (re.abs_err + im.abs_err) / PI,
            });
        }
        let body = Complex64::new(re.value, im.value);
        // α ≈ α(0+) on (0, lo)
        let head = (h - 0.5) * PI * ((lo - z).ln() - (-z).ln());
        Ok((body + head + self.tail(z, hi)) / PI)
    }

    /// `∫_c^∞ α(τ)/(τ−z)dτ` from `α = c₁t + c₂t² + c₃t³ + O(t⁴)`, `t = τ^{1−2H}`.
    fn tail(&self, z: Complex64, c: f64) -> Complex64 {
        let h = self.hurst;
        let p = 2.0 * h - 1.0;
        let a = spectral_constant_ah(h);
        let phi = (h - 0.5) * PI;
        let (sa, sb) = (a * phi.sin(), a * phi.cos());
        let coeffs = [sa, -sa * sb, sa * sb * sb - sa.powi(3) / 3.0];
        let mut out = Complex64::new(0.0, 0.0);
        for (m, cm) in coeffs.iter().enumerate() {
            let e = (m + 1) as f64 * p;
            // 1/(τ−z) = 1/τ + z/τ² + z²/τ³ + …
            let mut zj = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                let ej = e + j as f64;
                out += cm * zj * c.powf(-ej) / ej;
                zj *= z;
            }
        }
        out
    }

    /// `Y_c(z)` for `z` off the positive half-axis.
    pub fn yc(&self, z: Complex64) -> Result<Complex64> {
        self.log_yc(z).map(|l| l.exp())
    }

    /// Relative residual `|Y_c(z)Y_c(−z) − Λ(z)| / |Λ(z)|`.
    pub fn residual(&self, z: Complex64) -> Result<f64> {
        let lam = lambda_z(z, self.hurst)?;
        let prod = self.yc(z)? * self.yc(-z)?;
        Ok((prod - lam).norm() / lam.norm())
    }
}

/// `Y_c(z)` with absolute tolerance `tol` on its logarithm.
pub fn yc(z: Complex64, hurst: f64, tol: f64) -> Result<Complex64> {
    AnalyticFactorization::new(hurst, tol)?.yc(z)
}

/// One row of a factorization report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub z_re: f64,
    pub z_im: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub hurst: f64,
    pub points: Vec<ResidualPoint>,
    pub max_residual: f64,
}

/// Checks `Y_c(z)Y_c(−z) = Λ(z)` at each point.
pub fn verify_factorization(
    hurst: f64,
    test_points: &[Complex64],
    tol: f64,
) -> Result<FactorizationReport> {
    let f = AnalyticFactorization::new(hurst, tol)?;
    let points = test_points
        .iter()
        .map(|&z| {
            Ok(ResidualPoint {
                z_re: z.re,
                z_im: z.im,
                residual: f.residual(z)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(FactorizationReport {
        hurst,
        points,
        max_residual,
    })
}

/// `r e^{iφ}` for `r ∈ {0.1, 1, 10, 100}` and `φ ∈ {±π/4, ±π/2, ±3π/4}`.
pub fn standard_test_points() -> Vec<Complex64> {
    let mut out = Vec::with_capacity(24);
    for r in [0.1, 1.0, 10.0, 100.0] {
        for phi in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            out.push(Complex64::from_polar(r, phi));
            out.push(Complex64::from_polar(r, -phi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = 0.8;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_reference_values_and_symmetry() {
        let v = lambda_z(c(0.0, 1.0), H).unwrap();
        assert!((v - c(1.840_312_232_013_219_7, 0.0)).norm() < 1e-13, "{v}");
        assert!((v.re - (1.0 + gamma(2.6) * (0.3 * PI).cos())).abs() < 1e-14);
        for z in standard_test_points() {
            let d = lambda_z(z, H).unwrap() - lambda_z(-z, H).unwrap();
            assert!(d.norm() < 1e-14);
        }
        let far = lambda_z(c(1e8, 1.0), H).unwrap();
        assert!((far - 1.0).norm() < 1e-4);
        assert!(lambda_z(c(2.0, 0.0), H).is_err());
        assert!(lambda_z(c(0.0, 1.0), 0.7).is_err());
    }

    #[test]
    fn boundary_values() {
        let v = lambda_boundary(1.0, Side::Plus, H).unwrap();
        assert!(
            (v - c(1.493_923_137_298_341_5, 0.679_826_876_279_838_3)).norm() < 1e-13,
            "{v}"
        );
        for tau in [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0] {
            let p = lambda_boundary(tau, Side::Plus, H).unwrap();
            let m = lambda_boundary(tau, Side::Minus, H).unwrap();
            assert!((p - m.conj()).norm() < 1e-15);
            let pm = lambda_boundary(-tau, Side::Plus, H).unwrap();
            let mm = lambda_boundary(-tau, Side::Minus, H).unwrap();
            assert!((p / m - mm / pm).norm() < 1e-12);
            // limit from the upper half plane
            let approach: Vec<Complex64> = [1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&e| lambda_z(c(tau, e), H).unwrap())
                .collect();
            let extrap = approach[2] + (approach[2] - approach[1]) / 9.0;
            assert!((extrap - p).norm() < 1e-3 * p.norm(), "τ={tau}");
        }
        assert!(matches!(
            lambda_boundary(0.0, Side::Plus, H),
            Err(Error::SingularArgument { .. })
        ));
    }

    #[test]
    fn argument_function() {
        let small = arg_alpha(1e-300, H).unwrap();
        assert!((small - 0.3 * PI).abs() < 1e-10);
        assert!(arg_alpha(0.0, H).is_err());
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let tau = 10f64.powf(-4.0 + 8.0 * i as f64 / 99.0);
            let v = arg_alpha(tau, H).unwrap();
            assert!(v < prev);
            assert_eq!(arg_alpha(-tau, H).unwrap(), -v);
            let p = lambda_boundary(tau, Side::Plus, H).unwrap();
            assert!((p.arg() - v).abs() < 1e-10);
            prev = v;
        }
        let lead = spectral_constant_ah(H) * (0.3 * PI).sin();
        let slope = |t: f64| arg_alpha(t, H).unwrap() * t.powf(2.0 * H - 1.0) / lead;
        assert!((slope(1e4) / slope(1e3) - 1.0).abs() < 0.02);
        assert!((slope(1e8) - 1.0).abs() < 0.01);
    }

    #[test]
    fn yc_properties() {
        let f = AnalyticFactorization::new(H, 1e-10).unwrap();
        let y = f.yc(c(-1.0, 0.0)).unwrap();
        assert!(y.im.abs() < 1e-8 && y.re > 0.0);
        assert!((f.yc(c(-1e4, 0.0)).unwrap() - 1.0).norm() < 1e-2);
        let slope = (f.yc(c(-1e-6, 0.0)).unwrap().norm().ln()
            - f.yc(c(-1e-4, 0.0)).unwrap().norm().ln())
            / (1e-6f64.ln() - 1e-4f64.ln());
        assert!((slope / (0.5 - H) - 1.0).abs() < 0.05, "{slope}");
        for z in standard_test_points() {
            let a = f.yc(z.conj()).unwrap();
            let b = f.yc(z).unwrap().conj();
            assert!((a - b).norm() < 1e-9 * b.norm());
        }
        assert!(f.yc(c(2.0, 1e-9)).is_err());
        assert!(f.yc(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn tail_series_matches_quadrature() {
        let f = AnalyticFactorization::new(0.76, 1e-12).unwrap();
        let z = c(-3.0, 2.0);
        let cut = 1e6;
        let series = f.tail(z, cut);
        let direct = |part: fn(Complex64) -> f64| {
            integrate_breaks(
                |u: f64| {
                    let t = u.exp();
                    part(arg_alpha_pos(t, 0.76) * t / (t - z))
                },
                &(0..=40)
                    .map(|k| cut.ln() + k as f64 * 2.0)
                    .collect::<Vec<_>>(),
                1e-14,
                0.0,
                5000,
            )
            .value
        };
        let far = f.tail(z, cut * 1e35);
        let expect = c(direct(|v| v.re), direct(|v| v.im)) + far;
        assert!((series - expect).norm() < 1e-10, "{series} vs {expect}");
    }

    #[test]
    fn factorization_identity() {
        for h in [0.76, 0.8, 0.9] {
            let r = verify_factorization(h, &standard_test_points(), 1e-8).unwrap();
            assert_eq!(r.points.len(), 24);
            assert!(r.max_residual <= 1e-4, "H={h}: {}", r.max_residual);
        }
        let loose = verify_factorization(H, &standard_test_points(), 1e-6)
            .unwrap()
            .max_residual;
        let tight = verify_factorization(H, &standard_test_points(), 1e-8)
            .unwrap()
            .max_residual;
        assert!(tight < loose, "{tight} vs {loose}");
        let f = AnalyticFactorization::new(H, 1e-8).unwrap();
        for z in standard_test_points() {
            assert_eq!(
                f.yc(z).unwrap() * f.yc(-z).unwrap(),
                f.yc(-z).unwrap() * f.yc(z).unwrap()
            );
        }
    }

    fn off_axis() -> impl proptest::strategy::Strategy<Value = Complex64> {
        use proptest::prelude::*;
        (-3.0f64..3.0, 0.05f64..3.0, any::<bool>()).prop_map(|(lr, ang, up)| {
            Complex64::from_polar(10f64.powf(lr), if up { ang } else { -ang })
        })
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn lambda_is_even_and_real_on_conjugates(z in off_axis(), h in 0.76f64..0.99) {
            let a = lambda_z(z, h).unwrap();
            proptest::prop_assert!((a - lambda_z(-z, h).unwrap()).norm() <= 1e-12 * a.norm());
            proptest::prop_assert!((lambda_z(z.conj(), h).unwrap() - a.conj()).norm() <= 1e-12 * a.norm());
        }

        #[test]
        fn argument_is_odd_bounded_and_matches_boundary_value(lt in -6.0f64..6.0, h in 0.76f64..0.99) {
            let tau = 10f64.powf(lt);
            let a = arg_alpha(tau, h).unwrap();
            proptest::prop_assert!(a > 0.0 && a < PI * (h - 0.5));
            proptest::prop_assert_eq!(arg_alpha(-tau, h).unwrap(), -a);
            let b = lambda_boundary(tau, Side::Plus, h).unwrap();
            proptest::prop_assert!((b.arg() - a).abs() < 1e-10);
            let c = lambda_boundary(-tau, Side::Minus, h).unwrap();
            proptest::prop_assert!((c - b).norm() < 1e-12 * b.norm());
        }
    }
}
