//! Named invariant suites: each check records the measured value and its admissible range.

use crate::analytic::{
    arg_alpha, lambda_boundary, lambda_z, standard_test_points, verify_factorization,
    AnalyticFactorization, Side,
};
use crate::error::Result;
use crate::estimate::{fisher_information, fisher_trapezoid, i12_complex_form};
use crate::innovation::{
    girsanov_loglik, innovation_drift, reconstruct_innovation, solve_g, solve_g_constant,
    KernelFamily,
};
use crate::kernels::{spectral_constant_ah, ThetaParams};
use crate::simulate::{
    derive_replication_seed, simulate_mixed_increments, simulate_ou, SamplePath,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One measured quantity against an inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn range(
        name: impl Into<String>,
        value: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> Self {
        // NaN fails every comparison
        let passed = lower.map_or(!value.is_nan(), |l| value >= l)
            && upper.map_or(!value.is_nan(), |u| value <= u);
        Self {
            name: name.into(),
            value,
            lower,
            upper,
            passed,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::range(name, value, None, Some(upper))
    }

    pub fn at_least(name: impl Into<String>, value: f64, lower: f64) -> Self {
        Self::range(name, value, Some(lower), None)
    }

    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self::range(name, value, Some(lower), Some(upper))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            suite: suite.into(),
            checks,
            passed,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

const TAUS: [f64; 6] = [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0];

/// Boundary-value symmetries, the argument function and the factorization identity at `hurst`.
pub fn lemma_suite(hurst: f64) -> Result<SuiteReport> {
    let mut checks = Vec::new();

    let mut conj = 0.0f64;
    let mut ratio = 0.0f64;
    let mut limit = 0.0f64;
    for &tau in &TAUS {
        let p = lambda_boundary(tau, Side::Plus, hurst)?;
        let m = lambda_boundary(tau, Side::Minus, hurst)?;
        conj = conj.max((p - m.conj()).norm());
        let pm = lambda_boundary(-tau, Side::Plus, hurst)?;
        let mm = lambda_boundary(-tau, Side::Minus, hurst)?;
        ratio = ratio.max((p / m - mm / pm).norm());
        // Richardson on ε = 1e−4, 1e−5 (error linear in ε)
        let e4 = lambda_z(Complex64::new(tau, 1e-4), hurst)?;
        let e5 = lambda_z(Complex64::new(tau, 1e-5), hurst)?;
        let extrap = e5 + (e5 - e4) / 9.0;
        limit = limit.max((extrap - p).norm() / p.norm());
    }
    checks.push(Check::at_most(
        "conjugate symmetry |Λ⁺(τ) − conj Λ⁻(τ)|",
        conj,
        1e-12,
    ));
    checks.push(Check::at_most(
        "ratio symmetry |Λ⁺/Λ⁻(τ) − Λ⁻/Λ⁺(−τ)|",
        ratio,
        1e-12,
    ));
    checks.push(Check::at_most(
        "boundary limit of Λ(τ+iε), relative",
        limit,
        1e-3,
    ));

    let mut even = 0.0f64;
    for z in standard_test_points() {
        even = even.max((lambda_z(z, hurst)? - lambda_z(-z, hurst)?).norm());
    }
    checks.push(Check::at_most("Λ(z) − Λ(−z)", even, 1e-12));

    let a0 = arg_alpha(1e-40, hurst)?;
    checks.push(Check::at_most(
        "|α(0+) − π(H−½)|",
        (a0 - PI * (hurst - 0.5)).abs(),
        1e-10,
    ));
    let grid: Vec<f64> = (0..100)
        .map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 99.0))
        .collect();
    let vals: Vec<f64> = grid
        .iter()
        .map(|&t| arg_alpha(t, hurst))
        .collect::<Result<_>>()?;
    let rises = vals.windows(2).filter(|w| w[1] >= w[0]).count();
    checks.push(Check::at_most(
        "non-decreasing steps of α on a 100-point log grid",
        rises as f64,
        0.0,
    ));
    let mut odd = 0.0f64;
    let mut arg_gap = 0.0f64;
    for (&t, &v) in grid.iter().zip(&vals) {
        odd = odd.max((arg_alpha(-t, hurst)? + v).abs());
        arg_gap = arg_gap.max((lambda_boundary(t, Side::Plus, hurst)?.arg() - v).abs());
    }
    checks.push(Check::at_most("α(−τ) + α(τ)", odd, 0.0));
    checks.push(Check::at_most("|arg Λ⁺(τ) − α(τ)|", arg_gap, 1e-10));
    let lead = spectral_constant_ah(hurst) * ((hurst - 0.5) * PI).sin();
    let scaled = |t: f64| arg_alpha(t, hurst).map(|a| a * t.powf(2.0 * hurst - 1.0) / lead);
    let slope = scaled(1e4)? / scaled(1e3)?;
    checks.push(Check::at_most(
        "large-τ power law, |ratio(1e4)/ratio(1e3) − 1|",
        (slope - 1.0).abs(),
        0.02,
    ));

    let f = AnalyticFactorization::new(hurst, 1e-10)?;
    let y1 = f.yc(Complex64::new(-1.0, 0.0))?;
    checks.push(Check::at_most("|Im Y_c(−1)|", y1.im.abs(), 1e-8));
    checks.push(Check::at_least("Re Y_c(−1)", y1.re, f64::MIN_POSITIVE));
    let far = f.yc(Complex64::new(-1e4, 0.0))?;
    checks.push(Check::at_most("|Y_c(−1e4) − 1|", (far - 1.0).norm(), 1e-2));
    let ly = |r: f64| f.yc(Complex64::new(-r, 0.0)).map(|y| y.norm().ln());
    let small = (ly(1e-6)? - ly(1e-4)?) / (1e-6f64.ln() - 1e-4f64.ln());
    checks.push(Check::at_most(
        "small-z exponent, relative gap to ½−H",
        (small / (0.5 - hurst) - 1.0).abs(),
        0.05,
    ));
    let mut refl = 0.0f64;
    for z in standard_test_points() {
        let a = f.yc(z.conj())?;
        refl = refl.max((a - f.yc(z)?.conj()).norm() / a.norm());
    }
    checks.push(Check::at_most(
        "Schwarz reflection Y_c(z̄) = conj Y_c(z)",
        refl,
        1e-9,
    ));

    let rep = verify_factorization(hurst, &standard_test_points(), 1e-8)?;
    checks.push(Check::at_most(
        "factorization residual, 24 points",
        rep.max_residual,
        1e-4,
    ));
    let loose = verify_factorization(hurst, &standard_test_points(), 1e-6)?.max_residual;
    checks.push(Check::range(
        "factorization residual tol 1e-8 minus tol 1e-6",
        rep.max_residual - loose,
        None,
        Some(-f64::MIN_POSITIVE),
    ));

    Ok(SuiteReport::new("lemmas", checks))
}

/// Ensemble statistics of the reconstructed innovation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitenessStudy {
    pub reps: usize,
    pub steps: usize,
    /// Sample variance of `B̄_T` over replications, divided by T.
    pub var_ratio: f64,
    /// Mean of `B̄_T/√T` over replications.
    pub mean_standardized: f64,
    /// Lags 1..=5: replication average of the per-path sample autocorrelation of `ΔB̄`.
    pub autocorr: [f64; 5],
}

/// Reconstructs `B̄` from `reps` independent mixed-noise paths on `[0, T]`.
pub fn whiteness_study(
    hurst: f64,
    horizon: f64,
    delta: f64,
    reps: usize,
    master_seed: u64,
) -> Result<WhitenessStudy> {
    let n = (horizon / delta).round() as usize;
    let family = KernelFamily::build(hurst, delta, n, false)?;
    let per: Vec<(f64, [f64; 5])> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let inc = simulate_mixed_increments(
                n,
                hurst,
                delta,
                derive_replication_seed(master_seed, r),
            )?;
            let b = reconstruct_innovation(&inc, &family)?.bbar_values;
            let db: Vec<f64> = b.windows(2).map(|w| w[1] - w[0]).collect();
            let mean = db.iter().sum::<f64>() / n as f64;
            let c = |k: usize| {
                (0..n - k)
                    .map(|j| (db[j] - mean) * (db[j + k] - mean))
                    .sum::<f64>()
            };
            let c0 = c(0);
            Ok((
                b[n],
                [c(1) / c0, c(2) / c0, c(3) / c0, c(4) / c0, c(5) / c0],
            ))
        })
        .collect::<Result<_>>()?;
    let m = reps as f64;
    let t = n as f64 * delta;
    let mean_end = per.iter().map(|p| p.0).sum::<f64>() / m;
    let var = per.iter().map(|p| (p.0 - mean_end).powi(2)).sum::<f64>() / (m - 1.0);
    let mut autocorr = [0.0; 5];
    for (_, a) in &per {
        for (acc, v) in autocorr.iter_mut().zip(a) {
            *acc += v / m;
        }
    }
    Ok(WhitenessStudy {
        reps,
        steps: n,
        var_ratio: var / t,
        mean_standardized: mean_end / t.sqrt(),
        autocorr,
    })
}

/// Fraction of seeds in which `ℓ_T(θ₀) > ℓ_T(α₀+1, H₀)`.
pub fn likelihood_ordering(
    theta0: ThetaParams,
    horizon: f64,
    delta: f64,
    seeds: usize,
    master_seed: u64,
) -> Result<f64> {
    let n = (horizon / delta).round() as usize;
    let family = KernelFamily::build(theta0.hurst, delta, n, false)?;
    let worse = ThetaParams::new(theta0.alpha + 1.0, theta0.hurst)?;
    let wins: Vec<bool> = (0..seeds as u64)
        .into_par_iter()
        .map(|r| {
            let (path, _) = simulate_ou(
                theta0.alpha,
                theta0.hurst,
                delta,
                n,
                1,
                derive_replication_seed(master_seed, r),
            )?;
            Ok(girsanov_loglik(&path, theta0, &family)? > girsanov_loglik(&path, worse, &family)?)
        })
        .collect::<Result<_>>()?;
    Ok(wins.iter().filter(|&&w| w).count() as f64 / seeds as f64)
}

/// RMS over seeds of `ℓ_T(θ₀)` at `Δ/2` minus at `Δ`, and at `Δ/4` minus at `Δ/2`.
///
/// Every seed drives one path simulated at `Δ/16` and sampled on the three grids.
pub fn loglik_refinement(
    theta0: ThetaParams,
    horizon: f64,
    coarse: f64,
    seeds: usize,
    master_seed: u64,
) -> Result<[f64; 2]> {
    let fine = coarse / 4.0;
    let n_fine = (horizon / fine).round() as usize;
    let strides = [4usize, 2, 1];
    let families: Vec<KernelFamily> = strides
        .iter()
        .map(|&s| KernelFamily::build(theta0.hurst, fine * s as f64, n_fine / s, false))
        .collect::<Result<_>>()?;
    let diffs: Vec<[f64; 2]> = (0..seeds as u64)
        .into_par_iter()
        .map(|r| {
            let seed = derive_replication_seed(master_seed, r);
            let (path, _) = simulate_ou(theta0.alpha, theta0.hurst, fine, n_fine, 4, seed)?;
            let mut l = [0.0; 3];
            for (i, (&stride, fam)) in strides.iter().zip(&families).enumerate() {
                let sub = SamplePath::new(
                    fine * stride as f64,
                    path.values.iter().step_by(stride).copied().collect(),
                )?;
                l[i] = girsanov_loglik(&sub, theta0, fam)?;
            }
            Ok([l[1] - l[0], l[2] - l[1]])
        })
        .collect::<Result<_>>()?;
    let rms = |i: usize| (diffs.iter().map(|d| d[i] * d[i]).sum::<f64>() / seeds as f64).sqrt();
    Ok([rms(0), rms(1)])
}

/// Fredholm solver accuracy, the drift gradient, likelihood sanity and innovation whiteness.
pub fn innovation_suite(hurst: f64, master_seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();

    let c = solve_g_constant(1.0, 1.0, 64, 1e-6)?;
    let err = c
        .g_values
        .iter()
        .map(|g| (g - 0.5).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "constant kernel: max |g − c/(1+ct)|",
        err,
        1e-10,
    ));

    let mut worst = 0.0f64;
    for h in [0.76, 0.8, 0.9, 0.95] {
        for t in [0.5, 1.0, 5.0, 20.0] {
            worst = worst.max(solve_g(t, h, 512, 1.0)?.residual_sup);
        }
    }
    checks.push(Check::at_most(
        "Fredholm residual at m=512, t ≤ 20, H ∈ [0.76, 0.95]",
        worst,
        1e-4,
    ));
    let r: Vec<f64> = [32, 128, 512]
        .iter()
        .map(|&m| solve_g(5.0, 0.8, m, 1.0).map(|s| s.residual_sup))
        .collect::<Result<_>>()?;
    let steps = (r[1] / r[0]).max(r[2] / r[1]);
    checks.push(Check::range(
        "refinement 32→128→512: largest residual ratio",
        steps,
        None,
        Some(1.0 - f64::EPSILON),
    ));

    let theta = ThetaParams::new(2.0, hurst)?;
    let (delta, n) = (0.05, 60);
    let (path, _) = simulate_ou(2.0, hurst, delta, n, 4, master_seed)?;
    let fam = KernelFamily::build(hurst, delta, n, true)?;
    let grad = innovation_drift(&path, theta, &fam)?.grad_b;
    let eps = 1e-4;
    let b_at = |a: f64, h: f64| -> Result<Vec<f64>> {
        let f = KernelFamily::build(h, delta, n, false)?;
        Ok(innovation_drift(&path, ThetaParams::new(a, h)?, &f)?.b_values)
    };
    let (hp, hm, ap, am) = (
        b_at(2.0, hurst + eps)?,
        b_at(2.0, hurst - eps)?,
        b_at(2.0 + eps, hurst)?,
        b_at(2.0 - eps, hurst)?,
    );
    let mut gerr = 0.0f64;
    for k in 5..n {
        let fd = [(hp[k] - hm[k]) / (2.0 * eps), (ap[k] - am[k]) / (2.0 * eps)];
        for i in 0..2 {
            gerr = gerr.max((fd[i] - grad[k][i]).abs() / grad[k][i].abs().max(1e-3));
        }
    }
    checks.push(Check::at_most(
        "∇b vs finite differences, relative",
        gerr,
        1e-3,
    ));

    let wins = likelihood_ordering(ThetaParams::new(2.0, hurst)?, 20.0, 0.01, 100, master_seed)?;
    checks.push(Check::at_least(
        "share of seeds with ℓ(θ₀) > ℓ(α₀+1)",
        wins,
        0.9,
    ));
    let d = loglik_refinement(ThetaParams::new(2.0, hurst)?, 10.0, 0.02, 50, master_seed)?;
    checks.push(Check::range(
        "ℓ at Δ=0.02,0.01,0.005 over 50 seeds: RMS second step − RMS first step",
        d[1] - d[0],
        None,
        Some(-f64::MIN_POSITIVE),
    ));

    let w = whiteness_study(hurst, 10.0, 0.01, 500, master_seed)?;
    checks.push(Check::within("Var(B̄_T)/T", w.var_ratio, 0.9, 1.1));
    let band = 3.0 / (w.reps as f64).sqrt();
    checks.push(Check::within(
        "mean of B̄_T/√T",
        w.mean_standardized,
        -band,
        band,
    ));
    let band = 3.0 / (w.steps as f64).sqrt();
    for (k, &a) in w.autocorr.iter().enumerate() {
        checks.push(Check::within(
            format!("lag-{} autocorrelation of ΔB̄", k + 1),
            a,
            -band,
            band,
        ));
    }
    Ok(SuiteReport::new("innovation", checks))
}

/// Fisher quadrature against closed forms, a brute-force trapezoid and the complex form.
pub fn fisher_suite(theta: ThetaParams) -> Result<SuiteReport> {
    let f = fisher_information(theta, 1e-8)?;
    let mut checks = vec![Check::at_most(
        "|i22 − 1/(2α)|",
        (f.i22 - 0.5 / theta.alpha).abs(),
        1e-8,
    )];
    let (t11, t12) = fisher_trapezoid(theta, 1e-6, 1e6, 10_000_000)?;
    checks.push(Check::at_most(
        "i11 vs 1e7-node trapezoid, relative",
        ((f.i11 - t11) / t11).abs(),
        1e-5,
    ));
    checks.push(Check::at_most(
        "i12 vs 1e7-node trapezoid, relative",
        ((f.i12 - t12) / t12).abs(),
        1e-5,
    ));
    let (c12, im) = i12_complex_form(theta, 1e-8)?;
    checks.push(Check::at_most(
        "i12 vs complex form, relative",
        ((f.i12 - c12) / c12).abs(),
        1e-6,
    ));
    checks.push(Check::at_most(
        "imaginary part of the complex form",
        im.abs(),
        1e-8,
    ));
    checks.push(Check::at_least(
        "determinant",
        f.determinant(),
        f64::MIN_POSITIVE,
    ));
    Ok(SuiteReport::new("fisher", checks))
}
