//! Subcommand implementations.

use crate::error::CliError;
use crate::{
    Cmd, FisherArgs, FitArgs, MleArgs, MonteCarloArgs, SimulateArgs, SpectralArgs, Suite,
    VerifyArgs, WhittleArgs,
};
use mfou_core::analytic::{standard_test_points, verify_factorization, FactorizationReport};
use mfou_core::estimate::{
    fisher_information, i12_complex_form, local_scaling, run_monte_carlo_with, whittle_estimate,
    EstimationResult, MonteCarloOptions,
};
use mfou_core::innovation::{mle_continuous, solve_g, MLE_MAX_STEPS};
use mfou_core::io::{
    read_path_file, write_g_grid, write_path_file, write_plot_columns, write_table,
};
use mfou_core::simulate::simulate_ou;
use mfou_core::spectral::{periodogram, SpectralDensity};
use mfou_core::suites::{fisher_suite, innovation_suite, lemma_suite, SuiteReport};
use mfou_core::{SpectralConfig, ThetaParams};
use serde::Serialize;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

/// Tolerance of the Y_c quadrature in the lemma report.
const REPORT_TOL: f64 = 1e-8;

pub fn dispatch(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Whittle(a) => whittle(a),
        Cmd::Mle(a) => mle(a),
        Cmd::Fisher(a) => fisher(a),
        Cmd::Montecarlo(a) => montecarlo(a),
        Cmd::Verify(a) => verify(a),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_json<T: Serialize>(file: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(file, text).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))
}

fn create(file: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(file)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", file.display())))
}

fn spectral_config(a: &SpectralArgs) -> Result<SpectralConfig, CliError> {
    Ok(SpectralConfig::new(a.truncation_k, !a.no_tail_correction)?)
}

fn init(a: &FitArgs) -> Result<ThetaParams, CliError> {
    Ok(ThetaParams::new(a.init_alpha, a.init_hurst)?)
}

/// Core I/O errors carry no file name; attach it.
fn at(file: &Path) -> impl Fn(mfou_core::Error) -> CliError + '_ {
    move |e| match e {
        mfou_core::Error::Io(io) => CliError::Io(format!("{}: {io}", file.display())),
        other => other.into(),
    }
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    // the estimators need H > 3/4, so refuse to write paths they cannot use
    let theta = ThetaParams::new(a.alpha, a.hurst)?;
    let (path, _) = simulate_ou(theta.alpha, theta.hurst, a.delta, a.n, a.refine, a.seed)?;
    write_path_file(&a.out, &path).map_err(at(&a.out))?;
    if let Some(plot) = &a.plot_data {
        write_plot_columns(create(plot)?, &["t", "x"], &[&path.times(), &path.values])?;
    }
    let m = path.values.len() as f64;
    let mean = path.values.iter().sum::<f64>() / m;
    let var = path
        .values
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / (m - 1.0).max(1.0);
    println!(
        "n={} T={} sample_variance={var:.6e}",
        path.steps(),
        path.horizon()
    );
    Ok(())
}

/// The JSON shape shared by `whittle` and `mle`.
#[derive(Debug, Serialize)]
struct EstimateJson {
    alpha_hat: f64,
    hurst_hat: f64,
    objective: f64,
    converged: bool,
    stderr_alpha: f64,
    stderr_hurst: f64,
}

impl From<EstimationResult> for EstimateJson {
    fn from(e: EstimationResult) -> Self {
        Self {
            alpha_hat: e.theta_hat.alpha,
            hurst_hat: e.theta_hat.hurst,
            objective: e.objective,
            converged: e.converged,
            stderr_alpha: e.stderr_alpha,
            stderr_hurst: e.stderr_hurst,
        }
    }
}

fn whittle(a: WhittleArgs) -> Result<(), CliError> {
    let path = read_path_file(&a.input, a.delta).map_err(at(&a.input))?;
    let cfg = spectral_config(&a.spectral)?;
    let est = whittle_estimate(&path, cfg, init(&a.fit)?, a.fit.budget)?;
    if let Some(dir) = &a.plot_data {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let pg = periodogram(&path)?;
        let (lambda, ord): (Vec<f64>, Vec<f64>) = pg.pairs().unzip();
        write_plot_columns(
            create(&dir.join("periodogram.dat"))?,
            &["lambda", "I"],
            &[&lambda, &ord],
        )?;
        let f = SpectralDensity::new(est.theta_hat, path.delta, cfg)?;
        let dens = lambda
            .iter()
            .map(|&l| f.eval(l))
            .collect::<mfou_core::Result<Vec<f64>>>()?;
        write_plot_columns(
            create(&dir.join("spectral_density.dat"))?,
            &["lambda", "f_delta"],
            &[&lambda, &dens],
        )?;
    }
    print_json(&EstimateJson::from(est))
}

fn mle(a: MleArgs) -> Result<(), CliError> {
    let path = read_path_file(&a.input, a.delta).map_err(at(&a.input))?;
    if path.steps() > MLE_MAX_STEPS {
        return Err(CliError::Usage(format!(
            "--input: {} steps exceed the continuous-record MLE limit of {MLE_MAX_STEPS}; use `mfou whittle` for long paths",
            path.steps()
        )));
    }
    let est = mle_continuous(&path, init(&a.fit)?, a.fit.budget)?;
    if let Some(file) = &a.g_grid {
        let sol = solve_g(path.horizon(), est.theta_hat.hurst, a.g_nodes, 1.0)?;
        write_g_grid(create(file)?, &sol)?;
    }
    print_json(&EstimateJson::from(est))
}

#[derive(Debug, Serialize)]
struct CrossCheck {
    i12_complex: f64,
    imaginary_part: f64,
    relative_difference: f64,
}

#[derive(Debug, Serialize)]
struct FisherJson {
    i11: f64,
    i12: f64,
    i22: f64,
    quad_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    crosscheck: Option<CrossCheck>,
}

fn fisher(a: FisherArgs) -> Result<(), CliError> {
    let theta = ThetaParams::new(a.alpha, a.hurst)?;
    let f = fisher_information(theta, a.tol)?;
    let phi = a
        .horizon
        .map(|t| local_scaling(t, &f).map(|m| [m[0][0], m[0][1], m[1][0], m[1][1]]))
        .transpose()?;
    let crosscheck = if a.crosscheck {
        let (c, im) = i12_complex_form(theta, a.tol)?;
        Some(CrossCheck {
            i12_complex: c,
            imaginary_part: im,
            relative_difference: ((f.i12 - c) / c).abs(),
        })
    } else {
        None
    };
    let bound = (100.0 * a.tol).max(1e-6);
    let mismatch = crosscheck
        .as_ref()
        .map(|c| c.relative_difference)
        .filter(|&d| !(d <= bound));
    print_json(&FisherJson {
        i11: f.i11,
        i12: f.i12,
        i22: f.i22,
        quad_tol: f.quad_tol,
        phi,
        crosscheck,
    })?;
    match mismatch {
        Some(d) => Err(CliError::Numeric(format!(
            "i12 forms differ by {d:e} relative, above {bound:e}"
        ))),
        None => Ok(()),
    }
}

fn montecarlo(a: MonteCarloArgs) -> Result<(), CliError> {
    let theta = ThetaParams::new(a.alpha, a.hurst)?;
    let opts = MonteCarloOptions {
        refine: a.refine,
        init: init(&a.fit)?,
        budget: a.fit.budget,
    };
    let (summary, est) = run_monte_carlo_with(
        theta,
        a.delta,
        a.n,
        a.reps,
        a.seed,
        spectral_config(&a.spectral)?,
        opts,
    )?;
    write_json(&a.out, &summary)?;
    if let Some(file) = &a.estimates {
        write_table(
            create(file)?,
            &["replication", "alpha_hat", "hurst_hat", "converged"],
            est.iter().enumerate().map(|(r, e)| {
                vec![
                    r as f64,
                    e.theta_hat.alpha,
                    e.theta_hat.hurst,
                    if e.converged { 1.0 } else { 0.0 },
                ]
            }),
        )?;
    }
    println!(
        "reps={} mean_alpha={:.6} mean_hurst={:.6} failures={}",
        summary.reps, summary.mean_alpha, summary.mean_hurst, summary.failures
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct VerifyJson {
    #[serde(flatten)]
    report: SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    factorization: Option<FactorizationReport>,
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let (report, factorization) = match a.suite {
        Suite::Lemmas => {
            let r = lemma_suite(a.hurst)?;
            (
                r,
                Some(verify_factorization(
                    a.hurst,
                    &standard_test_points(),
                    REPORT_TOL,
                )?),
            )
        }
        Suite::Innovation => (innovation_suite(a.hurst, a.seed)?, None),
        Suite::Fisher => (fisher_suite(ThetaParams::new(a.alpha, a.hurst)?)?, None),
    };
    let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
    let out = VerifyJson {
        report,
        factorization,
    };
    if let Some(file) = &a.out {
        write_json(file, &out)?;
    }
    print_json(&out)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!(
            "{} check(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )))
    }
}
