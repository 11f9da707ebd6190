use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn mfou(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfou"))
        .current_dir(dir)
        .env_remove("MFOU_THREADS")
        .args(args)
        .output()
        .expect("run mfou")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn simulate(dir: &Path, out: &str, delta: &str, n: &str, seed: &str) -> Output {
    mfou(
        dir,
        &[
            "simulate", "--alpha", "2", "--hurst", "0.8", "--delta", delta, "--n", n, "--seed",
            seed, "--out", out,
        ],
    )
}

#[test]
fn simulate_writes_the_paper_configuration() {
    let d = tempfile::tempdir().unwrap();
    let o = simulate(d.path(), "p.csv", "0.001", "100000", "1");
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(d.path().join("p.csv")).unwrap();
    assert_eq!(text.lines().count(), 100_002);
    assert!(text.starts_with("t,x\n"));
    let line = String::from_utf8(o.stdout).unwrap();
    assert!(
        line.starts_with("n=100000 T=100 sample_variance="),
        "{line}"
    );

    assert_eq!(
        code(&simulate(d.path(), "q.csv", "0.001", "100000", "1")),
        0
    );
    assert_eq!(
        std::fs::read(d.path().join("p.csv")).unwrap(),
        std::fs::read(d.path().join("q.csv")).unwrap()
    );
}

#[test]
fn domain_and_io_errors() {
    let d = tempfile::tempdir().unwrap();
    let o = mfou(
        d.path(),
        &[
            "simulate", "--alpha", "2", "--hurst", "0.7", "--delta", "0.01", "--n", "10", "--seed",
            "1", "--out", "x.csv",
        ],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--hurst"));
    assert!(!d.path().join("x.csv").exists());

    assert_eq!(
        code(&simulate(d.path(), "missing/dir/x.csv", "0.01", "10", "1")),
        3
    );
    assert_eq!(
        code(&mfou(d.path(), &["whittle", "--input", "nope.csv"])),
        3
    );
    assert_eq!(code(&mfou(d.path(), &["verify", "--suite", "nope"])), 2);
    assert_eq!(
        code(&mfou(
            d.path(),
            &["fisher", "--alpha", "2", "--hurst", "0.8", "--bogus", "1"]
        )),
        2
    );
    assert_eq!(
        code(&mfou(
            d.path(),
            &["fisher", "--alpha", "2", "--hurst", "0.8", "--tol", "0.5"]
        )),
        2
    );
    assert_eq!(
        code(&mfou(
            d.path(),
            &["--threads", "0", "fisher", "--alpha", "2", "--hurst", "0.8"]
        )),
        2
    );
    assert_eq!(code(&mfou(d.path(), &["--help"])), 0);
}

#[test]
fn whittle_on_simulated_data() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&simulate(d.path(), "p.csv", "0.001", "100000", "1")),
        0
    );
    let o = mfou(
        d.path(),
        &[
            "whittle",
            "--input",
            "p.csv",
            "--delta",
            "0.001",
            "--plot-data",
            "plots",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "alpha_hat",
        "hurst_hat",
        "objective",
        "converged",
        "stderr_alpha",
        "stderr_hurst",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    let a = v["alpha_hat"].as_f64().unwrap();
    let h = v["hurst_hat"].as_f64().unwrap();
    assert!((1.2..=3.2).contains(&a), "{a}");
    assert!((0.75..=0.95).contains(&h), "{h}");
    assert_eq!(v["converged"], Value::Bool(true));

    let again = mfou(
        d.path(),
        &["whittle", "--input", "p.csv", "--delta", "0.001"],
    );
    assert_eq!(again.stdout, o.stdout);

    for f in ["periodogram.dat", "spectral_density.dat"] {
        let text = std::fs::read_to_string(d.path().join("plots").join(f)).unwrap();
        assert!(text.starts_with("# lambda "));
        assert_eq!(text.lines().count(), 1 + 50_000);
        assert_eq!(text.lines().nth(1).unwrap().split_whitespace().count(), 2);
    }

    assert_eq!(
        code(&mfou(
            d.path(),
            &["whittle", "--input", "p.csv", "--delta", "0.002"]
        )),
        2
    );
    std::fs::write(d.path().join("bad.csv"), "t,y\n0,1\n1,2\n").unwrap();
    assert_eq!(code(&mfou(d.path(), &["whittle", "--input", "bad.csv"])), 2);
}

#[test]
fn csv_round_trip_through_whittle_input() {
    // the path read back by the estimator is the one written by the simulator
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate(d.path(), "p.csv", "0.01", "3000", "9")), 0);
    let path = mfou_core::io::read_path_file(&d.path().join("p.csv"), Some(0.01)).unwrap();
    let (mem, _) = mfou_core::simulate::simulate_ou(2.0, 0.8, 0.01, 3000, 1, 9).unwrap();
    assert_eq!(path.values, mem.values);
}

#[test]
fn mle_guard_and_result() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&simulate(d.path(), "long.csv", "0.001", "100000", "1")),
        0
    );
    let o = mfou(d.path(), &["mle", "--input", "long.csv"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("whittle"));

    assert_eq!(
        code(&simulate(d.path(), "short.csv", "0.01", "2000", "2")),
        0
    );
    let o = mfou(
        d.path(),
        &[
            "mle",
            "--input",
            "short.csv",
            "--delta",
            "0.01",
            "--g-grid",
            "g.csv",
            "--g-nodes",
            "64",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["converged"], Value::Bool(true));
    // the band statistics over replications are a library test; here the CLI must reproduce it exactly
    let (path, _) = mfou_core::simulate::simulate_ou(2.0, 0.8, 0.01, 2000, 1, 2).unwrap();
    let lib = mfou_core::innovation::mle_continuous(&path, mfou_core::estimate::DEFAULT_INIT, 500)
        .unwrap();
    assert_eq!(v["alpha_hat"].as_f64().unwrap(), lib.theta_hat.alpha);
    assert_eq!(v["hurst_hat"].as_f64().unwrap(), lib.theta_hat.hurst);
    assert_eq!(v["objective"].as_f64().unwrap(), lib.objective);
    let g = std::fs::read_to_string(d.path().join("g.csv")).unwrap();
    assert!(g.starts_with("s,g,dg_dH\n"));
}

#[test]
fn fisher_output() {
    let d = tempfile::tempdir().unwrap();
    let o = mfou(d.path(), &["fisher", "--alpha", "2", "--hurst", "0.8"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["i22"].as_f64().unwrap(), 0.25);
    assert!((v["i11"].as_f64().unwrap() - 142.945557793646).abs() < 1e-6);
    assert!(v.get("phi").is_none());

    let o = mfou(
        d.path(),
        &[
            "fisher",
            "--alpha",
            "2",
            "--hurst",
            "0.8",
            "--horizon",
            "100",
            "--crosscheck",
        ],
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let phi: Vec<f64> = v["phi"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(phi.len(), 4);
    assert_eq!(phi[1], phi[2]);
    assert!(v["crosscheck"]["relative_difference"].as_f64().unwrap() <= 1e-6);

    // tightening the tolerance shrinks the change between successive outputs
    let i11 = |tol: &str| {
        json(&mfou(
            d.path(),
            &["fisher", "--alpha", "2", "--hurst", "0.8", "--tol", tol],
        ))["i11"]
            .as_f64()
            .unwrap()
    };
    let (a, b, c) = (i11("1e-4"), i11("1e-6"), i11("1e-8"));
    assert!((c - b).abs() <= (b - a).abs());
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("run.conf"),
        "# study\nalpha = 3\nhurst = 0.9\ncrosscheck = true\n",
    )
    .unwrap();
    let v = json(&mfou(
        d.path(),
        &["fisher", "--config", "run.conf", "--alpha", "2"],
    ));
    let w = json(&mfou(
        d.path(),
        &["fisher", "--alpha", "2", "--hurst", "0.9", "--crosscheck"],
    ));
    assert_eq!(v, w);
    std::fs::write(d.path().join("bad.conf"), "alpha = 2\nsuite = lemmas\n").unwrap();
    assert_eq!(
        code(&mfou(
            d.path(),
            &["fisher", "--config", "bad.conf", "--hurst", "0.8"]
        )),
        2
    );
    assert_eq!(
        code(&mfou(d.path(), &["fisher", "--config", "absent.conf"])),
        3
    );
}

#[test]
fn montecarlo_single_rep_equals_single_run_and_ignores_threads() {
    let d = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = mfou(
            d.path(),
            &[
                "--threads",
                threads,
                "montecarlo",
                "--n",
                "4096",
                "--delta",
                "0.01",
                "--reps",
                "3",
                "--seed",
                "5",
                "--out",
                out,
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (o.stdout, std::fs::read(d.path().join(out)).unwrap())
    };
    assert_eq!(run("1", "a.json"), run("3", "b.json"));

    let o = mfou(
        d.path(),
        &[
            "montecarlo",
            "--n",
            "4096",
            "--delta",
            "0.01",
            "--reps",
            "1",
            "--seed",
            "5",
            "--out",
            "one.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let s: Value =
        serde_json::from_slice(&std::fs::read(d.path().join("one.json")).unwrap()).unwrap();
    for k in [
        "reps",
        "mean_alpha",
        "mean_hurst",
        "sample_cov",
        "fisher_inverse",
        "failures",
        "master_seed",
        "config",
    ] {
        assert!(s.get(k).is_some(), "missing {k}");
    }
    assert!(s["config"].get("truncation_K").is_some());

    // replication 0 of master 5, fitted on its own
    let seed = mfou_core::simulate::derive_replication_seed(5, 0).to_string();
    assert_eq!(
        code(&simulate(d.path(), "rep0.csv", "0.01", "4096", &seed)),
        0
    );
    let single = json(&mfou(d.path(), &["whittle", "--input", "rep0.csv"]));
    assert_eq!(s["mean_alpha"], single["alpha_hat"]);
    assert_eq!(s["mean_hurst"], single["hurst_hat"]);
}

#[test]
fn verify_suites() {
    let d = tempfile::tempdir().unwrap();
    let o = mfou(
        d.path(),
        &[
            "verify", "--suite", "lemmas", "--hurst", "0.8", "--out", "r.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["factorization"]["max_residual"].as_f64().unwrap() <= 1e-4);
    let pts = v["factorization"]["points"].as_array().unwrap();
    assert!(pts.iter().all(|p| p.get("z_re").is_some()
        && p.get("z_im").is_some()
        && p.get("residual").is_some()));
    let file: Value =
        serde_json::from_slice(&std::fs::read(d.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(file, v);

    let o = mfou(d.path(), &["verify", "--suite", "fisher"]);
    assert_eq!(code(&o), 0);

    // the exit code follows the report, whatever the outcome
    let o = mfou(d.path(), &["verify", "--suite", "innovation"]);
    let v = json(&o);
    let all = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == Value::Bool(true));
    assert_eq!(code(&o), if all { 0 } else { 1 });
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"].as_str().unwrap().contains("Var(B̄_T)/T")));
}
