//! Nelder–Mead in two dimensions and the unconstrained (u, v) chart of the parameter domain.

use crate::kernels::ThetaParams;

/// Bound on |u|, |v|; beyond it H would round onto 3/4 or 1.
pub const CHART_LIMIT: f64 = 30.0;

/// `α = e^u`, `H = 3/4 + (1/4)/(1 + e^{−v})`. `None` outside the chart box.
pub fn chart_to_theta(p: [f64; 2]) -> Option<ThetaParams> {
    let [u, v] = p;
    if !(u.abs() <= CHART_LIMIT && v.abs() <= CHART_LIMIT) {
        return None;
    }
    let theta = ThetaParams {
        alpha: u.exp(),
        hurst: 0.75 + 0.25 / (1.0 + (-v).exp()),
    };
    assert!(
        theta.alpha > 0.0 && theta.hurst > 0.75 && theta.hurst < 1.0,
        "chart left the open domain at {p:?}"
    );
    Some(theta)
}

pub fn theta_to_chart(theta: ThetaParams) -> [f64; 2] {
    let s = (theta.hurst - 0.75) * 4.0;
    [theta.alpha.ln(), (s / (1.0 - s)).ln()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: [f64; 2],
    pub fx: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from a regular simplex of radius `radius` around `x0`.
///
/// Converged means the simplex diameter fell below `xtol` within `max_iter` iterations.
pub fn nelder_mead<F: FnMut([f64; 2]) -> f64>(
    mut f: F,
    x0: [f64; 2],
    radius: f64,
    xtol: f64,
    max_iter: usize,
) -> Minimum {
    let mut evals = 0usize;
    let mut call = |x: [f64; 2], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts = [
        x0,
        [x0[0] + radius, x0[1]],
        [
            x0[0] - 0.5 * radius,
            x0[1] + 0.866_025_403_784_438_6 * radius,
        ],
    ];
    let mut vals = [0.0; 3];
    for i in 0..3 {
        vals[i] = call(pts[i], &mut evals);
    }
    let diameter = |p: &[[f64; 2]; 3]| {
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        d(p[0], p[1]).max(d(p[0], p[2])).max(d(p[1], p[2]))
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // order best..worst; stable for ties so runs are reproducible
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];
        if diameter(&pts) < xtol {
            converged = true;
            break;
        }
        iterations += 1;
        let c = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = call(xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = call(xe, &mut evals);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[2] {
            let x = along(-0.5);
            (x, call(x, &mut evals))
        } else {
            let x = along(0.5);
            (x, call(x, &mut evals))
        };
        if fc < vals[2].min(fr) {
            pts[2] = xc;
            vals[2] = fc;
            continue;
        }
        for i in 1..3 {
            pts[i] = [0.5 * (pts[0][0] + pts[i][0]), 0.5 * (pts[0][1] + pts[i][1])];
            vals[i] = call(pts[i], &mut evals);
        }
    }
    let best = (0..3)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    Minimum {
        x: pts[best],
        fx: vals[best],
        iterations,
        evaluations: evals,
        converged,
    }
}
