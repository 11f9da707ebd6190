//! Levinson recursion for nested symmetric positive-definite Toeplitz systems.
//!
//! Advancing one order at a time yields the solution for every leading block
//! `T_k x = b[..k]` in `O(k)` work per step.

/// Yule–Walker state of the recursion at the current order.
#[derive(Debug, Clone)]
pub(crate) struct Levinson {
    r0: f64,
    // first row divided by r0
    r: Vec<f64>,
    y: Vec<f64>,
    beta: f64,
    history: Option<Vec<(Vec<f64>, f64)>>,
}

impl Levinson {
    /// `row` is the first row of the largest matrix; `keep` stores every order for [`Self::solve`].
    pub(crate) fn new(row: &[f64], keep: bool) -> Self {
        let r0 = row[0];
        let r: Vec<f64> = row.iter().map(|v| v / r0).collect();
        let r1 = r.get(1).copied().unwrap_or(0.0);
        let mut s = Self {
            r0,
            r,
            y: vec![-r1],
            beta: 1.0 - r1 * r1,
            history: keep.then(Vec::new),
        };
        s.record();
        s
    }

    fn record(&mut self) {
        if let Some(h) = self.history.as_mut() {
            h.push((self.y.clone(), self.beta));
        }
    }

    pub(crate) fn order(&self) -> usize {
        self.y.len()
    }

    /// Extends a solution of order `k` to order `k+1` given the next right-hand side entry.
    pub(crate) fn extend(&self, x: &mut Vec<f64>, b_next: f64) {
        extend_with(&self.r, &self.y, self.beta, x, b_next / self.r0);
    }

    /// Starts a right-hand side sequence at order 1.
    pub(crate) fn start(&self, b0: f64) -> Vec<f64> {
        vec![b0 / self.r0]
    }

    /// Moves the Yule–Walker state from order `k` to `k+1`.
    pub(crate) fn advance(&mut self) {
        let k = self.order();
        let dot: f64 = (0..k).map(|i| self.r[i + 1] * self.y[k - 1 - i]).sum();
        let alpha = (-self.r[k + 1] - dot) / self.beta;
        let rev: Vec<f64> = self.y.iter().rev().copied().collect();
        for (yi, ri) in self.y.iter_mut().zip(rev) {
            *yi += alpha * ri;
        }
        self.y.push(alpha);
        self.beta *= 1.0 - alpha * alpha;
        self.record();
    }

    /// Solves `T_k x = b` for the order `k = b.len()` using the stored history.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let hist = self.history.as_ref().expect("history was not kept");
        assert!(b.len() <= hist.len() + 1 && !b.is_empty());
        let mut x = vec![b[0] / self.r0];
        for (k, &bk) in b.iter().enumerate().skip(1) {
            let (y, beta) = &hist[k - 1];
            extend_with(&self.r, y, *beta, &mut x, bk / self.r0);
        }
        x
    }
}

fn extend_with(r: &[f64], y: &[f64], beta: f64, x: &mut Vec<f64>, b_next: f64) {
    let k = x.len();
    debug_assert_eq!(y.len(), k);
    let dot: f64 = (0..k).map(|i| r[i + 1] * x[k - 1 - i]).sum();
    let mu = (b_next - dot) / beta;
    for i in 0..k {
        x[i] += mu * y[k - 1 - i];
    }
    x.push(mu);
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn dense(row: &[f64], k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(k, k, |i, j| row[i.abs_diff(j)])
    }

    #[test]
    fn nested_solutions_match_dense() {
        let n = 12;
        let row: Vec<f64> = (0..n)
            .map(|d| {
                if d == 0 {
                    3.0
                } else {
                    1.0 / (1.0 + d as f64).powf(1.3)
                }
            })
            .collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() + 0.2).collect();
        let mut lev = Levinson::new(&row, true);
        let mut x = lev.start(b[0]);
        for k in 1..=n {
            let exact = dense(&row, k)
                .lu()
                .solve(&DVector::from_column_slice(&b[..k]))
                .unwrap();
            for i in 0..k {
                assert!((x[i] - exact[i]).abs() < 1e-12, "order {k}");
            }
            if k < n {
                lev.extend(&mut x, b[k]);
                if k + 1 < n {
                    lev.advance();
                }
            }
        }
        let q: Vec<f64> = (0..7).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let got = lev.solve(&q);
        let exact = dense(&row, 7)
            .lu()
            .solve(&DVector::from_column_slice(&q))
            .unwrap();
        for i in 0..7 {
            assert!((got[i] - exact[i]).abs() < 1e-12);
        }
    }
}
