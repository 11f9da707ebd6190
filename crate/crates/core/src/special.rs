//! Special functions not covered by `statrs`: digamma and the Hurwitz zeta.

pub use statrs::function::gamma::{gamma, ln_gamma};

// Bernoulli numbers B_{2k} for k = 1..10.
const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Digamma ψ(x) for x > 0, by upward recurrence to x ≥ 10 and the asymptotic series.
pub fn digamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut series = 0.0;
    for (k, b) in BERNOULLI_2K.iter().take(8).enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += b / two_k * pow;
        pow *= inv2;
    }
    acc + x.ln() - 0.5 / x - series
}

/// Euler beta function B(a, b) for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Hurwitz zeta ζ(s, q) = Σ_{k≥0} (q+k)^{-s} for s > 1, q > 0, via Euler–Maclaurin.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    let a_s = a.powf(-s);
    sum += a * a_s / (s - 1.0) + 0.5 * a_s;
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · a^{−s−2j+1}
    let mut fact = 1.0;
    let mut rising = s;
    let mut term_pow = a_s / a;
    for (j, b) in BERNOULLI_2K.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        fact *= (two_j - 1.0) * two_j;
        let term = b / fact * rising * term_pow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        rising *= (s + two_j - 1.0) * (s + two_j);
        term_pow /= a * a;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn digamma_reference_values() {
        let cases = [
            (2.6, 0.751_047_452_773_476_3),
            (0.6, -1.540_619_213_893_190_4),
            (1.2, -0.289_039_896_592_188_3),
            (0.1, -10.423_754_940_411_077),
            (7.3, 1.917_820_335_637_986),
            (25.5, 3.218_942_472_883_919_8),
        ];
        for (x, want) in cases {
            assert!(rel(digamma(x), want) < 1e-13, "psi({x})");
        }
    }

    #[test]
    fn gamma_is_accurate_enough() {
        let cases = [
            (2.6, 1.429_624_558_860_304_4),
            (0.6, 1.489_192_248_812_817),
            (1.2, 0.918_168_742_399_760_6),
            (7.3, 1_271.423_633_663_909_3),
        ];
        for (x, want) in cases {
            assert!(rel(gamma(x), want) < 1e-12, "gamma({x})");
        }
    }

    #[test]
    fn digamma_recurrence() {
        for &x in &[0.3, 1.7, 4.2, 11.0] {
            assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-13);
        }
    }

    #[test]
    fn hurwitz_reference_values() {
        let cases = [
            (2.6, 11.0, 0.014_497_622_277_178_994),
            (3.6, 1.0, 1.115_989_079_123_337_6),
            (2.52, 17.0, 0.009_275_270_418_522_858),
            (5.6, 3.5, 0.001_244_721_763_794_332_8),
        ];
        for (s, q, want) in cases {
            assert!(rel(hurwitz_zeta(s, q), want) < 1e-13, "zeta({s},{q})");
        }
        let pi = std::f64::consts::PI;
        assert!(rel(hurwitz_zeta(2.0, 1.0), pi * pi / 6.0) < 1e-14);
    }

    #[test]
    fn hurwitz_shift_identity() {
        for &(s, q) in &[(1.5, 0.5), (2.2, 3.0), (9.0, 1.25)] {
            let d = hurwitz_zeta(s, q) - hurwitz_zeta(s, q + 1.0);
            assert!(rel(d, q.powf(-s)) < 1e-11);
        }
    }

    #[test]
    fn beta_reference() {
        assert!(rel(beta(0.6, 0.6), 2.415_344_208_002_471_8) < 1e-12);
    }
}
