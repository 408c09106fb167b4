//! Reference constants for the energy asymptotics.

use std::f64::consts::PI;

use libm::lgamma;

use crate::error::{Error, Result};

/// `zeta(1/2)`.
pub const ZETA_HALF: f64 = -1.460_354_508_809_586_8;

/// `I_{s,d} = G((d+1)/2) G(d-s) / (G((d-s+1)/2) G(d-s/2))`, the normalized
/// double energy integral over `S^d`, finite for `0 < s < d`.
pub fn energy_integral_constant(s: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    if !(s > 0.0 && s < df) {
        return Err(Error::Domain {
            s,
            reason: "energy integral is finite only for 0 < s < d",
        });
    }
    let log = lgamma((df + 1.0) / 2.0) + lgamma(df - s)
        - lgamma((df - s + 1.0) / 2.0)
        - lgamma(df - s / 2.0);
    Ok(log.exp())
}

/// Limit of `E(d) / (N^2 log N)` for minimal configurations:
/// `G((d+1)/2) / (2d G(d/2) G(1/2))`.
pub fn limit_constant_s_eq_d(d: usize) -> f64 {
    let df = d as f64;
    let log = lgamma((df + 1.0) / 2.0) - lgamma(df / 2.0) - lgamma(0.5);
    log.exp() / (2.0 * df)
}

/// Bernoulli numbers `B_2, B_4, .., B_12`.
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// `m`-th derivative of `(3x + a)^{-1/2}`.
fn inv_sqrt_derivative(m: u32, x: f64, a: f64) -> f64 {
    let coeff = (0..m).fold(1.0, |c, i| c * (-0.5 - i as f64) * 3.0);
    coeff * (3.0 * x + a).powf(-0.5 - m as f64)
}

/// `sum_{n>=0} (1/sqrt(3n+1) - 1/sqrt(3n+2))`.
///
/// The first `DIRECT` terms are summed directly and the tail is closed with
/// Euler-Maclaurin.
pub fn alternating_root_series() -> f64 {
    const DIRECT: u32 = 200;
    let term = |n: f64| (3.0 * n + 1.0).powf(-0.5) - (3.0 * n + 2.0).powf(-0.5);
    let head: f64 = (0..DIRECT).map(|n| term(n as f64)).sum();
    let m = DIRECT as f64;
    // integral of the term from m to infinity
    let integral = 2.0 / 3.0 * ((3.0 * m + 2.0).sqrt() - (3.0 * m + 1.0).sqrt());
    let mut tail = integral + 0.5 * term(m);
    let mut factorial = 1.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let order = 2 * k as u32 + 2;
        factorial *= (order - 1) as f64 * order as f64;
        let deriv = inv_sqrt_derivative(order - 1, m, 1.0) - inv_sqrt_derivative(order - 1, m, 2.0);
        tail -= b / factorial * deriv;
    }
    head + tail
}

/// The conjectured limit of `R_{N,s,2} / N^{1+s/2}`:
/// `-3 (sqrt3 / (8 pi))^{1/2} zeta(1/2) sum_n (1/sqrt(3n+1) - 1/sqrt(3n+2))`.
pub fn conjectured_r_constant() -> f64 {
    -3.0 * (3f64.sqrt() / (8.0 * PI)).sqrt() * ZETA_HALF * alternating_root_series()
}

/// Leading coefficient of the best-packing distance on `S^2`:
/// `delta_N ~ (8 pi / sqrt3)^{1/2} N^{-1/2}`.
pub fn packing_constant_s2() -> f64 {
    (8.0 * PI / 3f64.sqrt()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dirichlet eta by the Cohen-Villegas-Zagier acceleration of the
    /// alternating series, then `zeta = eta / (1 - 2^{1-s})`.
    fn zeta_by_eta(s: f64) -> f64 {
        let n = 40;
        let d0 = (3.0 + 8f64.sqrt()).powi(n);
        let d = (d0 + 1.0 / d0) / 2.0;
        let mut b = -1.0;
        let mut c = -d;
        let mut sum = 0.0;
        for k in 0..n {
            c = b - c;
            sum += c / ((k + 1) as f64).powf(s);
            b *= (k + n) as f64 * (k - n) as f64 / ((k as f64 + 0.5) * (k + 1) as f64);
        }
        let eta = sum / d;
        eta / (1.0 - 2f64.powf(1.0 - s))
    }

    /// Plain partial sums.
    fn series_brute_force(terms: usize) -> f64 {
        let term = |n: usize| {
            let n = n as f64;
            (3.0 * n + 1.0).powf(-0.5) - (3.0 * n + 2.0).powf(-0.5)
        };
        (0..terms).map(term).sum::<f64>()
    }

    #[test]
    fn zeta_half() {
        assert!((zeta_by_eta(0.5) - ZETA_HALF).abs() < 1e-10);
        assert!((zeta_by_eta(2.0) - PI * PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn integral_constants() {
        assert!((energy_integral_constant(1.0, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((energy_integral_constant(2.0, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!((energy_integral_constant(1e-12, 2).unwrap() - 1.0).abs() < 1e-9);
        assert!(energy_integral_constant(2.0, 2).is_err());
        assert!(energy_integral_constant(0.0, 2).is_err());
        let near = energy_integral_constant(3.0 - 1e-6, 3).unwrap();
        assert!(near.is_finite() && near > 1e5);
    }

    #[test]
    fn integral_on_circle_matches_quadrature() {
        // (1/pi) int_0^pi (2 sin u)^{-1/2} du, with u = v^2 removing the
        // endpoint singularity; symmetric about pi/2.
        let s = 0.5;
        let upper = (PI / 2.0).sqrt();
        let f = |v: f64| {
            if v == 0.0 {
                2.0 * 2f64.powf(-s)
            } else {
                (2.0 * (v * v).sin()).powf(-s) * 2.0 * v
            }
        };
        let steps = 20_000;
        let h = upper / steps as f64;
        let mut acc = f(0.0) + f(upper);
        for k in 1..steps {
            acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let quad = 2.0 / PI * acc * h / 3.0;
        let closed = energy_integral_constant(s, 1).unwrap();
        assert!((quad - closed).abs() < 1e-6, "{quad} vs {closed}");
    }

    #[test]
    fn limit_constants() {
        assert!((limit_constant_s_eq_d(2) - 0.125).abs() < 1e-12);
        assert!((limit_constant_s_eq_d(3) - 1.0 / (3.0 * PI)).abs() < 1e-12);
        assert!((limit_constant_s_eq_d(1) - 1.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn root_series() {
        let first = 1.0 - 0.5f64.sqrt();
        assert!((series_brute_force(1) - first).abs() < 1e-16);
        // partial sums have a c/sqrt(N) tail; one Richardson step removes it
        let n = 100_000;
        let richardson = 2.0 * series_brute_force(4 * n) - series_brute_force(n);
        assert!((alternating_root_series() - richardson).abs() < 1e-9);
        let c = conjectured_r_constant();
        assert!((c - 0.55305).abs() < 5e-5, "{c}");
    }

    #[test]
    fn packing() {
        assert!((packing_constant_s2() - 3.809).abs() < 1e-3);
    }
}
