//! Log-gamma, the modified Bessel function of the first kind in log space,
//! and the standard normal CDF.
//!
//! Everything here works on logarithms because the densities carry factors
//! like `|y|^beta` with `beta` up to several thousand, which overflow `f64`
//! long before the normalized quantities do.

use crate::{Error, Result};

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Relative accuracy target for the power-series branch.
const SERIES_EPS: f64 = 1e-17;
/// Relative accuracy target for the asymptotic branch.
const ASYMPTOTIC_EPS: f64 = 1e-13;

/// `ln I_nu(z)` for `nu >= -1/2` and `z >= 0`.
///
/// Power series below `z = 20 + nu`, large-argument asymptotic expansion
/// above. The series has all-positive terms, so it stays accurate at any
/// argument; it is also the fallback whenever the asymptotic expansion
/// cannot reach its accuracy target (moderate `z` with large `nu`).
pub fn ln_bessel_i(nu: f64, z: f64) -> Result<f64> {
    if nu < -0.5 {
        return Err(Error::BesselOrderUnsupported(nu));
    }
    if z < 0.0 || z.is_nan() {
        return Err(Error::BesselOrderUnsupported(z));
    }
    if z == 0.0 {
        // I_0(0) = 1; I_nu(0) = 0 for nu > 0; diverges for nu in (-1/2, 0).
        return Ok(if nu == 0.0 {
            0.0
        } else if nu > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
    }
    if z >= 20.0 + nu {
        if let Some(v) = ln_bessel_i_asymptotic(nu, z) {
            return Ok(v);
        }
    }
    Ok(ln_bessel_i_series(nu, z))
}

/// Convenience wrapper returning `I_nu(z)` itself; overflows to `inf` for
/// large arguments, which is why the log form is used internally.
pub fn bessel_i(nu: f64, z: f64) -> Result<f64> {
    Ok(ln_bessel_i(nu, z)?.exp())
}

fn ln_bessel_i_series(nu: f64, z: f64) -> f64 {
    let q = z * z / 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut log_scale = 0.0f64;
    let mut m = 0usize;
    loop {
        m += 1;
        term *= q / (m as f64 * (nu + m as f64));
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_scale += 250.0 * std::f64::consts::LN_10;
        }
        if term < SERIES_EPS * sum {
            break;
        }
        // ~z/2 terms suffice for any z the callers produce; this is a guard.
        if m > 200_000 {
            break;
        }
    }
    nu * (z / 2.0).ln() - ln_gamma(nu + 1.0) + sum.ln() + log_scale
}

/// Hankel expansion `I_nu(z) ~ e^z/sqrt(2 pi z) * sum_k (-1)^k a_k(nu)/z^k`.
/// Returns `None` when the asymptotic terms start growing before reaching
/// the accuracy target.
fn ln_bessel_i_asymptotic(nu: f64, z: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (8.0 * kf * z);
        if term.abs() >= prev {
            return None;
        }
        prev = term.abs();
        sum += term;
        if term.abs() < ASYMPTOTIC_EPS * sum.abs() {
            if sum <= 0.0 {
                return None;
            }
            return Some(z - 0.5 * (2.0 * std::f64::consts::PI * z).ln() + sum.ln());
        }
    }
    None
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `log(exp(a) - exp(b))` for `a > b`; `-inf` when the difference underflows.
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    debug_assert!(a >= b);
    let d = -(b - a).exp_m1(); // 1 - exp(b - a) in (0, 1]
    if d <= 0.0 {
        f64::NEG_INFINITY
    } else {
        a + d.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn i_half_exact(z: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sinh()
    }

    #[test]
    fn i_half_closed_form() {
        for &z in &[0.5, 5.0, 50.0] {
            let got = ln_bessel_i(0.5, z).unwrap();
            assert_relative_eq!(got, i_half_exact(z).ln(), max_relative = 1e-12);
        }
    }

    #[test]
    fn vanishes_at_origin_for_positive_order() {
        assert_eq!(bessel_i(2.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn recurrence_consistency() {
        // I_{nu-1}(z) - I_{nu+1}(z) = (2 nu / z) I_nu(z)
        for &(nu, z) in &[(1.0, 0.7), (2.5, 8.0), (7.0, 30.0), (0.5, 120.0), (40.0, 55.0)] {
            let lo = bessel_i(nu - 1.0, z).unwrap();
            let hi = bessel_i(nu + 1.0, z).unwrap();
            let mid = bessel_i(nu, z).unwrap();
            assert_relative_eq!(lo - hi, 2.0 * nu / z * mid, max_relative = 1e-9);
        }
    }

    #[test]
    fn series_and_asymptotic_agree_at_crossover() {
        for &nu in &[0.0, 0.5, 1.5, 6.0] {
            let z = 20.0 + nu;
            let series = ln_bessel_i_series(nu, z);
            let asym = ln_bessel_i_asymptotic(nu, z).unwrap();
            assert_relative_eq!(series, asym, max_relative = 1e-10);
        }
    }

    #[test]
    fn huge_order_small_argument() {
        // beta = 5000 regime: nu ~ 2500 with z < 100 stays in the series branch
        // and must not overflow.
        let v = ln_bessel_i(2500.5, 90.0).unwrap();
        assert!(v.is_finite());
        // leading term dominates: nu ln(z/2) - lnGamma(nu+1)
        let lead = 2500.5 * (45.0f64).ln() - ln_gamma(2501.5);
        assert!((v - lead).abs() < 5.0, "v = {v}, lead = {lead}");
    }

    #[test]
    fn large_argument_does_not_overflow_in_log_space() {
        let v = ln_bessel_i(1.0, 900.0).unwrap();
        // I_1(z) ~ e^z / sqrt(2 pi z)
        assert_relative_eq!(v, 900.0 - 0.5 * (2.0 * std::f64::consts::PI * 900.0).ln(), max_relative = 1e-3);
    }

    #[test]
    fn rejects_unsupported_order() {
        assert!(ln_bessel_i(-0.75, 1.0).is_err());
    }

    #[test]
    fn log_add_sub_exp_roundtrip() {
        let a: f64 = -3.0;
        let b: f64 = -5.5;
        assert_relative_eq!(log_add_exp(a, b), (a.exp() + b.exp()).ln(), epsilon = 1e-14);
        assert_relative_eq!(log_sub_exp(a, b), (a.exp() - b.exp()).ln(), epsilon = 1e-14);
    }

    #[test]
    fn normal_cdf_basics() {
        assert_relative_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(normal_cdf(1.959963984540054), 0.975, epsilon = 1e-9);
    }
}
