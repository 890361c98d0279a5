//! Small dense least-squares fitters: a three-parameter Gaussian peak fit
//! (Levenberg–Marquardt with analytic Jacobian) and straight-line
//! regression with slope standard error.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct GaussianPeakFit {
    pub amplitude: f64,
    pub center: f64,
    pub sigma: f64,
    pub rss: f64,
    pub iterations: usize,
}

impl GaussianPeakFit {
    /// Integrated mass `A * sigma * sqrt(2 pi)` of the fitted peak.
    pub fn mass(&self) -> f64 {
        self.amplitude * self.sigma * (2.0 * std::f64::consts::PI).sqrt()
    }
}

/// Fit `A exp(-(x-m)^2 / 2 s^2)` to `(xs, ys)` by Levenberg–Marquardt.
pub fn fit_gaussian_peak(xs: &[f64], ys: &[f64], init: (f64, f64, f64)) -> Result<GaussianPeakFit> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 4 {
        return Err(Error::NotEnoughPoints { need: 4, got: xs.len() });
    }
    let n = xs.len();
    let (mut a, mut m, mut s) = init;
    s = s.abs().max(1e-300);

    let rss_of = |a: f64, m: f64, s: f64| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let e = (-((x - m) * (x - m)) / (2.0 * s * s)).exp();
                let r = y - a * e;
                r * r
            })
            .sum()
    };

    let mut lambda = 1e-3;
    let mut rss = rss_of(a, m, s);
    let max_iter = 200;
    for it in 0..max_iter {
        // normal equations J^T J and J^T r
        let mut jtj = DMatrix::<f64>::zeros(3, 3);
        let mut jtr = DVector::<f64>::zeros(3);
        for i in 0..n {
            let dx = xs[i] - m;
            let e = (-dx * dx / (2.0 * s * s)).exp();
            let r = ys[i] - a * e;
            let j = [e, a * e * dx / (s * s), a * e * dx * dx / (s * s * s)];
            for p in 0..3 {
                jtr[p] += j[p] * r;
                for q in 0..3 {
                    jtj[(p, q)] += j[p] * j[q];
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut lhs = jtj.clone();
            for p in 0..3 {
                lhs[(p, p)] += lambda * jtj[(p, p)].max(1e-30);
            }
            let Some(step) = lhs.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let (na, nm, ns) = (a + step[0], m + step[1], s + step[2]);
            let new_rss = rss_of(na, nm, ns.abs().max(1e-300));
            if new_rss.is_finite() && new_rss <= rss {
                let small = step.amax() <= 1e-13 * (a.abs() + m.abs() + s.abs()).max(1.0);
                a = na;
                m = nm;
                s = ns.abs();
                let rel_drop = (rss - new_rss) / rss.max(1e-300);
                rss = new_rss;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if small || rel_drop < 1e-15 {
                    return Ok(GaussianPeakFit { amplitude: a, center: m, sigma: s, rss, iterations: it + 1 });
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !improved {
            // stuck: accept current point if the residual is already tiny
            return Ok(GaussianPeakFit { amplitude: a, center: m, sigma: s, rss, iterations: it + 1 });
        }
    }
    Err(Error::FitDiverged(max_iter))
}

#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return Err(Error::NotEnoughPoints { need: 2, got: n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - slope * x - intercept;
                r * r
            })
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit { slope, intercept, slope_stderr: stderr })
}

/// Log–log power-law fit of `|ys|` against `xs` (both must be positive).
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.abs().ln()).collect();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_gaussian() {
        let xs: Vec<f64> = (0..201).map(|i| -1.0 + i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 2.5 * (-(x - 0.3f64).powi(2) / (2.0 * 0.04)).exp()).collect();
        let fit = fit_gaussian_peak(&xs, &ys, (2.0, 0.25, 0.25)).unwrap();
        assert_relative_eq!(fit.amplitude, 2.5, epsilon = 1e-9);
        assert_relative_eq!(fit.center, 0.3, epsilon = 1e-10);
        assert_relative_eq!(fit.sigma, 0.2, epsilon = 1e-9);
    }

    #[test]
    fn line_fit_with_stderr() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [2.1, 3.9, 6.1, 7.9, 10.1];
        let fit = fit_line(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 2.0, epsilon = 0.05);
        assert!(fit.slope_stderr > 0.0 && fit.slope_stderr < 0.1);
    }

    #[test]
    fn power_law_slope() {
        let xs: Vec<f64> = (1..=20).map(|i| i as f64 * 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.powf(-0.5)).collect();
        let fit = fit_power_law(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, -0.5, epsilon = 1e-12);
    }
}
