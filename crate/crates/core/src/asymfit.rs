//! Quantitative verification of the two-step asymptotics: log–log decay
//! fits for the approach to the steady state, Gaussian-mixture fits for
//! the strong-coupling regime, and the tail integrals of heavy initial
//! distributions.
//!
//! The two relaxation mechanisms separate by reflection symmetry, and the
//! mixture fits exploit that: center and width shifts (drift mechanism,
//! `(βt)^{-1}`) are measured on the `W`-symmetrized density against the
//! steady-density baseline, while the coefficient asymmetry (exchange
//! mechanism, `(βt)^{-1/2}`) is measured on the raw density.

use crate::exact1d::{expectation_1d, steady_expectation_1d, Density1d, Initial1d};
use crate::numerics::fit::{fit_gaussian_peak, fit_line, LineFit};
use crate::potential::{peak_set, tolerance_radius};
use crate::simulate::DensityEstimate;
use crate::{Error, Result, RootSystem, Vector};

/// Default tolerance parameter used when a fit needs `r(δ)`.
pub const DEFAULT_DELTA: f64 = 1e-3;
/// Deviations below this are treated as numerically lost.
pub const DEVIATION_FLOOR: f64 = 1e-12;

/// Log–log fit of `|⟨φ⟩_t / ⟨φ⟩ - 1|` against `t`.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Whether each time lies inside the decay law's validity window;
    /// those points enter the fit.
    pub in_window: Vec<bool>,
    pub window_floor: f64,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

/// `t` must exceed `x0² max(1/βγr², βγr²)` for the first-order decay law;
/// `r = r(δ)` is the tolerance radius.
pub fn decay_window_floor(rs: &RootSystem, beta: f64, x0_norm: f64, delta: f64) -> Result<f64> {
    let r = tolerance_radius(rs, beta, delta)?;
    let bgr2 = beta * rs.gamma() * r * r;
    Ok(x0_norm * x0_norm * bgr2.max(1.0 / bgr2))
}

/// Fit the decay exponent on the points inside the validity window.
pub fn steady_decay_fit(times: &[f64], deviations: &[f64], window_floor: f64) -> Result<DecayFit> {
    assert_eq!(times.len(), deviations.len());
    if deviations.iter().any(|d| d.abs() < DEVIATION_FLOOR) {
        return Err(Error::SignalLost(DEVIATION_FLOOR));
    }
    let in_window: Vec<bool> = times.iter().map(|&t| t >= window_floor).collect();
    let xs: Vec<f64> = times
        .iter()
        .zip(&in_window)
        .filter(|(_, &w)| w)
        .map(|(&t, _)| t.ln())
        .collect();
    let ys: Vec<f64> = deviations
        .iter()
        .zip(&in_window)
        .filter(|(_, &w)| w)
        .map(|(&d, _)| d.abs().ln())
        .collect();
    if xs.len() < 4 {
        return Err(Error::NotEnoughPoints { need: 4, got: xs.len() });
    }
    let span = (xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min))
        / std::f64::consts::LN_10;
    if span < 1.5 {
        return Err(Error::InsufficientDecadeSpan { need: 1.5, got: span });
    }
    let line = fit_line(&xs, &ys)?;
    Ok(DecayFit {
        times: times.to_vec(),
        deviations: deviations.to_vec(),
        in_window,
        window_floor,
        slope: line.slope,
        slope_stderr: line.slope_stderr,
        intercept: line.intercept,
    })
}

/// Deviation series `|⟨φ⟩_t / ⟨φ⟩ - 1|` from exact 1-d quadrature.
pub fn exact_decay_series<F>(phi: F, initial: &Initial1d, beta: f64, times: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let steady = steady_expectation_1d(&phi, beta)?;
    times
        .iter()
        .map(|&t| Ok((expectation_1d(&phi, t, initial, beta)? / steady - 1.0).abs()))
        .collect()
}

/// Exact-source decay fit on the rank-one system.
pub fn exact_steady_decay_fit<F>(
    phi: F,
    initial: &Initial1d,
    beta: f64,
    times: &[f64],
) -> Result<DecayFit>
where
    F: Fn(f64) -> f64,
{
    let deviations = exact_decay_series(&phi, initial, beta, times)?;
    let rs = RootSystem::b1();
    let floor = decay_window_floor(&rs, beta, initial.max_abs_position(), DEFAULT_DELTA)?;
    steady_decay_fit(times, &deviations, floor)
}

/// Monte-Carlo-source decay fit: deviations of a sample-mean observable
/// from its steady value, with path-bootstrap standard errors.
pub fn mc_decay_series<F>(
    estimates: &[DensityEstimate],
    phi: F,
    steady_value: f64,
    bootstrap_resamples: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let mut devs = Vec::with_capacity(estimates.len());
    let mut errs = Vec::with_capacity(estimates.len());
    for est in estimates {
        let per_path: Vec<f64> = (0..est.n_samples)
            .map(|i| phi(&est.samples[i * est.dim..(i + 1) * est.dim]))
            .collect();
        let (mean, se) = crate::numerics::stats::bootstrap(
            &per_path,
            bootstrap_resamples,
            seed,
            crate::numerics::stats::mean,
        );
        devs.push((mean - steady_value).abs());
        errs.push(se);
    }
    (devs, errs)
}

/// One fitted Gaussian peak of a rank-one scaled density.
#[derive(Debug, Clone, Copy)]
pub struct PeakFitResult {
    pub center: f64,
    pub sigma: f64,
    pub amplitude: f64,
    pub mass: f64,
}

/// Strong-coupling finite-time predictions specialized to rank one.
#[derive(Debug, Clone)]
pub struct TildePrediction {
    pub centers: [f64; 2],
    pub sigma: f64,
    pub coefficients: [f64; 2],
}

pub fn tilde_prediction_b1(beta: f64, t: f64, x0: f64) -> TildePrediction {
    let bt = beta * t;
    let s = 1.0 + x0 * x0 / (2.0 * bt);
    let sigma = ((1.0 + x0 * x0 / bt) / (2.0 * beta)).sqrt();
    let a = x0 / bt.sqrt();
    TildePrediction { centers: [s, -s], sigma, coefficients: [1.0 + a, 1.0 - a] }
}

/// Per-peak nonlinear least-squares fit of a rank-one density against the
/// two-Gaussian model, on windows of half-width `4/sqrt(β λ_min)` around
/// the predicted centers.
#[derive(Debug, Clone)]
pub struct MixtureFit {
    pub beta: f64,
    pub t: f64,
    pub x0: f64,
    /// Fitted positive / negative peaks.
    pub peaks: [PeakFitResult; 2],
    /// Fitted masses normalized to orbit average 1.
    pub coefficients: [f64; 2],
    pub predicted: TildePrediction,
    /// Relative discrepancies (center, sigma, coefficient) per peak.
    pub discrepancies: [[f64; 3]; 2],
}

/// Fit both peaks of a rank-one density evaluator.
pub fn freeze_fit<F>(density: F, beta: f64, t: f64, x0: f64) -> Result<MixtureFit>
where
    F: Fn(f64) -> f64,
{
    let pred = tilde_prediction_b1(beta, t, x0);
    let lambda_min = 2.0; // F''(±1) for the rank-one potential
    let hw = 4.0 / (beta * lambda_min).sqrt();
    if pred.centers[0] - hw <= 0.0 {
        return Err(Error::PeaksUnresolved);
    }
    let mut peaks = [PeakFitResult { center: 0.0, sigma: 0.0, amplitude: 0.0, mass: 0.0 }; 2];
    for (i, &c0) in pred.centers.iter().enumerate() {
        peaks[i] = fit_single_peak(&density, c0, hw, pred.sigma)?;
    }
    let mean_mass = 0.5 * (peaks[0].mass + peaks[1].mass);
    let coefficients = [peaks[0].mass / mean_mass, peaks[1].mass / mean_mass];
    let mut discrepancies = [[0.0; 3]; 2];
    for i in 0..2 {
        discrepancies[i] = [
            (peaks[i].center - pred.centers[i]).abs() / pred.centers[i].abs(),
            (peaks[i].sigma - pred.sigma).abs() / pred.sigma,
            (coefficients[i] - pred.coefficients[i]).abs() / pred.coefficients[i],
        ];
    }
    Ok(MixtureFit { beta, t, x0, peaks, coefficients, predicted: pred, discrepancies })
}

fn fit_single_peak<F>(density: &F, center: f64, hw: f64, sigma0: f64) -> Result<PeakFitResult>
where
    F: Fn(f64) -> f64,
{
    const NPT: usize = 201;
    let xs: Vec<f64> = (0..NPT)
        .map(|i| center - hw + 2.0 * hw * i as f64 / (NPT - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| density(x)).collect();
    let a0 = ys.iter().cloned().fold(0.0f64, f64::max);
    let fit = fit_gaussian_peak(&xs, &ys, (a0, center, sigma0))?;
    Ok(PeakFitResult {
        center: fit.center,
        sigma: fit.sigma,
        amplitude: fit.amplitude,
        mass: fit.mass(),
    })
}

/// The three shift observables of one `(β, t)` grid cell.
#[derive(Debug, Clone, Copy)]
pub struct FreezeCell {
    pub beta: f64,
    pub t: f64,
    /// `|center(t) - center(∞)|` on the symmetrized density.
    pub center_shift: f64,
    /// `|σ²(t) - σ²(∞)| / σ²(∞)` on the symmetrized density.
    pub variance_shift: f64,
    /// `(c_+ - c_-)/(c_+ + c_-)` on the raw density.
    pub coeff_asymmetry: f64,
}

/// Build one grid cell from exact rank-one densities.
pub fn freeze_cell_exact_b1(beta: f64, t: f64, x0: f64) -> Result<FreezeCell> {
    let raw = Density1d::scaled(t, Initial1d::Point(x0), beta)?;
    let sym = Density1d::scaled(t, Initial1d::symmetrized(x0), beta)?;
    let steady = Density1d::steady(beta)?;

    let fit_raw = freeze_fit(|y| raw.eval(y), beta, t, x0)?;
    let lambda_min = 2.0;
    let hw = 4.0 / (beta * lambda_min).sqrt();
    let sigma0 = (2.0 * beta).recip().sqrt();
    let sym_peak = fit_single_peak(&|y| sym.eval(y), 1.0 + x0 * x0 / (2.0 * beta * t), hw, sigma0)?;
    let steady_peak = fit_single_peak(&|y| steady.eval(y), 1.0, hw, sigma0)?;

    Ok(FreezeCell {
        beta,
        t,
        center_shift: (sym_peak.center - steady_peak.center).abs(),
        variance_shift: (sym_peak.sigma.powi(2) - steady_peak.sigma.powi(2)).abs()
            / steady_peak.sigma.powi(2),
        coeff_asymmetry: (fit_raw.coefficients[0] - fit_raw.coefficients[1])
            / (fit_raw.coefficients[0] + fit_raw.coefficients[1]),
    })
}

/// Exponent fits in `βt` for the three shift observables.
#[derive(Debug, Clone)]
pub struct MechanismSplit {
    pub cells: Vec<FreezeCell>,
    pub center_exponent: LineFit,
    pub variance_exponent: LineFit,
    pub asymmetry_exponent: LineFit,
}

/// Fit power laws in `βt` separately for the center shift (expected
/// exponent -1), variance shift (-1) and coefficient asymmetry (-1/2).
pub fn mechanism_split(cells: &[FreezeCell]) -> Result<MechanismSplit> {
    if cells.len() < 3 {
        return Err(Error::NotEnoughPoints { need: 3, got: cells.len() });
    }
    let xs: Vec<f64> = cells.iter().map(|c| (c.beta * c.t).ln()).collect();
    let fit_of = |get: &dyn Fn(&FreezeCell) -> f64| -> Result<LineFit> {
        let ys: Vec<f64> = cells.iter().map(|c| get(c).abs().max(1e-300).ln()).collect();
        fit_line(&xs, &ys)
    };
    Ok(MechanismSplit {
        cells: cells.to_vec(),
        center_exponent: fit_of(&|c| c.center_shift)?,
        variance_exponent: fit_of(&|c| c.variance_shift)?,
        asymmetry_exponent: fit_of(&|c| c.coeff_asymmetry)?,
    })
}

/// Least-squares amplitude of the predicted per-peak mass pattern
/// `m_i/m̄ - 1 ≈ λ (d_R/γ)(x0·s_i)`, estimated from Voronoi peak masses of
/// a scaled Monte Carlo ensemble; `λ ≈ 1/sqrt(βt)` under the
/// strong-coupling correction law.
pub fn peak_mass_asymmetry(
    est: &DensityEstimate,
    rs: &RootSystem,
    x0: &Vector,
) -> Result<f64> {
    let peaks = peak_set(rs)?;
    let k = peaks.len();
    let mut masses = vec![0.0f64; k];
    for i in 0..est.n_samples {
        let y = &est.samples[i * est.dim..(i + 1) * est.dim];
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (j, s) in peaks.points.iter().enumerate() {
            let mut d = 0.0;
            for (a, &b) in y.iter().zip(s.iter()) {
                d += (a - b) * (a - b);
            }
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        masses[best] += 1.0;
    }
    let mean_mass = masses.iter().sum::<f64>() / k as f64;
    let pattern: Vec<f64> = peaks
        .points
        .iter()
        .map(|s| rs.rank() as f64 / rs.gamma() * x0.dot(s))
        .collect();
    let num: f64 = masses
        .iter()
        .zip(&pattern)
        .map(|(&m, &u)| (m / mean_mass - 1.0) * u)
        .sum();
    let den: f64 = pattern.iter().map(|&u| u * u).sum();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// Tail families of Table 1 for heavy-tailed initial distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailFamily {
    /// `τ(x) = 0` for `x ≥ C`.
    Cutoff,
    /// `τ(x) = exp(-(x/l)^ξ)`, `l, ξ > 0`.
    StretchedExp { scale: f64, exponent: f64 },
    /// `τ(x) = x^{-(1+ζ)}`, `ζ > 0`.
    Power { zeta: f64 },
}

/// The tail integral `T(C) = ∫_C^∞ τ(x) dx` of each family: 0 for the
/// cutoff, `(l/ξ)(l/C)^{ξ-1} e^{-(C/l)^ξ}` for the stretched exponential
/// (large `C/l`), `C^{-ζ}/ζ` for the power law.
pub fn tail_integral(family: TailFamily, c: f64) -> Result<f64> {
    if c <= 0.0 {
        return Err(Error::InvalidTailParameter(format!("C must be positive, got {c}")));
    }
    match family {
        TailFamily::Cutoff => Ok(0.0),
        TailFamily::StretchedExp { scale, exponent } => {
            if scale <= 0.0 || exponent <= 0.0 {
                return Err(Error::InvalidTailParameter(format!(
                    "stretched-exp requires l, xi > 0; got l = {scale}, xi = {exponent}"
                )));
            }
            Ok(scale / exponent
                * (scale / c).powf(exponent - 1.0)
                * (-(c / scale).powf(exponent)).exp())
        }
        TailFamily::Power { zeta } => {
            if zeta <= 0.0 {
                return Err(Error::InvalidTailParameter(format!("power tail requires zeta > 0, got {zeta}")));
            }
            Ok(c.powf(-zeta) / zeta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_decay_slope_is_minus_half() {
        // times start above the validity-window floor (~25 at beta = 1, x0 = 2)
        let times = [100.0, 1000.0, 10_000.0, 100_000.0];
        let fit = exact_steady_decay_fit(|y| y + 1.0, &Initial1d::Point(2.0), 1.0, &times).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.02, "slope {}", fit.slope);
        // exact law 2/sqrt(t): intercept e^b = 2
        assert_relative_eq!(fit.intercept.exp(), 2.0, max_relative = 1e-4);
    }

    #[test]
    fn symmetrized_quadratic_slope_is_minus_one() {
        let times = [100.0, 500.0, 2500.0, 12_500.0];
        let fit =
            exact_steady_decay_fit(|y| y * y, &Initial1d::symmetrized(2.0), 1.0, &times).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.15, "slope {}", fit.slope);
    }

    #[test]
    fn window_metadata_filters_early_times() {
        let rs = RootSystem::b1();
        let floor = decay_window_floor(&rs, 1.0, 2.0, DEFAULT_DELTA).unwrap();
        assert!(floor > 1.0 && floor < 100.0, "floor {floor}");
        let times = [floor * 0.5, floor * 2.0, floor * 8.0, floor * 32.0, floor * 128.0, floor * 512.0];
        let devs = exact_decay_series(|y| y + 1.0, &Initial1d::Point(2.0), 1.0, &times).unwrap();
        let fit = steady_decay_fit(&times, &devs, floor).unwrap();
        assert!(!fit.in_window[0]);
        assert!(fit.in_window[1..].iter().all(|&w| w));
    }

    #[test]
    fn exponent_robust_to_fit_window() {
        let base: Vec<f64> = (0..5).map(|i| 100.0 * 10.0f64.powf(i as f64 * 0.5)).collect();
        let shifted: Vec<f64> = base.iter().map(|t| t * 10.0).collect();
        let a = exact_steady_decay_fit(|y| y + 1.0, &Initial1d::Point(2.0), 1.0, &base).unwrap();
        let b = exact_steady_decay_fit(|y| y + 1.0, &Initial1d::Point(2.0), 1.0, &shifted).unwrap();
        assert!((a.slope - b.slope).abs() < 0.05, "{} vs {}", a.slope, b.slope);
    }

    #[test]
    fn signal_floor_detected() {
        let times = [10.0, 100.0, 1000.0, 10000.0];
        let devs = [1e-3, 1e-13, 1e-4, 1e-5];
        assert!(matches!(
            steady_decay_fit(&times, &devs, 0.0),
            Err(Error::SignalLost(_))
        ));
    }

    #[test]
    fn freeze_fit_recovers_its_own_generator() {
        // fitting the model to a synthetic two-Gaussian density returns the
        // parameters at machine precision
        let (beta, t, x0) = (100.0, 10.0, 2.0);
        let pred = tilde_prediction_b1(beta, t, x0);
        let model = move |y: f64| {
            let norm = |c: f64, m: f64| {
                c / (pred.sigma * (2.0 * std::f64::consts::PI).sqrt())
                    * (-(y - m) * (y - m) / (2.0 * pred.sigma * pred.sigma)).exp()
            };
            0.5 * (norm(pred.coefficients[0], pred.centers[0])
                + norm(pred.coefficients[1], pred.centers[1]))
        };
        let fit = freeze_fit(model, beta, t, x0).unwrap();
        for i in 0..2 {
            assert_relative_eq!(fit.peaks[i].center, pred.centers[i], epsilon = 1e-10);
            assert_relative_eq!(fit.peaks[i].sigma, pred.sigma, epsilon = 1e-10);
            assert_relative_eq!(fit.coefficients[i], pred.coefficients[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn freeze_fit_exact_density_at_benchmark_point() {
        let (beta, t, x0) = (100.0, 10.0, 2.0);
        let raw = Density1d::scaled(t, Initial1d::Point(x0), beta).unwrap();
        let fit = freeze_fit(|y| raw.eval(y), beta, t, x0).unwrap();
        let a = 2.0 / 1000.0f64.sqrt();
        assert!((fit.coefficients[0] - (1.0 + a)).abs() < 1e-3, "c+ {}", fit.coefficients[0]);
        assert!((fit.coefficients[1] - (1.0 - a)).abs() < 1e-3, "c- {}", fit.coefficients[1]);
        let var_pred = (1.0 + 4.0 / 1000.0) / (2.0 * beta);
        assert!((fit.peaks[0].sigma.powi(2) - var_pred).abs() < 2e-4);
        // the drift-mechanism center shift is read against the steady
        // baseline, which cancels the O(1/β) shape bias of the fitter
        let cell = freeze_cell_exact_b1(beta, t, x0).unwrap();
        assert!((1.0 + cell.center_shift - 1.002).abs() < 1e-3, "center {}", 1.0 + cell.center_shift);
        assert!((cell.coeff_asymmetry - a).abs() < 1e-3);
    }

    #[test]
    fn coefficient_asymmetry_nearly_gone_at_beta_5000() {
        // the amplitudes of the two peaks become almost equal:
        // asymmetry 2/sqrt(50000) ~ 0.0089 at t = 10
        let cell = freeze_cell_exact_b1(5000.0, 10.0, 2.0).unwrap();
        let predicted = 2.0 / 50_000.0f64.sqrt();
        assert!(
            (cell.coeff_asymmetry - predicted).abs() < 0.1 * predicted,
            "asymmetry {} vs {predicted}",
            cell.coeff_asymmetry
        );
        assert!(cell.coeff_asymmetry < 0.01);
    }

    #[test]
    fn freeze_fit_x0_zero_matches_predictions() {
        let (beta, t) = (200.0, 5.0);
        let raw = Density1d::scaled(t, Initial1d::Point(0.0), beta).unwrap();
        let fit = freeze_fit(|y| raw.eval(y), beta, t, 0.0).unwrap();
        for i in 0..2 {
            // no perturbation: discrepancies at the fit-tolerance scale
            assert!(fit.discrepancies[i][2] < 1e-6, "coefficient discrepancy");
        }
        assert_relative_eq!(fit.coefficients[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn unresolved_peaks_rejected() {
        let raw = Density1d::scaled(1.0, Initial1d::Point(0.5), 2.0).unwrap();
        // β = 2 gives window half-width 2 > center 1: unresolved
        assert!(matches!(
            freeze_fit(|y| raw.eval(y), 2.0, 1.0, 0.5),
            Err(Error::PeaksUnresolved)
        ));
    }

    #[test]
    fn mechanism_split_needs_a_grid() {
        let cell = freeze_cell_exact_b1(100.0, 10.0, 2.0).unwrap();
        assert!(matches!(mechanism_split(&[cell]), Err(Error::NotEnoughPoints { .. })));
    }

    #[test]
    fn tail_integrals_match_table() {
        assert_eq!(tail_integral(TailFamily::Cutoff, 3.0).unwrap(), 0.0);
        assert_relative_eq!(
            tail_integral(TailFamily::Power { zeta: 2.0 }, 10.0).unwrap(),
            0.005,
            epsilon = 1e-15
        );
        // ξ = 1, l = 1 reduces to the plain exponential tail
        let t = tail_integral(TailFamily::StretchedExp { scale: 1.0, exponent: 1.0 }, 4.0).unwrap();
        let quad = crate::numerics::quad::integrate(|x| (-x).exp(), 4.0, 60.0).unwrap();
        assert_relative_eq!(t, quad, epsilon = 1e-10);
    }

    #[test]
    fn tail_integral_rejects_bad_parameters() {
        assert!(tail_integral(TailFamily::Power { zeta: -1.0 }, 2.0).is_err());
        assert!(tail_integral(TailFamily::StretchedExp { scale: 0.0, exponent: 1.0 }, 2.0).is_err());
        assert!(tail_integral(TailFamily::Cutoff, -1.0).is_err());
    }
}
