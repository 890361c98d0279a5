//! The free energy `F_R(Y) = Y²/2 - Σ κ(α) log|α·Y|`, its peak set (the
//! `|W|` minima, all at distance `sqrt(γ)` from the origin), the
//! steady-state density `exp(-β F_R)/z_β`, the tolerance radius `r(δ)`,
//! and the Gaussian mixtures approximating the density at strong coupling.

use std::collections::HashMap;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;

use crate::numerics::quad::{integrate_2d, integrate_opt, QuadOptions};
use crate::numerics::special::{ln_gamma, normal_cdf};
use crate::{Error, Matrix, Result, RootSystem, Vector};

/// Below this distance to a wall the potential is treated as singular.
const WALL_TOL: f64 = 1e-300;

/// `F_R(Y) = Y²/2 - Σ_{α ∈ R_+} κ(α) log|α·Y|`.
pub fn f_r(rs: &RootSystem, y: &Vector) -> Result<f64> {
    let mut v = 0.5 * y.norm_squared();
    for (alpha, k) in rs.positive() {
        let ay = alpha.dot(y);
        if ay.abs() < WALL_TOL {
            if k == 0.0 {
                continue; // degenerate wall carries no log term
            }
            return Err(Error::OnChamberWall(ay.abs()));
        }
        v -= k * ay.abs().ln();
    }
    Ok(v)
}

/// Gradient `(∇F_R)_i = Y_i - Σ κ(α) α_i / (α·Y)`.
pub fn grad_f_r(rs: &RootSystem, y: &Vector) -> Result<Vector> {
    let mut g = y.clone();
    for (alpha, k) in rs.positive() {
        let ay = alpha.dot(y);
        if ay.abs() < WALL_TOL {
            if k == 0.0 {
                continue;
            }
            return Err(Error::OnChamberWall(ay.abs()));
        }
        g -= alpha * (k / ay);
    }
    Ok(g)
}

/// Hessian `H_ij = δ_ij + Σ κ(α) α_i α_j / (α·Y)²`; positive definite off
/// the walls with every eigenvalue at least 1.
pub fn hessian_f_r(rs: &RootSystem, y: &Vector) -> Result<Matrix> {
    let n = rs.ambient_dim();
    let mut h = Matrix::identity(n, n);
    for (alpha, k) in rs.positive() {
        let ay = alpha.dot(y);
        if ay.abs() < WALL_TOL {
            if k == 0.0 {
                continue;
            }
            return Err(Error::OnChamberWall(ay.abs()));
        }
        let w = k / (ay * ay);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] += w * alpha[i] * alpha[j];
            }
        }
    }
    Ok(h)
}

/// The `|W|` minima of `F_R` with their Hessians and span-restricted
/// spectra. Every point satisfies `|s|² = γ`.
#[derive(Debug, Clone)]
pub struct PeakSet {
    pub points: Vec<Vector>,
    pub hessians: Vec<Matrix>,
    /// Eigenvalues of the Hessian restricted to `Span(R)`, ascending;
    /// directions orthogonal to the roots carry bare curvature 1.
    pub eigenvalues: Vec<Vec<f64>>,
    pub f_value: f64,
    pub residuals: Vec<f64>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest span eigenvalue over all peaks (they coincide by symmetry).
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues
            .iter()
            .flat_map(|e| e.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Strictly interior chamber point used to seed the Newton solver:
/// the positive-root sum scaled to the peak shell radius `sqrt(γ)`.
pub fn interior_start(rs: &RootSystem) -> Vector {
    let mut s = Vector::zeros(rs.ambient_dim());
    for (alpha, _) in rs.positive() {
        s += alpha;
    }
    let n = s.norm();
    s * (rs.gamma().sqrt() / n)
}

const PEAK_MAX_ITER: usize = 200;
/// Stop iterating once the span-gradient norm is at the rounding floor.
const PEAK_GRAD_FLOOR: f64 = 1e-14;
/// Residual accepted as converged (the peak-set invariant asks for 1e-10).
const PEAK_GRAD_TOL: f64 = 1e-11;

/// Damped Newton descent of `F_R` restricted to `Span(R)`, followed by the
/// Weyl-orbit expansion of the minimizer.
pub fn peak_set(rs: &RootSystem) -> Result<PeakSet> {
    let basis = Matrix::from_columns(rs.span_basis());
    let d = rs.rank();

    let mut y = interior_start(rs);
    let signs: Vec<f64> = rs.positive_roots().iter().map(|a| a.dot(&y).signum()).collect();
    let mut f_cur = f_r(rs, &y)?;
    let scale = 1.0 + rs.gamma().sqrt();
    for _ in 0..PEAK_MAX_ITER {
        let g = grad_f_r(rs, &y)?;
        let gc = basis.transpose() * &g;
        if gc.norm() < PEAK_GRAD_FLOOR * scale {
            break;
        }
        let h = hessian_f_r(rs, &y)?;
        let hc = basis.transpose() * &h * &basis;
        let step = hc
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&gc))
            .unwrap_or_else(|| gc.clone() / hc.diagonal().amax());
        // backtrack until F decreases and no wall is crossed; a stall here
        // means F differences are at rounding level, i.e. we are done
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &y - &basis * (&step * lambda);
            let same_chamber = rs
                .positive_roots()
                .iter()
                .zip(&signs)
                .all(|(a, &s)| a.dot(&cand) * s > 0.0);
            if same_chamber {
                if let Ok(f_new) = f_r(rs, &cand) {
                    if f_new < f_cur {
                        y = cand;
                        f_cur = f_new;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    // Near the minimum the F-decrease test saturates at rounding level while
    // the gradient is still around 1e-9; polish with plain Newton steps
    // accepted on residual decrease (quadratic contraction in the basin).
    let mut residual = (basis.transpose() * grad_f_r(rs, &y)?).norm();
    for _ in 0..8 {
        if residual < PEAK_GRAD_FLOOR * scale {
            break;
        }
        let gc = basis.transpose() * grad_f_r(rs, &y)?;
        let hc = basis.transpose() * hessian_f_r(rs, &y)? * &basis;
        let Some(step) = hc.cholesky().map(|ch| ch.solve(&gc)) else { break };
        let cand = &y - &basis * step;
        let same_chamber = rs
            .positive_roots()
            .iter()
            .zip(&signs)
            .all(|(a, &s)| a.dot(&cand) * s > 0.0);
        if !same_chamber {
            break;
        }
        let cand_res = match grad_f_r(rs, &cand) {
            Ok(g) => (basis.transpose() * g).norm(),
            Err(_) => break,
        };
        if cand_res >= residual {
            break;
        }
        y = cand;
        residual = cand_res;
    }
    if residual >= PEAK_GRAD_TOL * scale {
        return Err(Error::PeakSolverDiverged { iterations: PEAK_MAX_ITER, residual });
    }

    // orbit under W, deduplicated by hashed rounded coordinates
    let w = rs.weyl_group()?;
    let mut points: Vec<Vector> = Vec::with_capacity(w.order());
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for g in w.elements() {
        let p = g * &y;
        let key: Vec<i64> = p.iter().map(|&x| (x * 1e6).round() as i64).collect();
        let dup = buckets
            .get(&key)
            .map(|idx| idx.iter().any(|&i| (&points[i] - &p).amax() < 1e-6))
            .unwrap_or(false);
        if !dup {
            buckets.entry(key).or_default().push(points.len());
            points.push(p);
        }
    }

    // per-point data; independent work, so fan out over the orbit
    let per_point: Vec<Result<(Matrix, Vec<f64>, f64)>> = points
        .par_iter()
        .map(|p| {
            let h = hessian_f_r(rs, p)?;
            let hc = basis.transpose() * &h * &basis;
            let sym = SymmetricEigen::new((hc.clone() + hc.transpose()) * 0.5);
            let mut eig: Vec<f64> = sym.eigenvalues.iter().copied().collect();
            eig.sort_by(f64::total_cmp);
            debug_assert_eq!(eig.len(), d);
            let r = grad_f_r(rs, p)?.norm();
            Ok((h, eig, r))
        })
        .collect();
    let mut hessians = Vec::with_capacity(points.len());
    let mut eigenvalues = Vec::with_capacity(points.len());
    let mut residuals = Vec::with_capacity(points.len());
    for item in per_point {
        let (h, eig, r) = item?;
        hessians.push(h);
        eigenvalues.push(eig);
        residuals.push(r);
    }
    let f_value = f_r(rs, &points[0])?;
    Ok(PeakSet { points, hessians, eigenvalues, f_value, residuals })
}

/// How `ln z_β` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZBetaRoute {
    /// Gamma-function reduction; rank-one systems only.
    ClosedFormRank1,
    /// Adaptive quadrature over `Span(R)` (rank at most 2), with the
    /// orthogonal directions integrated analytically.
    Quadrature,
    /// Laplace approximation around the peak set,
    /// `z_β ≈ |W| e^{-β F_R(s)} Π_j sqrt(2π / β λ_j)`.
    GaussianApprox,
}

/// `ln z_β` with an automatically chosen route: closed form for rank one,
/// quadrature for rank two, Gaussian approximation beyond.
pub fn ln_z_beta(rs: &RootSystem, beta: f64) -> Result<f64> {
    let route = if rs.rank() == 1 {
        ZBetaRoute::ClosedFormRank1
    } else if rs.rank() == 2 {
        ZBetaRoute::Quadrature
    } else {
        ZBetaRoute::GaussianApprox
    };
    ln_z_beta_via(rs, beta, route)
}

pub fn ln_z_beta_via(rs: &RootSystem, beta: f64, route: ZBetaRoute) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let n = rs.ambient_dim();
    let d = rs.rank();
    let perp_factor = (n - d) as f64 * 0.5 * (2.0 * std::f64::consts::PI / beta).ln();
    match route {
        ZBetaRoute::ClosedFormRank1 => {
            if d != 1 {
                return Err(Error::DimensionMismatch { expected: 1, got: d });
            }
            // single positive root α with multiplicity κ:
            // ∫ e^{-β u²/2} (|α| |u|)^{βκ} du
            //   = |α|^{βκ} 2^{(βκ+1)/2} β^{-(βκ+1)/2} Γ((βκ+1)/2)
            let (alpha, k) = rs.positive().next().expect("rank-one system has a positive root");
            let bk = beta * k;
            let span = bk * alpha.norm().ln()
                + 0.5 * (bk + 1.0) * (2.0f64.ln() - beta.ln())
                + ln_gamma(0.5 * (bk + 1.0));
            Ok(span + perp_factor)
        }
        ZBetaRoute::Quadrature => {
            let peaks = peak_set(rs)?;
            let f_min = peaks.f_value;
            let radius = z_domain_radius(rs, beta);
            let span = match d {
                1 => {
                    let q = integrate_opt(
                        |u| ln_weight_span(rs, beta, f_min, &[u]),
                        -radius,
                        radius,
                        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 },
                    )?;
                    q.value
                }
                2 => integrate_2d(
                    |u, v| ln_weight_span(rs, beta, f_min, &[u, v]),
                    -radius,
                    radius,
                    |_| (-radius, radius),
                    QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 },
                )?,
                _ => return Err(Error::DimensionMismatch { expected: 2, got: d }),
            };
            Ok(span.ln() - beta * f_min + perp_factor)
        }
        ZBetaRoute::GaussianApprox => {
            let peaks = peak_set(rs)?;
            let w_order = peaks.len() as f64;
            let mut acc = w_order.ln() - beta * peaks.f_value
                + n as f64 * 0.5 * (2.0 * std::f64::consts::PI / beta).ln();
            for &l in &peaks.eigenvalues[0] {
                acc -= 0.5 * l.ln();
            }
            Ok(acc)
        }
    }
}

/// `e^{-β (F_R - f_min)}` evaluated in span coordinates; zero on the walls.
fn ln_weight_span(rs: &RootSystem, beta: f64, f_min: f64, coords: &[f64]) -> f64 {
    let y = rs.from_span_coords(&Vector::from_column_slice(coords));
    match f_r(rs, &y) {
        Ok(f) => (-beta * (f - f_min)).exp(),
        Err(_) => 0.0,
    }
}

/// Integration radius covering the Gibbs weight to far below tolerance.
fn z_domain_radius(rs: &RootSystem, beta: f64) -> f64 {
    let g = rs.gamma();
    (g + (rs.rank() as f64 + 80.0) / beta).sqrt() + g.sqrt() + 2.0
}

/// Cached steady-state density `exp(-β F_R(Y)) / z_β`.
#[derive(Debug, Clone)]
pub struct SteadyDensity {
    rs: RootSystem,
    beta: f64,
    ln_z: f64,
}

impl SteadyDensity {
    pub fn new(rs: &RootSystem, beta: f64) -> Result<Self> {
        let ln_z = ln_z_beta(rs, beta)?;
        Ok(SteadyDensity { rs: rs.clone(), beta, ln_z })
    }

    pub fn ln_z(&self) -> f64 {
        self.ln_z
    }

    pub fn ln_eval(&self, y: &Vector) -> Result<f64> {
        Ok(-self.beta * f_r(&self.rs, y)? - self.ln_z)
    }

    /// Density value; zero on chamber walls (continuous limit).
    pub fn eval(&self, y: &Vector) -> f64 {
        match self.ln_eval(y) {
            Ok(l) => l.exp(),
            Err(_) => 0.0,
        }
    }
}

/// One-shot evaluation of the steady density at `Y`.
pub fn steady_density(rs: &RootSystem, beta: f64, y: &Vector) -> Result<f64> {
    Ok(SteadyDensity::new(rs, beta)?.eval(y))
}

/// Sum of Gaussians with the mixture prefactor of the strong-coupling
/// approximation; covers both `G_β` and its finite-time perturbation.
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    pub centers: Vec<Vector>,
    /// Precision matrices `β H̃(s̃_i)` (full ambient dimension).
    pub precision_matrices: Vec<Matrix>,
    pub coefficients: Vec<f64>,
    /// `ln [ β^{N/2} sqrt(det H̃) / ((2π)^{N/2} |W|) ]`.
    pub ln_prefactor: f64,
}

impl GaussianMixture {
    pub fn density(&self, y: &Vector) -> f64 {
        let mut acc = 0.0;
        for ((c, p), &coeff) in self.centers.iter().zip(&self.precision_matrices).zip(&self.coefficients) {
            let r = y - c;
            let q = (p * &r).dot(&r);
            acc += coeff * (-0.5 * q).exp();
        }
        acc * self.ln_prefactor.exp()
    }

    /// Exact integral over `R^N` computed from the mixture parameters.
    pub fn analytic_mass(&self) -> f64 {
        let n = self.centers.first().map(|c| c.len()).unwrap_or(0);
        let mut total = 0.0;
        for (p, &c) in self.precision_matrices.iter().zip(&self.coefficients) {
            let det = p.clone().lu().determinant();
            let ln_comp = n as f64 * 0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln();
            total += c * (self.ln_prefactor + ln_comp).exp();
        }
        total
    }

    /// Mass of component `i` inside the ball of the given radius around its
    /// own center, along the radial direction (1-d Gaussian marginal).
    fn radial_component_mass(&self, i: usize, radius: f64) -> f64 {
        let c = &self.centers[i];
        let dir = c / c.norm();
        let p = &self.precision_matrices[i];
        let cov_rr = p
            .clone()
            .lu()
            .solve(&dir)
            .map(|v| v.dot(&dir))
            .unwrap_or(f64::INFINITY);
        normal_cdf((radius - c.norm()) / cov_rr.sqrt())
    }
}

/// Warnings for requested parameters outside the stated validity windows.
/// Empty when the strong-coupling approximations are trustworthy.
pub fn strong_coupling_warnings(rs: &RootSystem, peaks: &PeakSet, beta: f64) -> Vec<String> {
    let mut w = Vec::new();
    let lam = peaks.lambda_min();
    if beta * lam <= 1.0 {
        w.push(format!(
            "beta*lambda_min = {:.3} <= 1: Gaussian peaks wider than the chamber scale",
            beta * lam
        ));
    }
    if beta <= 10.0 * rs.rank() as f64 / rs.gamma() {
        w.push(format!(
            "beta = {beta} is not large against d_R/gamma = {:.3}",
            rs.rank() as f64 / rs.gamma()
        ));
    }
    w
}

/// Warnings for the finite-time mixture `G̃_β` outside its validity window
/// `β ≫ d_R/γ`, `βt ≫ d_R² x0² r(δ)² / γ` (checked at `δ = 1e-3`).
pub fn gaussian_tilde_warnings(
    rs: &RootSystem,
    peaks: &PeakSet,
    beta: f64,
    t: f64,
    x0: &Vector,
) -> Vec<String> {
    let mut w = strong_coupling_warnings(rs, peaks, beta);
    if let Ok(r) = tolerance_radius(rs, beta, 1e-3) {
        let d = rs.rank() as f64;
        let bound = d * d * x0.norm_squared() * r * r / rs.gamma();
        if beta * t <= 10.0 * bound {
            w.push(format!(
                "beta*t = {:.3} is not large against d_R² x0² r²/gamma = {bound:.3}",
                beta * t
            ));
        }
    }
    w
}

/// `G_β`: Gaussians of precision `β H(s_i)` at the peak set, all
/// coefficients 1; integrates to 1 exactly.
pub fn gaussian_approx(rs: &RootSystem, beta: f64) -> Result<GaussianMixture> {
    let peaks = peak_set(rs)?;
    gaussian_approx_from_peaks(&peaks, beta)
}

pub fn gaussian_approx_from_peaks(peaks: &PeakSet, beta: f64) -> Result<GaussianMixture> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    build_mixture(peaks, beta, 1.0, vec![1.0; peaks.len()])
}

/// `G̃_β` for a point start `x0 ∈ Span(R)`: centers `(1 + x0²/2γβt) s_i`,
/// variances `(1 + x0²/γβt)/(β λ_j)`, coefficients
/// `1 + (d_R/γ)(x0·s_i)/sqrt(βt)`.
pub fn gaussian_tilde(rs: &RootSystem, beta: f64, t: f64, x0: &Vector) -> Result<GaussianMixture> {
    let peaks = peak_set(rs)?;
    gaussian_tilde_from_peaks(rs, &peaks, beta, t, x0)
}

pub fn gaussian_tilde_from_peaks(
    rs: &RootSystem,
    peaks: &PeakSet,
    beta: f64,
    t: f64,
    x0: &Vector,
) -> Result<GaussianMixture> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let perp_res = rs.project_perp(x0).norm();
    if perp_res > 1e-9 {
        return Err(Error::NotInRootSpan(perp_res));
    }
    let g = rs.gamma();
    let x2 = x0.norm_squared();
    let center_scale = 1.0 + x2 / (2.0 * g * beta * t);
    let h_scale = 1.0 / (1.0 + x2 / (g * beta * t));
    let coeffs: Vec<f64> = peaks
        .points
        .iter()
        .map(|s| 1.0 + rs.rank() as f64 / g * x0.dot(s) / (beta * t).sqrt())
        .collect();
    build_mixture_scaled(peaks, beta, center_scale, h_scale, coeffs)
}

fn build_mixture(peaks: &PeakSet, beta: f64, h_scale: f64, coeffs: Vec<f64>) -> Result<GaussianMixture> {
    build_mixture_scaled(peaks, beta, 1.0, h_scale, coeffs)
}

fn build_mixture_scaled(
    peaks: &PeakSet,
    beta: f64,
    center_scale: f64,
    h_scale: f64,
    coeffs: Vec<f64>,
) -> Result<GaussianMixture> {
    let n = peaks.points[0].len();
    let centers: Vec<Vector> = peaks.points.iter().map(|s| s * center_scale).collect();
    let precisions: Vec<Matrix> = peaks.hessians.iter().map(|h| h * (beta * h_scale)).collect();
    let det_h1 = (peaks.hessians[0].clone() * h_scale).lu().determinant();
    let ln_prefactor = 0.5 * n as f64 * (beta / (2.0 * std::f64::consts::PI)).ln()
        + 0.5 * det_h1.ln()
        - (peaks.len() as f64).ln();
    Ok(GaussianMixture { centers, precision_matrices: precisions, coefficients: coeffs, ln_prefactor })
}

/// `r(δ) > 0` with `∫_{|Y| < r sqrt(γ)} e^{-β F_R}/z_β dY = 1 - δ`.
///
/// Quadrature CDF for ambient dimension at most 2, radial Gaussian-mixture
/// surrogate otherwise; bisection in both cases.
pub fn tolerance_radius(rs: &RootSystem, beta: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let target = 1.0 - delta;
    let mass: Box<dyn Fn(f64) -> Result<f64>> = if rs.ambient_dim() <= 2 {
        let steady = SteadyDensity::new(rs, beta)?;
        let rs2 = rs.clone();
        Box::new(move |r: f64| steady_mass_in_ball(&rs2, &steady, r))
    } else {
        let peaks = peak_set(rs)?;
        let mix = gaussian_approx_from_peaks(&peaks, beta)?;
        let sqg = rs.gamma().sqrt();
        Box::new(move |r: f64| {
            let total: f64 = (0..mix.centers.len())
                .map(|i| mix.radial_component_mass(i, r * sqg))
                .sum::<f64>()
                / mix.centers.len() as f64;
            Ok(total)
        })
    };

    let mut lo = 0.0;
    let mut hi = 2.0;
    let mut m_hi = mass(hi)?;
    while m_hi < target && hi < 1e3 {
        lo = hi;
        hi *= 2.0;
        m_hi = mass(hi)?;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = mass(mid)?;
        if (m - target).abs() < 1e-12 {
            return Ok(mid);
        }
        if m < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Steady mass inside the ball `|Y| < r sqrt(γ)` by quadrature (dim ≤ 2).
fn steady_mass_in_ball(rs: &RootSystem, steady: &SteadyDensity, r: f64) -> Result<f64> {
    let radius = r * rs.gamma().sqrt();
    match rs.ambient_dim() {
        1 => {
            let q = integrate_opt(
                |u| steady.eval(&Vector::from_column_slice(&[u])),
                -radius,
                radius,
                QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 },
            )?;
            Ok(q.value)
        }
        2 => integrate_2d(
            |u, v| steady.eval(&Vector::from_column_slice(&[u, v])),
            -radius,
            radius,
            |u| {
                let h = (radius * radius - u * u).max(0.0).sqrt();
                (-h, h)
            },
            QuadOptions { abs_tol: 1e-11, rel_tol: 1e-9, max_intervals: 4000 },
        ),
        d => Err(Error::DimensionMismatch { expected: 2, got: d }),
    }
}
