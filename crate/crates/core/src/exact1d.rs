//! Exact machinery for the one-dimensional (`B_1`) Dunkl process: the
//! explicit transition density, the scaled density `f(t, Y)`, the
//! steady-state density, and quadrature-based expectations.
//!
//! Everything in this module is evaluated in log space so that couplings up
//! to `β ≈ 5000` work without overflow; the `|y|^β` weight alone would
//! leave `f64` range long before the normalized density does.

use crate::numerics::quad::{integrate_opt, QuadOptions};
use crate::numerics::special::{ln_gamma, log_add_exp, log_sub_exp};
use crate::{Error, Result};

pub use crate::numerics::special::{bessel_i, ln_bessel_i};

/// `ln c_β` with `c_β = ∫ e^{-x²/2} |x|^β dx = 2^{(β+1)/2} Γ((β+1)/2)`.
pub fn ln_c_beta(beta: f64) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    Ok(0.5 * (beta + 1.0) * 2.0f64.ln() + ln_gamma(0.5 * (beta + 1.0)))
}

/// `ln z_β = ln c_β - (1+β)/2 ln β` for the rank-one steady state.
pub fn ln_z_beta_1d(beta: f64) -> Result<f64> {
    Ok(ln_c_beta(beta)? - 0.5 * (beta + 1.0) * beta.ln())
}

/// `ln p_{B_1}(t, y | x)`:
///
/// `p = e^{-(x²+y²)/2t}/(2t) · |y|^β (xy)^{-(β-1)/2}
///      [ I_{(β+1)/2}(xy/t) + I_{(β-1)/2}(xy/t) ]`.
///
/// Negative `x` uses the flip symmetry `p(t, y | -x) = p(t, -y | x)`; for
/// `y < 0` the printed prefactor is continued analytically, which turns the
/// Bessel sum into a difference. The `x = 0` column is the continuous
/// limit `|y|^β t^{-β/2} e^{-y²/2t} / (c_β sqrt(t))`.
pub fn ln_tpd_b1(t: f64, y: f64, x: f64, beta: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let (x, y) = if x < 0.0 { (-x, -y) } else { (x, y) };
    if y == 0.0 {
        // the weight |y|^β vanishes
        return Ok(f64::NEG_INFINITY);
    }
    if x == 0.0 {
        return Ok(beta * y.abs().ln() - 0.5 * beta * t.ln() - y * y / (2.0 * t)
            - ln_c_beta(beta)?
            - 0.5 * t.ln());
    }
    let nu = 0.5 * (beta - 1.0);
    let u = (x * y).abs() / t;
    let lo = ln_bessel_i(nu, u)?;
    let hi = ln_bessel_i(nu + 1.0, u)?;
    let bracket = if y > 0.0 { log_add_exp(lo, hi) } else { log_sub_exp(lo, hi) };
    Ok(-(x * x + y * y) / (2.0 * t) - (2.0 * t).ln() + beta * y.abs().ln()
        - nu * (x * y.abs()).ln()
        + bracket)
}

/// Transition density `p_{B_1}(t, y | x)`.
pub fn tpd_b1(t: f64, y: f64, x: f64, beta: f64) -> Result<f64> {
    Ok(ln_tpd_b1(t, y, x, beta)?.exp())
}

/// The same transition density assembled from the general template
/// `p = w_β(y/√t) e^{-(x²+y²)/2t} / (c_β t^{1/2}) · E_β(x y / t)`
/// with the exact rank-one kernel. Used to tie the general formula to the
/// explicit one; agrees with [`ln_tpd_b1`] pointwise.
pub fn ln_tpd_b1_via_kernel(t: f64, y: f64, x: f64, beta: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    if y == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_kernel = crate::intertwine::ln_kernel_exact_b1(beta, x * y / t)?;
    Ok(beta * (y.abs().ln() - 0.5 * t.ln()) - (x * x + y * y) / (2.0 * t) - ln_c_beta(beta)?
        - 0.5 * t.ln()
        + ln_kernel)
}

/// Scaled process density for a point start:
/// `f(t, Y) = sqrt(βt) p_{B_1}(t, sqrt(βt) Y | x0)`.
pub fn scaled_density_1d(t: f64, y_scaled: f64, x0: f64, beta: f64) -> Result<f64> {
    let r = (beta * t).sqrt();
    Ok(r * tpd_b1(t, r * y_scaled, x0, beta)?)
}

/// Steady-state density `e^{-β Y²/2} |Y|^β / z_β`.
pub fn steady_density_1d(beta: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok((-beta * y * y / 2.0 + beta * y.abs().ln() - ln_z_beta_1d(beta)?).exp())
}

/// Point mass or finite mixture of point masses used as initial data.
#[derive(Debug, Clone)]
pub enum Initial1d {
    Point(f64),
    /// `(weight, position)` pairs; weights must sum to 1.
    Mixture(Vec<(f64, f64)>),
}

impl Initial1d {
    /// The reflection-symmetrized version `½ δ_{x0} + ½ δ_{-x0}`.
    pub fn symmetrized(x0: f64) -> Self {
        Initial1d::Mixture(vec![(0.5, x0), (0.5, -x0)])
    }

    pub fn components(&self) -> Vec<(f64, f64)> {
        match self {
            Initial1d::Point(x) => vec![(1.0, *x)],
            Initial1d::Mixture(v) => v.clone(),
        }
    }

    pub fn max_abs_position(&self) -> f64 {
        self.components().iter().map(|(_, x)| x.abs()).fold(0.0, f64::max)
    }
}

/// Integration half-width in scaled coordinates: Gaussian tails of the
/// steady state plus the transient bump at `x0/sqrt(βt)`.
fn domain_half_width(beta: f64, t: f64, x0: f64) -> f64 {
    (2.0 * 40.0 / beta).sqrt() + x0.abs() / (beta * t).sqrt() + 5.0
}

const EXPECTATION_QUAD: QuadOptions =
    QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 };

/// `⟨φ⟩_t = ∫ φ(Y) f(t, Y) dY` by adaptive quadrature.
pub fn expectation_1d<F>(phi: F, t: f64, initial: &Initial1d, beta: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut total = 0.0;
    for (w, x0) in initial.components() {
        let half = domain_half_width(beta, t, x0);
        let q = integrate_opt(
            |yy| match scaled_density_1d(t, yy, x0, beta) {
                Ok(f) => phi(yy) * f,
                Err(_) => 0.0,
            },
            -half,
            half,
            EXPECTATION_QUAD,
        )?;
        total += w * q.value;
    }
    Ok(total)
}

/// Steady-state expectation `⟨φ⟩` by quadrature.
pub fn steady_expectation_1d<F>(phi: F, beta: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let half = domain_half_width(beta, 1.0, 0.0);
    let q = integrate_opt(
        |yy| match steady_density_1d(beta, yy) {
            Ok(f) => phi(yy) * f,
            Err(_) => 0.0,
        },
        -half,
        half,
        EXPECTATION_QUAD,
    )?;
    Ok(q.value)
}

/// A one-dimensional density packaged with its support hint.
pub struct Density1d {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
}

impl std::fmt::Debug for Density1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Density1d").field("support", &self.support).finish()
    }
}

impl Density1d {
    pub fn new<F>(eval: F, support: (f64, f64)) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Density1d { eval: Box::new(eval), support }
    }

    /// The scaled density `f(t, ·)` for the given initial data.
    pub fn scaled(t: f64, initial: Initial1d, beta: f64) -> Result<Self> {
        if t <= 0.0 {
            return Err(Error::NonPositiveTime(t));
        }
        if beta <= 0.0 {
            return Err(Error::NonPositiveBeta(beta));
        }
        let half = domain_half_width(beta, t, initial.max_abs_position());
        let comps = initial.components();
        Ok(Density1d::new(
            move |y| {
                comps
                    .iter()
                    .map(|&(w, x0)| w * scaled_density_1d(t, y, x0, beta).unwrap_or(0.0))
                    .sum()
            },
            (-half, half),
        ))
    }

    /// The steady-state density at coupling `β`.
    pub fn steady(beta: f64) -> Result<Self> {
        if beta <= 0.0 {
            return Err(Error::NonPositiveBeta(beta));
        }
        let half = domain_half_width(beta, 1.0, 0.0);
        Ok(Density1d::new(move |y| steady_density_1d(beta, y).unwrap_or(0.0), (-half, half)))
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Numerically integrated mass over the support hint.
    pub fn normalization_check(&self) -> Result<f64> {
        let q = integrate_opt(|y| self.eval(y), self.support.0, self.support.1, EXPECTATION_QUAD)?;
        Ok(q.value)
    }
}
