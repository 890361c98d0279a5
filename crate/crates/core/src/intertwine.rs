//! Computable special cases of the intertwining operator `V_β`:
//! its action on linear functions, the matrix `M_β`, large-`β`
//! approximations of the Dunkl kernel `V_β e^{x·y}`, the exact rank-one
//! kernel, and the Rösler sandwich bounds `e^{-|x||y|} ≤ V_β e^{x·y} ≤ e^{|x||y|}`.

use crate::numerics::special::{ln_bessel_i, ln_gamma, log_add_exp, log_sub_exp};
use crate::{Error, Matrix, Result, RootSystem, Vector};

/// Action of `V_β` on linear functions: the parallel component contracts by
/// `1/(1 + βγ/d_R)`, the orthogonal component passes through.
#[derive(Debug, Clone)]
pub struct LinearAction {
    beta: f64,
    parallel_factor: f64,
}

impl LinearAction {
    pub fn new(rs: &RootSystem, beta: f64) -> Result<Self> {
        if beta <= 0.0 {
            return Err(Error::NonPositiveBeta(beta));
        }
        Ok(LinearAction {
            beta,
            parallel_factor: 1.0 / (1.0 + beta * rs.gamma() / rs.rank() as f64),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `1/(1 + βγ/d_R)`, in `(0, 1)`.
    pub fn parallel_factor(&self) -> f64 {
        self.parallel_factor
    }
}

/// `V_β (x·y) = x_∥·y_∥ / (1 + βγ/d_R) + x_⊥·y_⊥`.
pub fn v_beta_linear(rs: &RootSystem, beta: f64, x: &Vector, y: &Vector) -> Result<f64> {
    let act = LinearAction::new(rs, beta)?;
    let x_par = rs.project_span(x);
    let y_par = rs.project_span(y);
    let x_perp = x - &x_par;
    let y_perp = y - &y_par;
    Ok(act.parallel_factor() * x_par.dot(&y_par) + x_perp.dot(&y_perp))
}

/// `M_β = (I + β Σ κ(α) α αᵀ/α²)^{-1}` by direct matrix inversion.
/// The closed form `I_⊥ ⊕ I_R/(1 + βγ/d_R)` is available as
/// [`m_beta_matrix_closed_form`]; the two agree entrywise to 1e-12.
pub fn m_beta_matrix(rs: &RootSystem, beta: f64) -> Result<Matrix> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let n = rs.ambient_dim();
    let m = Matrix::identity(n, n) + rs.schur_sum() * beta;
    m.try_inverse().ok_or(Error::DimensionMismatch { expected: n, got: n })
}

/// Closed form of `M_β` via the Schur-sum identity.
pub fn m_beta_matrix_closed_form(rs: &RootSystem, beta: f64) -> Result<Matrix> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let n = rs.ambient_dim();
    let factor = 1.0 / (1.0 + beta * rs.gamma() / rs.rank() as f64);
    let mut p_span = Matrix::zeros(n, n);
    for b in rs.span_basis() {
        for i in 0..n {
            for j in 0..n {
                p_span[(i, j)] += b[i] * b[j];
            }
        }
    }
    Ok(Matrix::identity(n, n) + p_span * (factor - 1.0))
}

/// Large-`β` approximation of the scaled Dunkl kernel `V_β e^{√β x·y}`:
/// `(1 + d_R x_∥·y_∥ / γ√β) exp(√β x_⊥·y_⊥ + x_∥² y_∥² / 2γ)`.
///
/// Valid for `β ≫ d_R/γ` and `d_R² x_∥² y_∥² / βγ² ≪ 1`; see
/// [`kernel_large_beta_warnings`] for the window check (the function itself
/// never rejects, so the breakdown region can be mapped).
pub fn kernel_large_beta(rs: &RootSystem, beta: f64, x: &Vector, y: &Vector) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let x_par = rs.project_span(x);
    let y_par = rs.project_span(y);
    let x_perp = x - &x_par;
    let y_perp = y - &y_par;
    let g = rs.gamma();
    let d = rs.rank() as f64;
    let lead = 1.0 + d * x_par.dot(&y_par) / (g * beta.sqrt());
    let expo = beta.sqrt() * x_perp.dot(&y_perp)
        + x_par.norm_squared() * y_par.norm_squared() / (2.0 * g);
    Ok(lead * expo.exp())
}

/// Validity-window diagnostics for [`kernel_large_beta`].
pub fn kernel_large_beta_warnings(rs: &RootSystem, beta: f64, x: &Vector, y: &Vector) -> Vec<String> {
    let mut w = Vec::new();
    let d = rs.rank() as f64;
    let g = rs.gamma();
    if beta <= 10.0 * d / g {
        w.push(format!("beta = {beta} is not large against d_R/gamma = {:.4}", d / g));
    }
    let x2 = rs.project_span(x).norm_squared();
    let y2 = rs.project_span(y).norm_squared();
    let small = d * d * x2 * y2 / (beta * g * g);
    if small >= 0.1 {
        w.push(format!("d_R² x_∥² y_∥² / βγ² = {small:.3} is not small; expansion unreliable"));
    }
    w
}

/// `ln` of the exact rank-one Dunkl kernel `E_β(z) = V_β e^z` for `B_1`:
///
/// `E_β(z) = 2^{(β-1)/2} Γ((β+1)/2) |z|^{-(β-1)/2}
///           [ I_{(β-1)/2}(|z|) + sgn(z) I_{(β+1)/2}(|z|) ]`.
///
/// The constant is fixed by `E_β(0) = 1`; equating the general transition
/// density with the explicit rank-one one yields the same constant
/// `c_β/2` with `c_β = 2^{(β+1)/2} Γ((β+1)/2)`, which the tests verify.
pub fn ln_kernel_exact_b1(beta: f64, z: f64) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let nu = (beta - 1.0) / 2.0;
    let az = z.abs();
    let ln_const = nu * 2.0f64.ln() + ln_gamma(nu + 1.0);
    let lo = ln_bessel_i(nu, az)?;
    let hi = ln_bessel_i(nu + 1.0, az)?;
    let comb = if z > 0.0 { log_add_exp(lo, hi) } else { log_sub_exp(lo, hi) };
    Ok(ln_const - nu * az.ln() + comb)
}

/// The exact rank-one kernel itself; see [`ln_kernel_exact_b1`].
pub fn kernel_exact_b1(beta: f64, z: f64) -> Result<f64> {
    Ok(ln_kernel_exact_b1(beta, z)?.exp())
}

/// Rösler bounds: true iff `e^{-|x||y|} ≤ value ≤ e^{|x||y|}`.
pub fn kernel_bounds_check(x: &Vector, y: &Vector, value: f64) -> bool {
    let xy = x.norm() * y.norm();
    ((-xy).exp()..=xy.exp()).contains(&value)
}

/// Scalar version of [`kernel_bounds_check`] with `|x||y| = |z|`.
pub fn kernel_bounds_check_scalar(z: f64, value: f64) -> bool {
    ((-z.abs()).exp()..=z.abs().exp()).contains(&value)
}

/// Numerical Dunkl operator `T_i` (renormalized multiplicities, so the
/// difference part carries `βκ(α)/2`):
///
/// `T_i f(x) = ∂_i f(x) + Σ_{α∈R_+} α_i (βκ(α)/2) [f(x) - f(σ_α x)]/(α·x)`.
///
/// The derivative is a central difference with `h = 1e-5 max(1, |x_i|)`;
/// exact on linear and quadratic test functions up to rounding.
pub fn dunkl_apply<F>(rs: &RootSystem, beta: f64, f: &F, i: usize, x: &Vector) -> Result<f64>
where
    F: Fn(&Vector) -> f64,
{
    let h = 1e-5 * x[i].abs().max(1.0);
    let mut xp = x.clone();
    let mut xm = x.clone();
    xp[i] += h;
    xm[i] -= h;
    let mut out = (f(&xp) - f(&xm)) / (2.0 * h);
    for (alpha, k) in rs.positive() {
        let ax = alpha.dot(x);
        if ax.abs() < 1e-300 {
            return Err(Error::OnChamberWall(ax.abs()));
        }
        let refl = crate::rootsys::reflect(alpha, x)?;
        out += alpha[i] * (beta * k / 2.0) * (f(x) - f(&refl)) / ax;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RootSystem;
    use approx::assert_relative_eq;

    #[test]
    fn linear_action_limits() {
        let rs = RootSystem::b1();
        let near_zero = LinearAction::new(&rs, 1e-9).unwrap();
        assert_relative_eq!(near_zero.parallel_factor(), 1.0, epsilon = 1e-8);
        let large = LinearAction::new(&rs, 1e9).unwrap();
        assert!(large.parallel_factor() < 1e-8);
        assert!(LinearAction::new(&rs, 0.0).is_err());
    }

    #[test]
    fn v_beta_linear_b1() {
        let rs = RootSystem::b1();
        let beta = 3.0;
        let x = Vector::from_column_slice(&[2.0]);
        let y = Vector::from_column_slice(&[0.7]);
        assert_relative_eq!(
            v_beta_linear(&rs, beta, &x, &y).unwrap(),
            2.0 * 0.7 / (1.0 + beta),
            epsilon = 1e-14
        );
    }

    #[test]
    fn v_beta_linear_perp_passthrough() {
        let roots = vec![
            Vector::from_column_slice(&[1.0, 0.0]),
            Vector::from_column_slice(&[-1.0, 0.0]),
        ];
        let rs = RootSystem::from_roots(roots, vec![1.0, 1.0]).unwrap();
        let beta = 5.0;
        let (a, b, c, d) = (1.3, -0.4, 0.8, 2.2);
        let x = Vector::from_column_slice(&[a, b]);
        let y = Vector::from_column_slice(&[c, d]);
        assert_relative_eq!(
            v_beta_linear(&rs, beta, &x, &y).unwrap(),
            a * c / (1.0 + beta) + b * d,
            epsilon = 1e-13
        );
    }

    #[test]
    fn m_beta_two_routes_agree() {
        for rs in [
            RootSystem::b1(),
            RootSystem::type_a(3).unwrap(),
            RootSystem::type_a(4).unwrap(),
            RootSystem::type_b(2, 0.5).unwrap(),
            RootSystem::type_b(3, 2.0).unwrap(),
        ] {
            // 20 couplings spread over (0.01, 10^3)
            let mut beta = 0.011;
            while beta < 1e3 {
                let direct = m_beta_matrix(&rs, beta).unwrap();
                let closed = m_beta_matrix_closed_form(&rs, beta).unwrap();
                assert!((direct.clone() - &closed).amax() < 1e-12, "beta = {beta}");
                // symmetry
                assert!((direct.clone() - direct.transpose()).amax() < 1e-12);
                beta *= 1.8;
            }
        }
    }

    #[test]
    fn m_beta_identity_limit() {
        let rs = RootSystem::type_a(3).unwrap();
        let m = m_beta_matrix(&rs, 1e-12).unwrap();
        assert!((m - Matrix::identity(3, 3)).amax() < 1e-9);
    }

    #[test]
    fn m_beta_a2_block_structure() {
        // A_2: M_β = I_⊥ ⊕ I_R / (1 + βγ/2) with γ = 3
        let rs = RootSystem::type_a(3).unwrap();
        let beta = 2.5;
        let m = m_beta_matrix(&rs, beta).unwrap();
        let factor = 1.0 / (1.0 + beta * 3.0 / 2.0);
        let ones = Vector::from_column_slice(&[1.0, 1.0, 1.0]);
        assert!((&m * &ones - &ones).amax() < 1e-12, "perp direction fixed");
        let v = Vector::from_column_slice(&[1.0, -1.0, 0.0]);
        assert!((&m * &v - &v * factor).amax() < 1e-12, "span contracts by 1/(1+βγ/d)");
    }

    #[test]
    fn kernel_large_beta_normalization_and_full_rank_form() {
        let rs = RootSystem::type_b(2, 0.5).unwrap();
        let beta = 400.0;
        let zero = Vector::zeros(2);
        let y = Vector::from_column_slice(&[0.8, 0.3]);
        assert_relative_eq!(kernel_large_beta(&rs, beta, &zero, &y).unwrap(), 1.0, epsilon = 1e-14);
        // full rank: (1 + N x·y / γ√β) exp(x²y²/2γ)
        let x = Vector::from_column_slice(&[0.5, -0.2]);
        let g = rs.gamma();
        let expected = (1.0 + 2.0 * x.dot(&y) / (g * beta.sqrt()))
            * (x.norm_squared() * y.norm_squared() / (2.0 * g)).exp();
        assert_relative_eq!(kernel_large_beta(&rs, beta, &x, &y).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn kernel_large_beta_perp_axis_is_free_brownian() {
        let roots = vec![
            Vector::from_column_slice(&[1.0, 0.0]),
            Vector::from_column_slice(&[-1.0, 0.0]),
        ];
        let rs = RootSystem::from_roots(roots, vec![1.0, 1.0]).unwrap();
        let beta = 300.0;
        let x = Vector::from_column_slice(&[0.0, 1.1]);
        let y = Vector::from_column_slice(&[0.0, -0.4]);
        assert_relative_eq!(
            kernel_large_beta(&rs, beta, &x, &y).unwrap(),
            (beta.sqrt() * 1.1 * (-0.4f64)).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn kernel_large_beta_warning_outside_window() {
        let rs = RootSystem::b1();
        let x = Vector::from_column_slice(&[3.0]);
        let y = Vector::from_column_slice(&[3.0]);
        assert!(!kernel_large_beta_warnings(&rs, 2.0, &x, &y).is_empty());
        assert!(kernel_large_beta_warnings(&rs, 1e4, &Vector::from_column_slice(&[0.5]), &y).is_empty());
    }

    #[test]
    fn exact_kernel_normalizes_at_zero() {
        for &beta in &[0.5, 1.0, 2.0, 7.0, 100.0] {
            for &z in &[1e-8, 1e-6] {
                assert_relative_eq!(kernel_exact_b1(beta, z).unwrap(), 1.0, epsilon = 1e-5);
                assert_relative_eq!(kernel_exact_b1(beta, -z).unwrap(), 1.0, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn exact_kernel_small_z_linear_term() {
        // E_β(z) = 1 + z/(1+β) + O(z²)
        let beta = 3.0;
        let z = 1e-5;
        let e = kernel_exact_b1(beta, z).unwrap();
        assert_relative_eq!((e - 1.0) / z, 1.0 / (1.0 + beta), epsilon = 1e-4);
    }

    #[test]
    fn exact_kernel_within_rosler_bounds() {
        for &beta in &[0.3, 1.0, 6.0, 50.0, 800.0] {
            let mut z = -40.0;
            while z <= 40.0 {
                let v = kernel_exact_b1(beta, z).unwrap();
                assert!(kernel_bounds_check_scalar(z, v), "beta={beta} z={z} v={v}");
                z += 0.37;
            }
        }
    }

    #[test]
    fn bounds_check_rejects_and_degenerates() {
        let x = Vector::from_column_slice(&[1.0, 0.0]);
        let y = Vector::from_column_slice(&[1.0, 1.0]);
        let xy = x.norm() * y.norm();
        assert!(!kernel_bounds_check(&x, &y, (2.0 * xy).exp()));
        assert!(kernel_bounds_check(&x, &y, xy.exp() * 0.99));
        // x = 0 collapses the bounds to [1, 1]
        let zero = Vector::zeros(2);
        assert!(kernel_bounds_check(&zero, &y, 1.0));
        assert!(!kernel_bounds_check(&zero, &y, 1.0 + 1e-9));
    }

    #[test]
    fn exact_kernel_agrees_with_large_beta_form() {
        // E_β(√β x y) ≈ (1 + x y/√β) e^{x²y²/2} for B_1 (γ = d_R = 1)
        let rs = RootSystem::b1();
        let beta = 200.0;
        let mut worst = 0.0f64;
        let mut w = -1.2;
        while w <= 1.2 {
            let x = Vector::from_column_slice(&[w]);
            let y = Vector::from_column_slice(&[1.0]);
            let exact = kernel_exact_b1(beta, beta.sqrt() * w).unwrap();
            let approx = kernel_large_beta(&rs, beta, &x, &y).unwrap();
            worst = worst.max(((approx - exact) / exact).abs());
            w += 0.05;
        }
        assert!(worst < 5e-2, "worst relative error {worst}");
    }

    #[test]
    fn large_beta_kernel_even_part_is_w_invariant() {
        // the odd correction changes sign only; the x-even part of the
        // approximation is exactly invariant under every reflection
        let rs = RootSystem::type_b(2, 0.5).unwrap();
        let w = rs.weyl_group().unwrap();
        let beta = 500.0;
        let x = Vector::from_column_slice(&[0.7, 0.2]);
        let y = Vector::from_column_slice(&[0.4, -0.9]);
        let even = |x: &Vector| {
            0.5 * (kernel_large_beta(&rs, beta, x, &y).unwrap()
                + kernel_large_beta(&rs, beta, &(-x), &y).unwrap())
        };
        let base = even(&x);
        for g in w.elements() {
            assert_relative_eq!(even(&(g * &x)), base, epsilon = 1e-14);
        }
    }

    #[test]
    fn intertwining_relation_on_linear_functions() {
        // T applied to x ↦ V_β(x·y) must return y (Dunkl operator composed
        // with V_β equals V_β composed with the plain derivative).
        let rs = RootSystem::b1();
        let beta = 4.0;
        let yv = 1.7;
        let y = Vector::from_column_slice(&[yv]);
        let f = |x: &Vector| v_beta_linear(&rs, beta, x, &y).unwrap();
        for &x0 in &[0.4, 1.0, -2.3] {
            let x = Vector::from_column_slice(&[x0]);
            let t = dunkl_apply(&rs, beta, &f, 0, &x).unwrap();
            assert_relative_eq!(t, yv, epsilon = 1e-8);
        }
    }

    #[test]
    fn scaled_kernel_even_coefficients_decay() {
        // β^m-scaled even Taylor coefficients of the exact kernel converge
        // to those of e^{z²/2γ} (γ = 1 for B_1): c_{2}β → 1/2, c_{4}β² → 1/8.
        // Read them from the even part of E_β(√β w) by finite differences
        // in the scaled variable w, where the differences stay O(1).
        let scaled_even_coeff = |beta: f64, m: usize| -> f64 {
            let l = |w: f64| {
                0.5 * (kernel_exact_b1(beta, beta.sqrt() * w).unwrap()
                    + kernel_exact_b1(beta, -beta.sqrt() * w).unwrap())
            };
            match m {
                1 => {
                    // Richardson-extrapolated second difference
                    let h = 0.2;
                    (16.0 * (l(h) - 1.0) - (l(2.0 * h) - 1.0)) / (12.0 * h * h)
                }
                2 => {
                    let h = 0.15;
                    (l(2.0 * h) - 4.0 * l(h) + 3.0) / (12.0 * h.powi(4))
                }
                _ => unreachable!(),
            }
        };
        for (m, target) in [(1usize, 0.5), (2usize, 0.125)] {
            let lo = scaled_even_coeff(1e2, m);
            let hi = scaled_even_coeff(1e4, m);
            let drift = ((hi - lo) / hi).abs();
            assert!(drift < 0.10, "m={m} lo={lo} hi={hi} drift={drift}");
            assert_relative_eq!(hi, target, max_relative = 0.05);
        }
    }
}
