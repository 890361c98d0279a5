//! Sparse multivariate polynomials and the two averaging operators used in
//! the reflection-eigenvalue analysis: the multiplicity-weighted reflection
//! average `A p = (1/γ) Σ κ(α) σ_α p` and the group average
//! `B p = (1/|W|) Σ ρ p` (a projector onto `W`-invariants).

use std::collections::BTreeMap;

use crate::{Matrix, RootSystem, Vector, WeylGroup};

/// Coefficients smaller than this (relative to the largest) are dropped.
const COEFF_PRUNE: f64 = 1e-14;

/// A polynomial in `nvars` variables stored sparsely as
/// exponent multi-index → coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariatePolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, f64>,
}

impl MultivariatePolynomial {
    pub fn zero(nvars: usize) -> Self {
        MultivariatePolynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    /// Single variable `x_i` as a polynomial.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn monomial(exponents: Vec<u16>, coeff: f64) -> Self {
        let nvars = exponents.len();
        let mut terms = BTreeMap::new();
        if coeff != 0.0 {
            terms.insert(exponents, coeff);
        }
        MultivariatePolynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exponents: &[u16]) -> f64 {
        self.terms.get(exponents).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, &c)| c * e.iter().enumerate().map(|(i, &p)| x[i].powi(p as i32)).product::<f64>())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (e, &c) in &other.terms {
            *terms.entry(e.clone()).or_insert(0.0) += c;
        }
        MultivariatePolynomial { nvars: self.nvars, terms }.pruned()
    }

    pub fn scale(&self, s: f64) -> Self {
        let terms = self.terms.iter().map(|(e, &c)| (e.clone(), c * s)).collect();
        MultivariatePolynomial { nvars: self.nvars, terms }.pruned()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Vec<u16>, f64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                *terms.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        MultivariatePolynomial { nvars: self.nvars, terms }.pruned()
    }

    /// Action of an orthogonal map: `(ρ p)(x) = p(ρ⁻¹ x) = p(ρᵀ x)`.
    /// Exponents expand by explicit multiplication of the substituted
    /// linear forms, so degree is preserved exactly.
    pub fn apply_orthogonal(&self, rho: &Matrix) -> Self {
        assert_eq!(rho.nrows(), self.nvars);
        // x_i in p is replaced by row i of ρᵀ, i.e. column i of ρ as a form
        // in the new variables: (ρᵀ x)_i = Σ_j ρ_{ji} x_j
        let forms: Vec<MultivariatePolynomial> = (0..self.nvars)
            .map(|i| {
                let mut terms = BTreeMap::new();
                for j in 0..self.nvars {
                    let c = rho[(j, i)];
                    if c.abs() > 0.0 {
                        let mut e = vec![0u16; self.nvars];
                        e[j] = 1;
                        terms.insert(e, c);
                    }
                }
                MultivariatePolynomial { nvars: self.nvars, terms }
            })
            .collect();
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            let mut term = Self::constant(self.nvars, c);
            for (i, &pow) in e.iter().enumerate() {
                for _ in 0..pow {
                    term = term.mul(&forms[i]);
                }
            }
            out = out.add(&term);
        }
        out.pruned()
    }

    /// Reflection action `σ_α p`.
    pub fn reflect(&self, alpha: &Vector) -> Self {
        let m = super::reflection_matrix(alpha).expect("nonzero root");
        self.apply_orthogonal(&m)
    }

    fn pruned(mut self) -> Self {
        let max = self.terms.values().fold(0.0f64, |m, &c| m.max(c.abs()));
        if max == 0.0 {
            self.terms.clear();
            return self;
        }
        self.terms.retain(|_, c| c.abs() > COEFF_PRUNE * max);
        self
    }
}

/// `A p = (1/γ) Σ_{α ∈ R_+} κ(α) σ_α p`. `W`-invariant polynomials are
/// exactly the eigenfunctions with eigenvalue 1; all eigenvalues lie in
/// `[-1, 1]`.
pub fn reflection_average(rs: &RootSystem, p: &MultivariatePolynomial) -> MultivariatePolynomial {
    let mut out = MultivariatePolynomial::zero(p.nvars());
    for (alpha, k) in rs.positive() {
        out = out.add(&p.reflect(alpha).scale(k));
    }
    out.scale(1.0 / rs.gamma())
}

/// `B p = (1/|W|) Σ_ρ ρ p` — the projector onto `W`-invariants.
pub fn group_average(w: &WeylGroup, p: &MultivariatePolynomial) -> MultivariatePolynomial {
    let mut out = MultivariatePolynomial::zero(p.nvars());
    for g in w.elements() {
        out = out.add(&p.apply_orthogonal(g));
    }
    out.scale(1.0 / w.order() as f64)
}

/// All exponent multi-indices of total degree exactly `degree` in `nvars`
/// variables, in lexicographic order.
pub fn homogeneous_basis(nvars: usize, degree: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; nvars];
    fn rec(out: &mut Vec<Vec<u16>>, cur: &mut Vec<u16>, var: usize, left: usize) {
        let n = cur.len();
        if var == n - 1 {
            cur[var] = left as u16;
            out.push(cur.clone());
            cur[var] = 0;
            return;
        }
        for d in (0..=left).rev() {
            cur[var] = d as u16;
            rec(out, cur, var + 1, left - d);
        }
        cur[var] = 0;
    }
    if nvars == 0 {
        return out;
    }
    rec(&mut out, &mut cur, 0, degree);
    out
}

fn multi_factorial(e: &[u16]) -> f64 {
    e.iter().map(|&p| (1..=p as usize).map(|k| k as f64).product::<f64>()).product()
}

/// Matrix of a linear polynomial operator on the homogeneous space of the
/// given degree, in the Fischer-orthonormal monomial basis
/// `x^a / sqrt(a!)`. Orthogonal substitutions are self-adjoint in this
/// inner product, so the returned matrices are symmetric.
fn operator_matrix<F>(nvars: usize, degree: usize, op: F) -> (Matrix, Vec<Vec<u16>>)
where
    F: Fn(&MultivariatePolynomial) -> MultivariatePolynomial,
{
    let basis = homogeneous_basis(nvars, degree);
    let dim = basis.len();
    let mut m = Matrix::zeros(dim, dim);
    for (col, e) in basis.iter().enumerate() {
        let image = op(&MultivariatePolynomial::monomial(e.clone(), 1.0));
        let fa = multi_factorial(e).sqrt();
        for (row, b) in basis.iter().enumerate() {
            let fb = multi_factorial(b).sqrt();
            m[(row, col)] = image.coefficient(b) * fb / fa;
        }
    }
    (m, basis)
}

/// Matrix of the reflection average `A` on homogeneous degree-`degree`
/// polynomials (Fischer-orthonormal basis).
pub fn reflection_average_matrix(rs: &RootSystem, degree: usize) -> (Matrix, Vec<Vec<u16>>) {
    operator_matrix(rs.ambient_dim(), degree, |p| reflection_average(rs, p))
}

/// Matrix of the invariant projector `B` on homogeneous degree-`degree`
/// polynomials (Fischer-orthonormal basis).
pub fn group_average_matrix(w: &WeylGroup, nvars: usize, degree: usize) -> (Matrix, Vec<Vec<u16>>) {
    operator_matrix(nvars, degree, |p| group_average(w, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RootSystem;
    use approx::assert_relative_eq;

    fn b1() -> RootSystem {
        RootSystem::b1()
    }

    #[test]
    fn eval_and_degree() {
        // p = 2 x^2 y - 3 y
        let p = MultivariatePolynomial::monomial(vec![2, 1], 2.0)
            .add(&MultivariatePolynomial::monomial(vec![0, 1], -3.0));
        assert_eq!(p.degree(), 3);
        let x = Vector::from_column_slice(&[2.0, 0.5]);
        assert_relative_eq!(p.eval(&x), 2.0 * 4.0 * 0.5 - 1.5);
    }

    #[test]
    fn orthogonal_action_preserves_degree_and_values() {
        let rot = Matrix::from_row_slice(2, 2, &{
            let th = 0.7f64;
            [th.cos(), -th.sin(), th.sin(), th.cos()]
        });
        let p = MultivariatePolynomial::monomial(vec![3, 1], 1.3)
            .add(&MultivariatePolynomial::monomial(vec![1, 1], -0.4));
        let q = p.apply_orthogonal(&rot);
        assert_eq!(q.degree(), p.degree());
        let x = Vector::from_column_slice(&[0.8, -0.3]);
        let rinv_x = rot.transpose() * &x;
        assert_relative_eq!(q.eval(&x), p.eval(&rinv_x), epsilon = 1e-12);
    }

    #[test]
    fn reflection_average_on_b1() {
        let rs = b1();
        // even monomial: eigenvalue 1
        let even = MultivariatePolynomial::monomial(vec![2], 1.0);
        let ae = reflection_average(&rs, &even);
        assert_relative_eq!(ae.coefficient(&[2]), 1.0, epsilon = 1e-14);
        // odd monomial: eigenvalue -1
        let odd = MultivariatePolynomial::variable(1, 0);
        let ao = reflection_average(&rs, &odd);
        assert_relative_eq!(ao.coefficient(&[1]), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn group_average_is_projector() {
        let rs = RootSystem::type_a(3).unwrap();
        let w = rs.weyl_group().unwrap();
        // a random-ish cubic
        let p = MultivariatePolynomial::monomial(vec![2, 1, 0], 1.0)
            .add(&MultivariatePolynomial::monomial(vec![0, 1, 2], -0.7))
            .add(&MultivariatePolynomial::monomial(vec![1, 1, 1], 0.3));
        let bp = group_average(&w, &p);
        let bbp = group_average(&w, &bp);
        let x = Vector::from_column_slice(&[0.3, -1.1, 0.8]);
        assert_relative_eq!(bbp.eval(&x), bp.eval(&x), epsilon = 1e-12);
        // invariance under each group element
        for g in w.elements() {
            assert_relative_eq!(bp.apply_orthogonal(g).eval(&x), bp.eval(&x), epsilon = 1e-12);
        }
    }

    #[test]
    fn group_average_kills_odd_keeps_even_on_b1() {
        let rs = b1();
        let w = rs.weyl_group().unwrap();
        let odd = MultivariatePolynomial::variable(1, 0);
        assert!(group_average(&w, &odd).is_zero());
        let even = MultivariatePolynomial::monomial(vec![2], 1.0);
        let be = group_average(&w, &even);
        assert_relative_eq!(be.coefficient(&[2]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn a2_degree_one_eigenvalue_strictly_inside() {
        // On A_2 (three particles), p = x_1 - x_2 is not W-invariant and not
        // a -1 eigenfunction; the degree-1 spectrum of A away from the
        // invariant subspace lies strictly inside (-1, 1).
        let rs = RootSystem::type_a(3).unwrap();
        let (m, _) = reflection_average_matrix(&rs, 1);
        let sym = (&m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigenvalues();
        for &l in eig.iter() {
            assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&l), "eigenvalue {l}");
        }
        // degree-1 invariants of A_2 inside the span are trivial; only the
        // diagonal direction (perp) is fixed, giving exactly one eigenvalue 1
        let ones: usize = eig.iter().filter(|&&l| (l - 1.0).abs() < 1e-9).count();
        assert_eq!(ones, 1);
        // and at least one eigenvalue strictly between -1 and 1
        assert!(eig.iter().any(|&l| l > -1.0 + 1e-6 && l < 1.0 - 1e-6));
    }

    #[test]
    fn homogeneous_basis_counts() {
        assert_eq!(homogeneous_basis(2, 3).len(), 4);
        assert_eq!(homogeneous_basis(3, 2).len(), 6);
        assert_eq!(homogeneous_basis(1, 5), vec![vec![5u16]]);
    }
}
