//! Reduced root systems, multiplicity functions, Weyl groups and reflection
//! actions on vectors and polynomials.
//!
//! A root system here is a finite set `R` of nonzero vectors closed under
//! all of its own reflections, with `a ξ = α` for `α, ξ ∈ R` forcing
//! `a = ±1` (reduced). Multiplicities `κ` are `W`-invariant positive
//! weights, renormalized so that at least one orbit carries `κ = 1`; their
//! sum over a positive subsystem is `γ`.

mod poly;

pub use poly::{
    group_average, group_average_matrix, homogeneous_basis, reflection_average,
    reflection_average_matrix, MultivariatePolynomial,
};

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result, Vector};

/// Two roots closer than this are considered the same vector.
pub const ROOT_DEDUP_TOL: f64 = 1e-10;
/// Set-equality tolerance for the closure test `sigma_a R = R`.
pub const CLOSURE_TOL: f64 = 1e-12;
/// Rejection threshold for the positive-subsystem direction `m`.
const ADMISSIBLE_TOL: f64 = 1e-8;
/// Weyl elements closer than this (entrywise) are deduplicated.
const GROUP_DEDUP_TOL: f64 = 1e-9;
/// Default cap on the Weyl closure size.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// Reflection of `x` along `alpha`: `x - 2 (alpha.x / alpha.alpha) alpha`.
pub fn reflect(alpha: &Vector, x: &Vector) -> Result<Vector> {
    let a2 = alpha.norm_squared();
    if a2 == 0.0 {
        return Err(Error::DegenerateRoot);
    }
    let c = 2.0 * alpha.dot(x) / a2;
    Ok(x - alpha * c)
}

/// Matrix of the reflection along `alpha`: `I - 2 alpha alpha^T / |alpha|^2`.
pub fn reflection_matrix(alpha: &Vector) -> Result<Matrix> {
    let a2 = alpha.norm_squared();
    if a2 == 0.0 {
        return Err(Error::DegenerateRoot);
    }
    let n = alpha.len();
    let mut m = Matrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= 2.0 * alpha[i] * alpha[j] / a2;
        }
    }
    Ok(m)
}

/// A validated reduced root system with renormalized multiplicities.
#[derive(Debug, Clone)]
pub struct RootSystem {
    ambient_dim: usize,
    roots: Vec<Vector>,
    kappa_all: Vec<f64>,
    positive_roots: Vec<Vector>,
    kappa_positive: Vec<f64>,
    rank: usize,
    gamma: f64,
    span_basis: Vec<Vector>,
    perp_basis: Vec<Vector>,
    positive_choice: Vector,
}

/// Serialized form: `{ambient_dim, roots, kappa, positive_choice_vector}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSystemSpec {
    pub ambient_dim: usize,
    pub roots: Vec<Vec<f64>>,
    pub kappa: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_choice_vector: Option<Vec<f64>>,
}

impl RootSystem {
    /// Type `A_{n-1}` in `R^n`: roots `e_i - e_j` (i != j), `κ ≡ 1`.
    ///
    /// The radial process on this system is Dyson's model with `n`
    /// log-repelling particles; `γ = n(n-1)/2` and the rank is `n - 1`
    /// (the diagonal `(1,...,1)` is fixed).
    pub fn type_a(n_particles: usize) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::TooFewParticles(n_particles));
        }
        let n = n_particles;
        let mut roots = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut v = Vector::zeros(n);
                    v[i] = 1.0;
                    v[j] = -1.0;
                    roots.push(v);
                }
            }
        }
        let kappa = vec![1.0; roots.len()];
        Self::from_parts(n, roots, kappa, None)
    }

    /// Type `B_n` in `R^n`: roots `±e_i ± e_j` (i < j) with `κ = 1` and
    /// `±e_i` with `κ = (2ν+1)/2`.
    ///
    /// The radial process is the square-root Wishart–Laguerre eigenvalue
    /// process with Bessel index `ν > -1`; `γ = n(n-1) + n(2ν+1)/2`.
    /// At `ν = -1/2` the short-root multiplicity degenerates to zero and the
    /// walls `Y_i = 0` carry no logarithmic repulsion.
    pub fn type_b(n: usize, nu: f64) -> Result<Self> {
        if nu <= -1.0 {
            return Err(Error::BesselIndexOutOfRange(nu));
        }
        let kappa_short = (2.0 * nu + 1.0) / 2.0;
        let mut roots = Vec::new();
        let mut kappa = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)] {
                    let mut v = Vector::zeros(n);
                    v[i] = si;
                    v[j] = sj;
                    roots.push(v);
                    kappa.push(1.0);
                }
            }
        }
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut v = Vector::zeros(n);
                v[i] = s;
                roots.push(v);
                kappa.push(kappa_short);
            }
        }
        Self::from_parts(n, roots, kappa, None)
    }

    /// The rank-one system `B_1 = {±e_1}` in `R^1` with `κ = 1`, i.e. the
    /// one-dimensional Dunkl process. Equivalent to `type_b(1, 1/2)`.
    pub fn b1() -> Self {
        Self::type_b(1, 0.5).expect("B_1 is always valid")
    }

    /// Validate an arbitrary root list with its multiplicities.
    pub fn from_roots(roots: Vec<Vector>, kappa: Vec<f64>) -> Result<Self> {
        let dim = roots.first().map(|r| r.len()).ok_or(Error::EmptyRootSystem)?;
        Self::from_parts(dim, roots, kappa, None)
    }

    /// Same as [`RootSystem::from_roots`] with an explicit positive-subsystem
    /// direction `m` (must satisfy `|m·α| > 1e-8` for every root).
    pub fn from_roots_with_choice(roots: Vec<Vector>, kappa: Vec<f64>, m: Vector) -> Result<Self> {
        let dim = roots.first().map(|r| r.len()).ok_or(Error::EmptyRootSystem)?;
        Self::from_parts(dim, roots, kappa, Some(m))
    }

    pub fn from_spec(spec: &RootSystemSpec) -> Result<Self> {
        let roots: Vec<Vector> = spec.roots.iter().map(|r| Vector::from_column_slice(r)).collect();
        for r in &roots {
            if r.len() != spec.ambient_dim {
                return Err(Error::DimensionMismatch { expected: spec.ambient_dim, got: r.len() });
            }
        }
        let m = spec.positive_choice_vector.as_ref().map(|v| Vector::from_column_slice(v));
        Self::from_parts(spec.ambient_dim, roots, spec.kappa.clone(), m)
    }

    pub fn to_spec(&self) -> RootSystemSpec {
        RootSystemSpec {
            ambient_dim: self.ambient_dim,
            roots: self.roots.iter().map(|r| r.as_slice().to_vec()).collect(),
            kappa: self.kappa_all.clone(),
            positive_choice_vector: Some(self.positive_choice.as_slice().to_vec()),
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: RootSystemSpec = serde_json::from_str(json)?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("spec serializes")
    }

    fn from_parts(dim: usize, roots: Vec<Vector>, kappa: Vec<f64>, m: Option<Vector>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyRootSystem);
        }
        if kappa.len() != roots.len() {
            return Err(Error::KappaLengthMismatch { got: kappa.len(), expected: roots.len() });
        }
        for r in &roots {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            if r.norm() < ROOT_DEDUP_TOL {
                return Err(Error::DegenerateRoot);
            }
        }
        // κ ≥ 0 (zero only in the degenerate short-root limit).
        for &k in &kappa {
            if k < 0.0 {
                return Err(Error::KappaNotPositive(k));
            }
        }

        // reduced: parallel roots must come in ±1 ratio, and no duplicates
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                let (a, b) = (&roots[i], &roots[j]);
                let cosine = a.dot(b) / (a.norm() * b.norm());
                if cosine.abs() > 1.0 - 1e-12 {
                    let ratio = b.norm() / a.norm();
                    if (ratio - 1.0).abs() > ROOT_DEDUP_TOL {
                        return Err(Error::NotReduced {
                            a: a.as_slice().to_vec(),
                            b: b.as_slice().to_vec(),
                        });
                    }
                    if cosine > 0.0 {
                        // identical vector listed twice
                        return Err(Error::NotReduced {
                            a: a.as_slice().to_vec(),
                            b: b.as_slice().to_vec(),
                        });
                    }
                }
            }
        }

        // closure under every reflection, and W-invariance of κ along the way
        let find = |v: &Vector| -> Option<usize> {
            roots.iter().position(|r| (r - v).amax() < CLOSURE_TOL.max(ROOT_DEDUP_TOL))
        };
        for alpha in &roots {
            for (j, xi) in roots.iter().enumerate() {
                let image = reflect(alpha, xi)?;
                let Some(k) = find(&image) else {
                    return Err(Error::ClosureViolation { root: xi.as_slice().to_vec() });
                };
                if (kappa[j] - kappa[k]).abs() > 1e-12 * kappa[j].abs().max(1.0) {
                    return Err(Error::KappaNotInvariant {
                        a: xi.as_slice().to_vec(),
                        b: roots[k].as_slice().to_vec(),
                        ka: kappa[j],
                        kb: kappa[k],
                    });
                }
            }
        }

        // renormalization convention: at least one root with κ = 1
        if !kappa.iter().any(|&k| (k - 1.0).abs() <= 1e-12) {
            return Err(Error::KappaNotRenormalized);
        }

        // positive subsystem via an admissible direction m
        let m = match m {
            Some(m) => {
                if m.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: m.len() });
                }
                if roots.iter().any(|a| (a.dot(&m)).abs() / a.norm() < ADMISSIBLE_TOL) {
                    return Err(Error::NoAdmissibleDirection(0));
                }
                m
            }
            None => draw_admissible_direction(&roots, dim)?,
        };
        let mut positive_roots = Vec::new();
        let mut kappa_positive = Vec::new();
        for (r, &k) in roots.iter().zip(&kappa) {
            if r.dot(&m) > 0.0 {
                positive_roots.push(r.clone());
                kappa_positive.push(k);
            }
        }
        debug_assert_eq!(positive_roots.len() * 2, roots.len());
        let gamma: f64 = kappa_positive.iter().sum();

        let (span_basis, perp_basis) = split_space(&roots, dim);
        let rank = span_basis.len();

        Ok(RootSystem {
            ambient_dim: dim,
            roots,
            kappa_all: kappa,
            positive_roots,
            kappa_positive,
            rank,
            gamma,
            span_basis,
            perp_basis,
            positive_choice: m,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn roots(&self) -> &[Vector] {
        &self.roots
    }

    pub fn kappa_all(&self) -> &[f64] {
        &self.kappa_all
    }

    pub fn positive_roots(&self) -> &[Vector] {
        &self.positive_roots
    }

    /// Iterate `(α, κ(α))` over the positive subsystem.
    pub fn positive(&self) -> impl Iterator<Item = (&Vector, f64)> {
        self.positive_roots.iter().zip(self.kappa_positive.iter().copied())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `γ = Σ_{α ∈ R_+} κ(α)`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn span_basis(&self) -> &[Vector] {
        &self.span_basis
    }

    pub fn perp_basis(&self) -> &[Vector] {
        &self.perp_basis
    }

    pub fn positive_choice(&self) -> &Vector {
        &self.positive_choice
    }

    /// Orthogonal projection onto `Span(R)`.
    pub fn project_span(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ambient_dim);
        for b in &self.span_basis {
            out += b * b.dot(x);
        }
        out
    }

    /// Orthogonal projection onto the complement of `Span(R)`.
    pub fn project_perp(&self, x: &Vector) -> Vector {
        x - self.project_span(x)
    }

    /// Coordinates of the span projection in the `span_basis`.
    pub fn span_coords(&self, x: &Vector) -> Vector {
        Vector::from_iterator(self.rank, self.span_basis.iter().map(|b| b.dot(x)))
    }

    /// Reassemble an ambient vector from span coordinates.
    pub fn from_span_coords(&self, c: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ambient_dim);
        for (b, &ci) in self.span_basis.iter().zip(c.iter()) {
            out += b * ci;
        }
        out
    }

    /// `Σ_{α ∈ R_+} κ(α) α α^T / |α|²` — by Schur orthogonality this equals
    /// `(γ / d_R) I` on `Span(R)`.
    pub fn schur_sum(&self) -> Matrix {
        let n = self.ambient_dim;
        let mut s = Matrix::zeros(n, n);
        for (alpha, k) in self.positive() {
            let a2 = alpha.norm_squared();
            for i in 0..n {
                for j in 0..n {
                    s[(i, j)] += k * alpha[i] * alpha[j] / a2;
                }
            }
        }
        s
    }

    /// The Weyl group generated by the root reflections (default size cap).
    pub fn weyl_group(&self) -> Result<WeylGroup> {
        self.weyl_group_capped(DEFAULT_GROUP_CAP)
    }

    /// Breadth-first closure of the reflection generators, deduplicating by
    /// a digest of the entries rounded at nine decimal places (hash hits
    /// are confirmed by entrywise distance).
    pub fn weyl_group_capped(&self, cap: usize) -> Result<WeylGroup> {
        let n = self.ambient_dim;
        let generators: Vec<Matrix> =
            self.positive_roots.iter().map(reflection_matrix).collect::<Result<_>>()?;

        let digest = |m: &Matrix| -> u64 {
            let mut h = 0xcbf29ce484222325u64;
            for &x in m.iter() {
                let r = (x * 1e9).round() as i64 as u64;
                h = (h ^ r).wrapping_mul(0x00000100000001b3);
            }
            h
        };
        let mut elements: Vec<Matrix> = vec![Matrix::identity(n, n)];
        let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
        buckets.insert(digest(&elements[0]), vec![0]);

        let mut cursor = 0usize;
        let mut prod = Matrix::zeros(n, n);
        while cursor < elements.len() {
            for g in &generators {
                prod.gemm(1.0, g, &elements[cursor], 0.0);
                let key = digest(&prod);
                let known = buckets
                    .get(&key)
                    .map(|idxs| idxs.iter().any(|&i| (&elements[i] - &prod).amax() < GROUP_DEDUP_TOL))
                    .unwrap_or(false);
                if !known {
                    if elements.len() >= cap {
                        return Err(Error::GroupTooLarge(cap));
                    }
                    buckets.entry(key).or_default().push(elements.len());
                    elements.push(prod.clone());
                }
            }
            cursor += 1;
        }
        Ok(WeylGroup { elements })
    }
}

/// Draw a direction with `|m·α|` bounded away from zero for every root.
fn draw_admissible_direction(roots: &[Vector], dim: usize) -> Result<Vector> {
    // fixed seed: construction stays deterministic, tests can still pass
    // their own m to probe choice independence
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d15_ea5e);
    let attempts = 1000;
    for _ in 0..attempts {
        let mut m = Vector::zeros(dim);
        for i in 0..dim {
            m[i] = rng.random_range(-1.0..1.0);
        }
        let norm = m.norm();
        if norm < 1e-3 {
            continue;
        }
        m /= norm;
        if roots.iter().all(|a| (a.dot(&m)).abs() / a.norm() >= ADMISSIBLE_TOL) {
            return Ok(m);
        }
    }
    Err(Error::NoAdmissibleDirection(attempts))
}

/// Orthonormal bases of `Span(R)` and its complement (modified Gram–Schmidt).
fn split_space(roots: &[Vector], dim: usize) -> (Vec<Vector>, Vec<Vector>) {
    let mut span: Vec<Vector> = Vec::new();
    let orthogonalize = |v: &Vector, basis: &[Vector]| -> Vector {
        let mut u = v.clone();
        for _ in 0..2 {
            for b in basis {
                let c = b.dot(&u);
                u -= b * c;
            }
        }
        u
    };
    for r in roots {
        let u = orthogonalize(r, &span);
        if u.norm() > 1e-10 * r.norm().max(1.0) {
            span.push(&u / u.norm());
        }
    }
    let mut perp: Vec<Vector> = Vec::new();
    for i in 0..dim {
        let mut e = Vector::zeros(dim);
        e[i] = 1.0;
        let mut u = orthogonalize(&e, &span);
        u = orthogonalize(&u, &perp);
        if u.norm() > 1e-10 {
            perp.push(&u / u.norm());
        }
    }
    (span, perp)
}

/// The finite reflection group of a root system, stored as explicit
/// orthogonal matrices.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    elements: Vec<Matrix>,
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    /// Orbit of a point under the group, deduplicated at `tol`.
    pub fn orbit(&self, x: &Vector, tol: f64) -> Vec<Vector> {
        let mut out: Vec<Vector> = Vec::new();
        for g in &self.elements {
            let y = g * x;
            if !out.iter().any(|z| (z - &y).amax() < tol) {
                out.push(y);
            }
        }
        out
    }

    /// Average of `x` over the group orbit (projection onto invariants).
    pub fn symmetrize(&self, x: &Vector) -> Vector {
        let mut s = Vector::zeros(x.len());
        for g in &self.elements {
            s += g * x;
        }
        s / self.elements.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reflect_coordinate() {
        let a = Vector::from_column_slice(&[1.0, 0.0]);
        let x = Vector::from_column_slice(&[3.0, 2.0]);
        let y = reflect(&a, &x).unwrap();
        assert_relative_eq!(y[0], -3.0);
        assert_relative_eq!(y[1], 2.0);
    }

    #[test]
    fn reflect_transposition_root() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = Vector::from_column_slice(&[s, -s]);
        let x = Vector::from_column_slice(&[0.3, -1.7]);
        let y = reflect(&a, &x).unwrap();
        assert_relative_eq!(y[0], -1.7, epsilon = 1e-14);
        assert_relative_eq!(y[1], 0.3, epsilon = 1e-14);
    }

    #[test]
    fn reflect_zero_root_errors() {
        let a = Vector::zeros(2);
        let x = Vector::from_column_slice(&[1.0, 1.0]);
        assert!(matches!(reflect(&a, &x), Err(Error::DegenerateRoot)));
    }

    #[test]
    fn type_a_smallest() {
        let rs = RootSystem::type_a(2).unwrap();
        assert_eq!(rs.positive_roots().len(), 1);
        assert_relative_eq!(rs.gamma(), 1.0);
        assert_eq!(rs.rank(), 1);
        assert_eq!(rs.perp_basis().len(), 1);
        // perp direction is the diagonal
        let d = &rs.perp_basis()[0];
        assert_relative_eq!(d[0].abs(), d[1].abs(), epsilon = 1e-14);
    }

    #[test]
    fn type_a_four_particles() {
        let rs = RootSystem::type_a(4).unwrap();
        assert_eq!(rs.positive_roots().len(), 6);
        assert_relative_eq!(rs.gamma(), 6.0);
        assert_eq!(rs.rank(), 3);
        let w = rs.weyl_group().unwrap();
        assert_eq!(w.order(), 24);
    }

    #[test]
    fn type_a3_weyl_is_s3_permutations() {
        let rs = RootSystem::type_a(3).unwrap();
        let w = rs.weyl_group().unwrap();
        assert_eq!(w.order(), 6);
        // every element is a permutation matrix
        for g in w.elements() {
            for v in g.iter() {
                assert!(v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12, "entry {v}");
            }
            for c in 0..3 {
                let col_sum: f64 = (0..3).map(|r| g[(r, c)]).sum();
                assert_relative_eq!(col_sum, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn type_b_multiplicities_and_gamma() {
        let rs = RootSystem::type_b(2, 0.5).unwrap();
        assert_relative_eq!(rs.gamma(), 4.0);
        assert_eq!(rs.rank(), 2);
        let w = rs.weyl_group().unwrap();
        assert_eq!(w.order(), 8);

        let b1 = RootSystem::type_b(1, 0.5).unwrap();
        assert_relative_eq!(b1.gamma(), 1.0);
        assert_eq!(b1.positive_roots().len(), 1);
    }

    #[test]
    fn type_b_rejects_bad_bessel_index() {
        assert!(matches!(RootSystem::type_b(2, -1.0), Err(Error::BesselIndexOutOfRange(_))));
        // nu in (-1, -1/2) gives a negative short multiplicity
        assert!(matches!(RootSystem::type_b(2, -0.7), Err(Error::KappaNotPositive(_))));
    }

    #[test]
    fn non_reduced_pair_rejected() {
        let roots = vec![
            Vector::from_column_slice(&[1.0]),
            Vector::from_column_slice(&[-1.0]),
            Vector::from_column_slice(&[2.0]),
            Vector::from_column_slice(&[-2.0]),
        ];
        let res = RootSystem::from_roots(roots, vec![1.0; 4]);
        assert!(matches!(res, Err(Error::NotReduced { .. })));
    }

    #[test]
    fn b1_embedded_in_plane() {
        let roots = vec![
            Vector::from_column_slice(&[1.0, 0.0]),
            Vector::from_column_slice(&[-1.0, 0.0]),
        ];
        let rs = RootSystem::from_roots(roots, vec![1.0, 1.0]).unwrap();
        assert_eq!(rs.rank(), 1);
        assert_eq!(rs.ambient_dim(), 2);
        assert_eq!(rs.perp_basis().len(), 1);
        assert_relative_eq!(rs.perp_basis()[0][1].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn closure_violation_detected() {
        // {±e1, ±e2} is closed, but dropping one root breaks closure of the
        // remaining reflections only if reflections map outside; use a pair
        // of non-orthogonal directions that is genuinely not closed.
        let c = (std::f64::consts::PI / 3.0).cos();
        let s = (std::f64::consts::PI / 3.0).sin();
        let roots = vec![
            Vector::from_column_slice(&[1.0, 0.0]),
            Vector::from_column_slice(&[-1.0, 0.0]),
            Vector::from_column_slice(&[c, s]),
            Vector::from_column_slice(&[-c, -s]),
        ];
        let res = RootSystem::from_roots(roots, vec![1.0; 4]);
        assert!(matches!(res, Err(Error::ClosureViolation { .. })));
    }

    #[test]
    fn kappa_invariance_enforced() {
        // B_2 root lengths distinguish orbits; breaking κ within the long
        // orbit must fail
        let rs = RootSystem::type_b(2, 0.5).unwrap();
        let roots = rs.roots().to_vec();
        let mut kappa = rs.kappa_all().to_vec();
        let i = roots.iter().position(|r| (r.norm_squared() - 2.0).abs() < 1e-12).unwrap();
        kappa[i] = 2.0;
        assert!(matches!(
            RootSystem::from_roots(roots, kappa),
            Err(Error::KappaNotInvariant { .. })
        ));
    }

    #[test]
    fn renormalization_required() {
        let roots = vec![
            Vector::from_column_slice(&[1.0]),
            Vector::from_column_slice(&[-1.0]),
        ];
        let res = RootSystem::from_roots(roots, vec![2.0, 2.0]);
        assert!(matches!(res, Err(Error::KappaNotRenormalized)));
    }

    #[test]
    fn positive_choice_independence() {
        let roots = RootSystem::type_b(2, 0.5).unwrap();
        let m1 = Vector::from_column_slice(&[0.9, 0.31]);
        let m2 = Vector::from_column_slice(&[-0.13, -0.87]);
        let r1 = RootSystem::from_roots_with_choice(roots.roots().to_vec(), roots.kappa_all().to_vec(), m1).unwrap();
        let r2 = RootSystem::from_roots_with_choice(roots.roots().to_vec(), roots.kappa_all().to_vec(), m2).unwrap();
        assert_relative_eq!(r1.gamma(), r2.gamma(), epsilon = 1e-14);
        assert!((r1.schur_sum() - r2.schur_sum()).amax() < 1e-13);
    }

    #[test]
    fn weyl_group_closure_property() {
        let rs = RootSystem::type_b(2, 0.5).unwrap();
        let w = rs.weyl_group().unwrap();
        for g in w.elements() {
            for h in w.elements() {
                let prod = g * h;
                let found = w.elements().iter().any(|e| (e - &prod).amax() < 1e-9);
                assert!(found, "product left the group");
            }
        }
        // identity present, inverses present (finite group of orthogonals)
        let id = Matrix::identity(2, 2);
        assert!(w.elements().iter().any(|e| (e - &id).amax() < 1e-12));
    }

    #[test]
    fn weyl_elements_preserve_roots_and_perp() {
        let roots = vec![
            Vector::from_column_slice(&[1.0, 0.0]),
            Vector::from_column_slice(&[-1.0, 0.0]),
        ];
        let rs = RootSystem::from_roots(roots, vec![1.0, 1.0]).unwrap();
        let w = rs.weyl_group().unwrap();
        assert_eq!(w.order(), 2);
        let perp = &rs.perp_basis()[0];
        for g in w.elements() {
            assert!((g * perp - perp).amax() < 1e-12);
            for r in rs.roots() {
                let img = g * r;
                assert!(rs.roots().iter().any(|s| (s - &img).amax() < 1e-9));
            }
        }
    }

    #[test]
    fn group_cap_enforced() {
        let rs = RootSystem::type_a(4).unwrap();
        assert!(matches!(rs.weyl_group_capped(10), Err(Error::GroupTooLarge(10))));
    }

    #[test]
    fn json_roundtrip() {
        let rs = RootSystem::type_b(2, 2.0).unwrap();
        let json = rs.to_json();
        let back = RootSystem::from_json(&json).unwrap();
        assert_relative_eq!(back.gamma(), rs.gamma(), epsilon = 1e-14);
        assert_eq!(back.positive_roots().len(), rs.positive_roots().len());
    }

    #[test]
    fn dihedral_i2_4_matches_b2() {
        // I_2(4) = B_2 rotated by 45 degrees: eight roots at angles k*pi/4,
        // alternating lengths 1 and sqrt(2)
        let mut roots = Vec::new();
        let mut kappa = Vec::new();
        for k in 0..8 {
            let th = k as f64 * std::f64::consts::FRAC_PI_4;
            let len = if k % 2 == 0 { 1.0f64 } else { 2.0f64.sqrt() };
            roots.push(Vector::from_column_slice(&[len * th.cos(), len * th.sin()]));
            kappa.push(1.0);
        }
        let dihedral = RootSystem::from_roots(roots, kappa).unwrap();
        let b2 = RootSystem::type_b(2, 0.5).unwrap();
        assert_relative_eq!(dihedral.gamma(), b2.gamma(), epsilon = 1e-12);
        assert_eq!(dihedral.weyl_group().unwrap().order(), b2.weyl_group().unwrap().order());
    }
}
