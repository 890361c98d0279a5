//! Jump-diffusion Monte Carlo for Dunkl processes on any root system.
//!
//! Between jumps the process follows the Euler–Maruyama discretization of
//! `dx = (β/2) Σ κ(α) α/(α·x) dt + dB_t`; chamber exchanges are realized by
//! thinning independent per-root clocks with the step-wise frozen rate
//! `r_α(x) = (β/4) κ(α) |α|² / (α·x)²` (read off the exchange term of the
//! backward equation), applying at most one reflection per root per step.
//!
//! Paths are independent with counter-based RNG streams derived from
//! `(seed, path_index)`, so ensembles are reproducible under parallel
//! execution; aggregation is a fixed-order reduction over path indices.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::numerics::quad::integrate_opt;
use crate::numerics::quad::QuadOptions;
use crate::{Error, Result, RootSystem, Vector};

/// Point mass or finite mixture of point masses in `Span(R)`.
#[derive(Debug, Clone)]
pub enum InitialCondition {
    Point(Vector),
    /// `(weight, position)` pairs; weights must sum to 1.
    Mixture(Vec<(f64, Vector)>),
}

impl InitialCondition {
    /// The `W`-symmetrized mixture `1/|W| Σ_ρ δ_{ρ x0}`.
    pub fn symmetrized(rs: &RootSystem, x0: &Vector) -> Result<Self> {
        let w = rs.weyl_group()?;
        let weight = 1.0 / w.order() as f64;
        Ok(InitialCondition::Mixture(
            w.elements().iter().map(|g| (weight, g * x0)).collect(),
        ))
    }

    pub fn components(&self) -> Vec<(f64, Vector)> {
        match self {
            InitialCondition::Point(x) => vec![(1.0, x.clone())],
            InitialCondition::Mixture(v) => v.clone(),
        }
    }
}

/// Ensemble configuration. `record` times must be positive, increasing and
/// bounded by `horizon`.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub beta: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub base_dt: f64,
    /// Fraction of the squared wall distance allowed per step, in `(0, 1]`.
    pub dt_safety: f64,
    pub seed: u64,
    pub initial: InitialCondition,
    pub record: Vec<f64>,
}

impl SimConfig {
    pub fn new(beta: f64, horizon: f64, n_paths: usize, seed: u64, initial: InitialCondition) -> Self {
        SimConfig {
            beta,
            horizon,
            n_paths,
            base_dt: 0.01,
            dt_safety: 0.05,
            seed,
            initial,
            record: vec![horizon],
        }
    }

    pub fn with_record(mut self, record: Vec<f64>) -> Self {
        self.record = record;
        self
    }

    pub fn with_dt(mut self, base_dt: f64, dt_safety: f64) -> Self {
        self.base_dt = base_dt;
        self.dt_safety = dt_safety;
        self
    }

    fn validate(&self, rs: &RootSystem) -> Result<()> {
        if self.beta <= 0.0 {
            return Err(Error::NonPositiveBeta(self.beta));
        }
        if self.horizon <= 0.0 {
            return Err(Error::NonPositiveTime(self.horizon));
        }
        for (_, x0) in self.initial.components() {
            let res = rs.project_perp(&x0).norm();
            if res > 1e-9 {
                return Err(Error::NotInRootSpan(res));
            }
        }
        if self.record.is_empty()
            || self.record.windows(2).any(|w| w[1] <= w[0])
            || self.record[0] <= 0.0
            || *self.record.last().unwrap() > self.horizon + 1e-12
        {
            return Err(Error::NonPositiveTime(*self.record.first().unwrap_or(&-1.0)));
        }
        Ok(())
    }
}

/// Histogram grid: `bins` bins per axis over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl GridSpec {
    fn index(&self, x: f64) -> Option<usize> {
        if x < self.lo || x >= self.hi {
            return None;
        }
        Some(((x - self.lo) / (self.hi - self.lo) * self.bins as f64) as usize)
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.bins as f64;
        (0..self.bins).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }
}

/// Histogram and moment summary of the scaled ensemble at one recorded
/// time. `samples` keeps the scaled coordinates (row-major
/// `n_samples × dim`) so that distribution tests can run on the raw data.
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    pub time: f64,
    pub dim: usize,
    pub grid: GridSpec,
    /// Per-axis marginal counts (full joint only when `dim == 1`).
    pub counts: Vec<Vec<u64>>,
    pub n_samples: usize,
    /// Per-axis raw moments of the scaled coordinates, orders 1..=4.
    pub moments: Vec<[f64; 4]>,
    /// `⟨|X_t|²⟩` in unscaled coordinates.
    pub mean_sq_radius_unscaled: f64,
    pub jump_count_mean: f64,
    pub samples: Vec<f64>,
}

impl DensityEstimate {
    pub fn axis_samples(&self, axis: usize) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.samples[i * self.dim + axis]).collect()
    }

    /// Scaled samples projected on a unit direction.
    pub fn projected_samples(&self, dir: &Vector) -> Vec<f64> {
        (0..self.n_samples)
            .map(|i| {
                (0..self.dim)
                    .map(|k| self.samples[i * self.dim + k] * dir[k])
                    .sum()
            })
            .collect()
    }

    /// Sample standard error of the mean of `|X|²` (unscaled radius law).
    pub fn sq_radius_stderr(&self, scale_back: f64) -> f64 {
        // samples are scaled; |x|² = scale² |Y|²
        let n = self.n_samples;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = 0.0;
                for k in 0..self.dim {
                    let v = self.samples[i * self.dim + k];
                    s += v * v;
                }
                s * scale_back * scale_back
            })
            .collect();
        crate::numerics::stats::stderr_of_mean(&vals)
    }
}

/// Flattened positive-root data for the hot loop.
struct Stepper {
    dim: usize,
    n_roots: usize,
    alphas: Vec<f64>,
    kappa: Vec<f64>,
    norm_sq: Vec<f64>,
    beta: f64,
}

impl Stepper {
    fn new(rs: &RootSystem, beta: f64) -> Self {
        let dim = rs.ambient_dim();
        let mut alphas = Vec::new();
        let mut kappa = Vec::new();
        let mut norm_sq = Vec::new();
        for (a, k) in rs.positive() {
            if k == 0.0 {
                continue; // degenerate orbit: no drift, no jumps
            }
            alphas.extend_from_slice(a.as_slice());
            kappa.push(k);
            norm_sq.push(a.norm_squared());
        }
        Stepper { dim, n_roots: kappa.len(), alphas, kappa, norm_sq, beta }
    }

    fn dot_root(&self, r: usize, x: &[f64]) -> f64 {
        let a = &self.alphas[r * self.dim..(r + 1) * self.dim];
        a.iter().zip(x).map(|(ai, xi)| ai * xi).sum()
    }

    /// Adaptive step size bound from the squared wall distances.
    fn adaptive_dt(&self, x: &[f64], base_dt: f64, safety: f64) -> f64 {
        let mut dt = base_dt;
        for r in 0..self.n_roots {
            let ax = self.dot_root(r, x);
            let bound = safety * ax * ax / (self.beta * self.kappa[r] * self.norm_sq[r]);
            dt = dt.min(bound);
        }
        dt.max(1e-12)
    }

    /// One Euler–Maruyama step plus jump thinning over time `dt`.
    /// Splits the step recursively if a wall is hit, up to `depth` halvings.
    fn advance(
        &self,
        x: &mut Vec<f64>,
        dt: f64,
        rng: &mut ChaCha8Rng,
        jumps: &mut u64,
        depth: usize,
    ) -> Result<()> {
        let mut cand = vec![0.0; self.dim];
        cand.copy_from_slice(x);
        // drift with rates frozen at the step start
        for r in 0..self.n_roots {
            let ax = self.dot_root(r, x);
            let c = 0.5 * self.beta * self.kappa[r] / ax * dt;
            let a = &self.alphas[r * self.dim..(r + 1) * self.dim];
            for (ci, ai) in cand.iter_mut().zip(a) {
                *ci += c * ai;
            }
        }
        let sqrt_dt = dt.sqrt();
        for ci in cand.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *ci += sqrt_dt * g;
        }
        // exchange: independent thinning per positive root
        let mut jumped = 0u64;
        for r in 0..self.n_roots {
            let ax0 = self.dot_root(r, x);
            let rate = 0.25 * self.beta * self.kappa[r] * self.norm_sq[r] / (ax0 * ax0);
            let p = -(-rate * dt).exp_m1();
            if rng.random::<f64>() < p {
                let ax = self.dot_root(r, &cand);
                let c = 2.0 * ax / self.norm_sq[r];
                let a = &self.alphas[r * self.dim..(r + 1) * self.dim];
                for (ci, ai) in cand.iter_mut().zip(a) {
                    *ci -= c * ai;
                }
                jumped += 1;
            }
        }
        if (0..self.n_roots).any(|r| self.dot_root(r, &cand) == 0.0) {
            if depth >= 10 {
                return Err(Error::StuckAtWall(depth));
            }
            // redo the interval as two half steps with fresh noise
            self.advance(x, dt / 2.0, rng, jumps, depth + 1)?;
            self.advance(x, dt / 2.0, rng, jumps, depth + 1)?;
            return Ok(());
        }
        *jumps += jumped;
        x.copy_from_slice(&cand);
        Ok(())
    }
}

/// A single path with step-level detail, for diagnostics and tests.
#[derive(Debug, Clone)]
pub struct PathTrace {
    pub times: Vec<f64>,
    pub positions: Vec<Vector>,
    /// Jumps applied in the step ending at the matching position.
    pub jumps_per_step: Vec<u64>,
}

/// Run one instrumented path from `x0` to `horizon`.
pub fn run_path_trace(
    rs: &RootSystem,
    cfg: &SimConfig,
    x0: &Vector,
    path_index: u64,
) -> Result<PathTrace> {
    let stepper = Stepper::new(rs, cfg.beta);
    let mut rng = path_rng(cfg.seed, path_index);
    let mut x = x0.as_slice().to_vec();
    let mut t = 0.0;
    let mut trace = PathTrace {
        times: vec![0.0],
        positions: vec![x0.clone()],
        jumps_per_step: vec![],
    };
    while t < cfg.horizon - 1e-15 {
        let dt = stepper.adaptive_dt(&x, cfg.base_dt, cfg.dt_safety).min(cfg.horizon - t);
        let mut jumps = 0u64;
        stepper.advance(&mut x, dt, &mut rng, &mut jumps, 0)?;
        t += dt;
        trace.times.push(t);
        trace.positions.push(Vector::from_column_slice(&x));
        trace.jumps_per_step.push(jumps);
    }
    Ok(trace)
}

fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index.wrapping_add(1));
    rng
}

struct PathResult {
    snapshots: Vec<Vec<f64>>, // one unscaled state per record time
    jumps: u64,
}

fn run_path(rs_stepper: &Stepper, cfg: &SimConfig, x0: &[f64], path_index: u64) -> Result<PathResult> {
    let mut rng = path_rng(cfg.seed, path_index);
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut jumps = 0u64;
    let mut snapshots = Vec::with_capacity(cfg.record.len());
    for &t_rec in &cfg.record {
        while t < t_rec - 1e-15 {
            let dt = rs_stepper.adaptive_dt(&x, cfg.base_dt, cfg.dt_safety).min(t_rec - t);
            rs_stepper.advance(&mut x, dt, &mut rng, &mut jumps, 0)?;
            t += dt;
        }
        snapshots.push(x.clone());
    }
    Ok(PathResult { snapshots, jumps })
}

/// Run the ensemble and summarize each recorded time in the scaled
/// coordinates `Y = x / sqrt(β t)`. Deterministic for a fixed config.
pub fn run_ensemble(rs: &RootSystem, cfg: &SimConfig) -> Result<Vec<DensityEstimate>> {
    cfg.validate(rs)?;
    let stepper = Stepper::new(rs, cfg.beta);
    let comps = cfg.initial.components();
    let dim = rs.ambient_dim();

    // deterministic initial condition per path: split the index range by
    // cumulative weight so mixtures are honored exactly
    let starts: Vec<Vec<f64>> = {
        let mut cum = 0.0;
        let mut boundaries = Vec::new();
        for (w, _) in &comps {
            cum += w;
            boundaries.push((cum * cfg.n_paths as f64).round() as usize);
        }
        (0..cfg.n_paths)
            .map(|p| {
                let k = boundaries.iter().position(|&b| p < b).unwrap_or(comps.len() - 1);
                comps[k].1.as_slice().to_vec()
            })
            .collect()
    };

    let results: Vec<Result<PathResult>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|p| run_path(&stepper, cfg, &starts[p], p as u64))
        .collect();

    let stuck = results.iter().filter(|r| r.is_err()).count();
    if stuck * 1000 > cfg.n_paths {
        return Err(Error::TooManyStuckPaths { stuck, total: cfg.n_paths });
    }
    let ok: Vec<&PathResult> = results.iter().filter_map(|r| r.as_ref().ok()).collect();

    let sqg = rs.gamma().sqrt();
    let grid = GridSpec { lo: -3.0 * sqg, hi: 3.0 * sqg, bins: 200 };
    let mut out = Vec::with_capacity(cfg.record.len());
    for (ti, &t_rec) in cfg.record.iter().enumerate() {
        let scale = 1.0 / (cfg.beta * t_rec).sqrt();
        let n = ok.len();
        let mut samples = Vec::with_capacity(n * dim);
        let mut counts = vec![vec![0u64; grid.bins]; dim];
        let mut moments = vec![[0.0f64; 4]; dim];
        let mut sq_radius = 0.0;
        let mut jump_total = 0u64;
        for pr in &ok {
            let snap = &pr.snapshots[ti];
            let mut r2 = 0.0;
            for (axis, &xi) in snap.iter().enumerate() {
                let y = xi * scale;
                samples.push(y);
                r2 += xi * xi;
                if let Some(b) = grid.index(y) {
                    counts[axis][b] += 1;
                }
                let mut pw = 1.0;
                for mom in moments[axis].iter_mut() {
                    pw *= y;
                    *mom += pw;
                }
            }
            sq_radius += r2;
            jump_total += pr.jumps;
        }
        for axis_moments in moments.iter_mut() {
            for m in axis_moments.iter_mut() {
                *m /= n as f64;
            }
        }
        out.push(DensityEstimate {
            time: t_rec,
            dim,
            grid,
            counts,
            n_samples: n,
            moments,
            mean_sq_radius_unscaled: sq_radius / n as f64,
            jump_count_mean: jump_total as f64 / n as f64,
            samples,
        });
    }
    Ok(out)
}

/// Exact i.i.d. samples of `p_{B_1}(t, · | x0)` via a tabulated inverse CDF
/// (10^4-point grid, monotone piecewise-linear inversion). Reference
/// sampler with no time-discretization error.
pub fn sample_exact_1d(t: f64, x0: f64, beta: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    const GRID: usize = 10_000;
    let width = (beta * t).sqrt() * (1.0 + 6.0 / beta.sqrt()) + x0.abs() + 8.0 * t.sqrt();
    let ys: Vec<f64> = (0..GRID).map(|i| -width + 2.0 * width * i as f64 / (GRID - 1) as f64).collect();
    let pdf: Vec<f64> = ys
        .iter()
        .map(|&y| crate::exact1d::tpd_b1(t, y, x0, beta).unwrap_or(0.0))
        .collect();
    let mut cdf = vec![0.0f64; GRID];
    for i in 1..GRID {
        let inc = 0.5 * (pdf[i] + pdf[i - 1]) * (ys[i] - ys[i - 1]);
        if inc < 0.0 {
            return Err(Error::CdfNonMonotone(ys[i]));
        }
        cdf[i] = cdf[i - 1] + inc;
    }
    let total = cdf[GRID - 1];
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::CdfNonMonotone(0.0));
    }
    for c in cdf.iter_mut() {
        *c /= total;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let idx = cdf.partition_point(|&c| c < u).clamp(1, GRID - 1);
        let (c0, c1) = (cdf[idx - 1], cdf[idx]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        out.push(ys[idx - 1] + frac * (ys[idx] - ys[idx - 1]));
    }
    Ok(out)
}

/// CDF of the exact transition density by quadrature, for KS testing.
pub fn exact_cdf_1d(t: f64, x0: f64, beta: f64) -> Result<impl Fn(f64) -> f64> {
    const GRID: usize = 4000;
    let width = (beta * t).sqrt() * (1.0 + 6.0 / beta.sqrt()) + x0.abs() + 8.0 * t.sqrt();
    let ys: Vec<f64> = (0..GRID).map(|i| -width + 2.0 * width * i as f64 / (GRID - 1) as f64).collect();
    let mut cdf = vec![0.0f64; GRID];
    for i in 1..GRID {
        let q = integrate_opt(
            |y| crate::exact1d::tpd_b1(t, y, x0, beta).unwrap_or(0.0),
            ys[i - 1],
            ys[i],
            QuadOptions { abs_tol: 1e-12, rel_tol: 1e-8, max_intervals: 100 },
        )?;
        cdf[i] = cdf[i - 1] + q.value;
    }
    let total = cdf[GRID - 1];
    for c in cdf.iter_mut() {
        *c /= total;
    }
    Ok(move |y: f64| {
        if y <= ys[0] {
            return 0.0;
        }
        if y >= ys[GRID - 1] {
            return 1.0;
        }
        let idx = ys.partition_point(|&v| v < y).clamp(1, GRID - 1);
        let frac = (y - ys[idx - 1]) / (ys[idx] - ys[idx - 1]);
        cdf[idx - 1] + frac * (cdf[idx] - cdf[idx - 1])
    })
}
