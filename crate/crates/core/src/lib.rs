//! Numerical library for Dunkl processes on reduced root systems.
//!
//! A Dunkl process is a jump diffusion on `R^N` attached to a root system `R`
//! with multiplicities `κ` and coupling `β`: inside each Weyl chamber it
//! diffuses with a logarithmic drift away from the chamber walls, and it
//! jumps between chambers by root reflections. Under the scaling
//! `Y = y / sqrt(βt)` the law of the process converges to the Gibbs density
//! `exp(-β F_R(Y)) / z_β` with `F_R(Y) = Y²/2 - Σ κ(α) log|α·Y|`.
//!
//! The crate provides:
//!
//! * [`rootsys`] — root systems, Weyl groups, reflection operators;
//! * [`potential`] — the free energy `F_R`, peak sets, steady-state
//!   densities and their Gaussian strong-coupling approximations;
//! * [`intertwine`] — computable actions of the intertwining operator:
//!   linear functions, large-`β` kernel asymptotics, the exact rank-one
//!   kernel, and Rösler's bounds;
//! * [`exact1d`] — the exact one-dimensional transition density and
//!   quadrature-based expectations (the ground-truth oracle);
//! * [`simulate`] — a reproducible jump-diffusion Monte Carlo sampler for
//!   arbitrary root systems;
//! * [`asymfit`] — decay-exponent and Gaussian-mixture fits quantifying the
//!   approach to the steady state (`t → ∞`) and the strong-coupling limit
//!   (`β → ∞`).

pub mod asymfit;
mod error;
pub mod exact1d;
pub mod intertwine;
pub mod numerics;
pub mod potential;
pub mod rootsys;
pub mod simulate;

pub use error::{Error, Result};
pub use rootsys::{MultivariatePolynomial, RootSystem, WeylGroup};

/// Dense column vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
