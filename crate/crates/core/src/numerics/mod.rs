//! Shared numerical machinery: special functions, adaptive quadrature and
//! small least-squares fitters.

pub mod fit;
pub mod quad;
pub mod special;
pub mod stats;
