//! Adaptive Gauss–Kronrod quadrature (7–15 point rule with bisection).

#![allow(clippy::excessive_precision)] // node tables at full printed precision

use crate::{Error, Result};

/// 15-point Kronrod abscissae on [0, 1] side of the interval (symmetric).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// 7-point Gauss weights.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod weights.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Single Gauss–Kronrod 7-15 panel; returns (integral, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            // the odd Kronrod nodes are the embedded Gauss nodes
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    resasc *= half.abs();

    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0f64.min((200.0 * err / resasc).powf(1.5));
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Adaptive integration of `f` over `[a, b]` by repeated bisection of the
/// panel with the largest error estimate.
pub fn integrate_opt<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opt: QuadOptions) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error_estimate: 0.0, intervals: 0 });
    }
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let (v, e) = qk15(&f, a, b);
    let mut panels = vec![Panel { a, b, value: v, err: e }];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let tol = opt.abs_tol.max(opt.rel_tol * total.abs());
        if err <= tol {
            return Ok(Quadrature { value: total, error_estimate: err, intervals: panels.len() });
        }
        if panels.len() >= opt.max_intervals {
            return Err(Error::QuadratureNoConvergence { estimate: err, tolerance: tol });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let (v1, e1) = qk15(&f, p.a, mid);
        let (v2, e2) = qk15(&f, mid, p.b);
        panels.push(Panel { a: p.a, b: mid, value: v1, err: e1 });
        panels.push(Panel { a: mid, b: p.b, value: v2, err: e2 });
    }
}

/// Adaptive integration with the default tolerances (abs 1e-12, rel 1e-10).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_opt(f, a, b, QuadOptions::default()).map(|q| q.value)
}

/// Iterated 2-d integration over `x in [ax, bx]`, `y in bounds(x)`.
pub fn integrate_2d<F, B>(f: F, ax: f64, bx: f64, bounds: B, opt: QuadOptions) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    B: Fn(f64) -> (f64, f64),
{
    let inner_opt = QuadOptions {
        abs_tol: opt.abs_tol / (bx - ax).abs().max(1.0),
        rel_tol: opt.rel_tol * 0.1,
        max_intervals: opt.max_intervals,
    };
    let outer = |x: f64| {
        let (ay, by) = bounds(x);
        match integrate_opt(|y| f(x, y), ay, by, inner_opt) {
            Ok(q) => q.value,
            Err(_) => f64::NAN,
        }
    };
    let q = integrate_opt(outer, ax, bx, opt)?;
    if q.value.is_nan() {
        return Err(Error::QuadratureNoConvergence { estimate: f64::NAN, tolerance: opt.abs_tol });
    }
    Ok(q.value)
}
