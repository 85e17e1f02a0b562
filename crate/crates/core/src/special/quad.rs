//! Adaptive Simpson quadrature with interval bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    /// Maximum bisection depth of any branch.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-10, max_subdivisions: 60 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, max_subdivisions: u32) -> Result<Self> {
        let q = QuadratureSpec { abs_tol, max_subdivisions };
        q.validate()?;
        Ok(q)
    }

    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureSpec { abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol", format!("must be > 0, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be >= 1"));
        }
        Ok(())
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `q.abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, q: &QuadratureSpec) -> Result<f64> {
    try_integrate(|x| Ok(f(x)), a, b, q)
}

/// As [`integrate`] for integrands that can fail; the first error aborts.
///
/// The panel with the largest Richardson error estimate is bisected until
/// the summed estimate drops below `abs_tol`. Bisecting a panel deeper than
/// `max_subdivisions` levels is a nonconvergence error.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, q: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    q.validate()?;
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let m = 0.5 * (lo + hi);
    let (flo, fm, fhi) = (f(lo)?, f(m)?, f(hi)?);
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    let mut done = 0.0;
    let root = Panel::split(&mut f, lo, hi, flo, fm, fhi, simpson(lo, hi, flo, fm, fhi), 0)?;
    for half in root {
        total_err += half.err;
        heap.push(half);
    }
    while total_err > q.abs_tol {
        let Some(worst) = heap.pop() else { break };
        total_err -= worst.err;
        if worst.err == 0.0 {
            done += worst.value;
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        if worst.depth + 1 >= q.max_subdivisions || m <= worst.a || m >= worst.b {
            return Err(Error::QuadratureNonConvergence {
                abs_tol: q.abs_tol,
                max_subdivisions: q.max_subdivisions,
            });
        }
        let halves =
            Panel::split(&mut f, worst.a, worst.b, worst.fa, worst.fm, worst.fb, worst.value, worst.depth)?;
        for half in halves {
            total_err += half.err;
            heap.push(half);
        }
        // Guard against drift from repeated subtraction.
        if total_err < 0.0 {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let rest: f64 = heap.into_iter().map(|p| p.value + p.correction).sum();
    Ok(sign * (done + rest))
}

/// A Simpson panel whose error was estimated against its parent.
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    /// Simpson estimate over `[a, b]`.
    value: f64,
    /// Richardson correction, `(left + right − whole) / 15` shared by halves.
    correction: f64,
    err: f64,
    depth: u32,
}

impl Panel {
    #[allow(clippy::too_many_arguments)]
    fn split<F>(f: &mut F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: u32) -> Result<[Panel; 2]>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let m = 0.5 * (a + b);
        let (flm, frm) = (f(0.5 * (a + m))?, f(0.5 * (m + b))?);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        // Below ~1e-15 relative the difference is pure rounding noise.
        let floor = 1e-15 * (left.abs() + right.abs());
        let err = if delta.abs() <= floor { 0.0 } else { delta.abs() / 15.0 };
        let correction = delta / 30.0;
        Ok([
            Panel { a, b: m, fa, fm: flm, fb: fm, value: left, correction, err: err / 2.0, depth: depth + 1 },
            Panel { a: m, b, fa: fm, fm: frm, fb, value: right, correction, err: err / 2.0, depth: depth + 1 },
        ])
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}
