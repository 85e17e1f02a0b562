//! The interference functional
//!
//! `Ψ(x, y) = y^x · (πx / sin(πx) − ∫₀^{y^{−x}} dz / (1 + z^{1/x}))`
//!
//! for `0 < x < 1`, and its Taylor jets in `t = 1/y` and in `y` itself.
//! With `x = 2/α`, `Ψ(2/α, s)` is the log-Laplace transform (per unit
//! `πλ r²`) of Rayleigh-faded HPPP interference seen from outside an
//! exclusion ball of radius `r`.

use std::f64::consts::PI;

use super::jet::SeriesJet;
use super::quad::{integrate, QuadratureSpec};
use crate::error::{Error, Result};

fn check_exponent(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("psi exponent x = {x} is outside (0, 1)")))
    }
}

/// Largest `y` evaluated through the power series.
const SERIES_LIMIT: f64 = 0.5;

/// `Ψ(x, y) = x·y·Σ_{n≥0} (−y)^n / (n + 1 − x)`, from expanding the
/// integrand of the small-`y` form. For `y ≤ 1/2` the terms at least halve
/// each step; summing from the smallest keeps the result within a few ulps,
/// which the Taylor jets need because they amplify any error in `Ψ` itself.
fn small_argument_series(x: f64, y: f64) -> f64 {
    let mut terms = Vec::with_capacity(64);
    let mut power = 1.0;
    for n in 0.. {
        let term = power / (n as f64 + 1.0 - x);
        terms.push(term);
        if term.abs() <= f64::EPSILON * 1e-3 * terms[0] {
            break;
        }
        power *= -y;
    }
    x * y * terms.iter().rev().sum::<f64>()
}

/// `Ψ(x, y)`. Returns 0 at `y = 0` and `+∞` at `y = +∞`.
pub fn psi(x: f64, y: f64, q: &QuadratureSpec) -> Result<f64> {
    check_exponent(x)?;
    if y.is_nan() || y < 0.0 {
        return Err(Error::Domain(format!("psi argument y = {y} must be >= 0")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if y <= SERIES_LIMIT {
        return Ok(small_argument_series(x, y));
    }
    if y <= 1.0 {
        // Substituting z = (y·v^{1/(1−x)})^{−x} in the tail integral gives
        // Ψ = x·y/(1−x) · ∫₀¹ dv / (1 + y·v^{1/(1−x)}), free of cancellation
        // for small y.
        let scale = x * y / (1.0 - x);
        let p = 1.0 / (1.0 - x);
        let qs = QuadratureSpec { abs_tol: q.abs_tol / scale, ..*q };
        let body = integrate(|v| 1.0 / (1.0 + y * v.powf(p)), 0.0, 1.0, &qs)?;
        return Ok(scale * body);
    }
    let full = PI * x / (PI * x).sin();
    let upper = y.powf(-x);
    let inv_x = 1.0 / x;
    let scale = y.powf(x);
    let qs = QuadratureSpec { abs_tol: q.abs_tol / scale, ..*q };
    let head = integrate(|z| 1.0 / (1.0 + z.powf(inv_x)), 0.0, upper, &qs)?;
    Ok(scale * (full - head))
}

/// Jet of `g(t) = Ψ(x, 1/t)` about `t0 > 0`.
///
/// Differentiating gives `t·g'(t) = −x·(g(t) + 1/(1+t))`; matching powers of
/// `h = t − t0` yields
/// `a_{n+1} = −((n + x)·a_n + x·b_n) / (t0·(n+1))` with `b_n` the
/// coefficients of `1/(1+t)`.
pub fn psi_recip_jet(x: f64, t0: f64, order: usize, q: &QuadratureSpec) -> Result<SeriesJet> {
    check_exponent(x)?;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Domain(format!("jet center t0 = {t0} must be > 0")));
    }
    let mut a = Vec::with_capacity(order + 1);
    a.push(psi(x, 1.0 / t0, q)?);
    let inv = 1.0 / (1.0 + t0);
    let mut b = inv;
    for n in 0..order {
        let nf = n as f64;
        a.push(-((nf + x) * a[n] + x * b) / (t0 * (nf + 1.0)));
        b *= -inv;
    }
    SeriesJet::new(t0, a)
}

/// Jet of `ψ(s) = Ψ(x, s)` about `s0 > 0`.
///
/// From `s·ψ'(s) = x·ψ(s) + x·s/(1+s)`:
/// `ψ_{n+1} = ((x − n)·ψ_n + x·c_n) / (s0·(n+1))` with `c_n` the coefficients
/// of `s/(1+s)`. For `n ≥ 1` the coefficients alternate in sign, so products
/// and reciprocals built from this jet involve no cancellation.
pub fn psi_jet(x: f64, s0: f64, order: usize, q: &QuadratureSpec) -> Result<SeriesJet> {
    check_exponent(x)?;
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(Error::Domain(format!("jet center s0 = {s0} must be > 0")));
    }
    let mut a = Vec::with_capacity(order + 1);
    a.push(psi(x, s0, q)?);
    let inv = 1.0 / (1.0 + s0);
    // c_0 = s0/(1+s0); c_n = (−1)^{n+1} / (1+s0)^{n+1} for n ≥ 1.
    let mut pow = -inv;
    for n in 0..order {
        let nf = n as f64;
        let c = if n == 0 { s0 * inv } else { pow };
        a.push(((x - nf) * a[n] + x * c) / (s0 * (nf + 1.0)));
        pow *= -inv;
    }
    SeriesJet::new(s0, a)
}
