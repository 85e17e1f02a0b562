//! Numeric kernels: adaptive quadrature, the interference functional `Ψ`,
//! truncated Taylor series and expectations over the elevation angle.

mod jet;
mod psi;
mod quad;

pub use jet::{derivative_at, SeriesJet};
pub use psi::{psi, psi_jet, psi_recip_jet};
pub use quad::{integrate, try_integrate, QuadratureSpec};

use crate::error::Result;
use crate::network::ElevationModel;

/// `E[f(Θ)]` under the elevation model.
pub fn expect_over_theta<F>(f: F, model: &ElevationModel, q: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f = f;
    try_expect_over_theta(|t| Ok(f(t)), model, q)
}

/// [`expect_over_theta`] for fallible integrands.
pub fn try_expect_over_theta<F>(mut f: F, model: &ElevationModel, q: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    match *model {
        ElevationModel::Deterministic(theta) => f(theta),
        ElevationModel::Uniform { lo, hi } if lo == hi => f(lo),
        ElevationModel::Uniform { lo, hi } => Ok(try_integrate(f, lo, hi, q)? / (hi - lo)),
    }
}
