//! Network constants, the low-altitude-platform LoS model, relay geometry and
//! homogeneous Poisson point-process samplers.
//!
//! Elevation angles are in radians. The LoS constants `(c1, c2)` of the
//! suburban preset were fitted on radian input; feeding degrees into
//! [`los_probability`] pushes the LoS probability to 1 for every angle above
//! a fraction of a degree.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar constants of the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    /// BS transmit power `P` in watts.
    pub tx_power_watts: f64,
    /// BS density `λ_B` in BSs/m².
    pub bs_density: f64,
    /// Density of UAV ground projections `λ_D` in UAVs/m².
    pub uav_density: f64,
    /// User density `μ` in users/m².
    pub user_density: f64,
    /// Path-loss exponent `α > 2`.
    pub pathloss_exponent: f64,
    /// 3D LoS channel enhancement factor `η ≥ 1`.
    pub los_enhancement: f64,
    pub los_c1: f64,
    pub los_c2: f64,
    /// Number of IRS reflecting elements `R`.
    pub irs_elements: u32,
    /// SIR threshold `β`.
    pub sir_threshold: f64,
}

impl NetworkParams {
    /// Suburban simulation constants. The user density is not part of that
    /// parameter set; it defaults to the UAV density.
    pub fn table1() -> Self {
        NetworkParams {
            tx_power_watts: 30.0,
            bs_density: 1e-5,
            uav_density: 1e-4,
            user_density: 1e-4,
            pathloss_exponent: 3.0,
            los_enhancement: 2.5,
            los_c1: 24.5811,
            los_c2: 39.5971,
            irs_elements: 8,
            sir_threshold: 0.5,
        }
    }

    pub fn with_irs_elements(mut self, elements: u32) -> Self {
        self.irs_elements = elements;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
            }
        }
        positive("tx_power_watts", self.tx_power_watts)?;
        positive("bs_density", self.bs_density)?;
        positive("uav_density", self.uav_density)?;
        positive("user_density", self.user_density)?;
        positive("los_c1", self.los_c1)?;
        positive("los_c2", self.los_c2)?;
        positive("sir_threshold", self.sir_threshold)?;
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent > 2.0) {
            return Err(Error::invalid(
                "pathloss_exponent",
                format!("must be > 2, got {}", self.pathloss_exponent),
            ));
        }
        if !(self.los_enhancement.is_finite() && self.los_enhancement >= 1.0) {
            return Err(Error::invalid("los_enhancement", format!("must be >= 1, got {}", self.los_enhancement)));
        }
        if self.irs_elements < 1 {
            return Err(Error::invalid("irs_elements", "must be >= 1"));
        }
        Ok(())
    }

    /// `2/α`, the first argument of the interference functional.
    pub fn psi_exponent(&self) -> f64 {
        2.0 / self.pathloss_exponent
    }
}

/// NOMA power pair `(P_n, P_f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub p_near: f64,
    pub p_far: f64,
}

impl PowerSplit {
    pub fn new(p_near: f64, p_far: f64) -> Result<Self> {
        for (field, v) in [("p_near", p_near), ("p_far", p_far)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(PowerSplit { p_near, p_far })
    }

    /// Splits `total` so that `P_n / P_f = ratio`.
    pub fn from_ratio(total: f64, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::invalid("ratio", format!("must be finite and > 0, got {ratio}")));
        }
        let p_far = total / (1.0 + ratio);
        PowerSplit::new(total - p_far, p_far)
    }

    pub fn total(&self) -> f64 {
        self.p_near + self.p_far
    }

    /// Checks `P_n + P_f = P` for the owning parameter set.
    pub fn check_against(&self, params: &NetworkParams) -> Result<()> {
        let p = params.tx_power_watts;
        if (self.total() - p).abs() > 1e-9 * p.max(1.0) {
            return Err(Error::invalid("power_split", format!("P_n + P_f = {} but P = {p}", self.total())));
        }
        Ok(())
    }
}

/// Distribution of the UAV elevation angle `Θ`, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElevationModel {
    Deterministic(f64),
    /// Uniform on `[lo, hi]`. `lo == hi` is accepted and behaves as
    /// deterministic.
    Uniform {
        lo: f64,
        hi: f64,
    },
}

fn check_angle(field: &'static str, theta: f64) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{field} = {theta} rad is outside (0, π/2)")))
    }
}

impl ElevationModel {
    pub fn deterministic(theta: f64) -> Result<Self> {
        check_angle("theta", theta)?;
        Ok(ElevationModel::Deterministic(theta))
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        check_angle("theta_lo", lo)?;
        check_angle("theta_hi", hi)?;
        if lo > hi {
            return Err(Error::Domain(format!("theta_lo {lo} > theta_hi {hi}")));
        }
        Ok(ElevationModel::Uniform { lo, hi })
    }

    pub fn deterministic_deg(theta_deg: f64) -> Result<Self> {
        Self::deterministic(theta_deg.to_radians())
    }

    /// Smallest and largest angle in the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ElevationModel::Deterministic(t) => (t, t),
            ElevationModel::Uniform { lo, hi } => (lo, hi),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ElevationModel::Deterministic(t) => t,
            ElevationModel::Uniform { lo, hi } if lo == hi => lo,
            ElevationModel::Uniform { lo, hi } => rng.random_range(lo..hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

impl GroundPoint {
    pub fn new(x: f64, y: f64) -> Self {
        GroundPoint { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance_sq(&self, other: &GroundPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &GroundPoint) -> f64 {
        self.distance_sq(other).sqrt()
    }
}

/// A UAV: ground projection plus elevation angle seen from its serving BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavPoint {
    pub projection: GroundPoint,
    pub elevation: f64,
}

impl UavPoint {
    pub fn new(projection: GroundPoint, elevation: f64) -> Result<Self> {
        check_angle("elevation", elevation)?;
        Ok(UavPoint { projection, elevation })
    }
}

#[inline]
pub(crate) fn los_prob_unchecked(c1: f64, c2: f64, theta: f64) -> f64 {
    1.0 / (1.0 + c2 * (-c1 * theta).exp())
}

/// LoS probability `1 / (1 + c2·exp(−c1·θ))` of a 3D link at elevation `θ`
/// (radians).
pub fn los_probability(theta: f64, params: &NetworkParams) -> Result<f64> {
    check_angle("theta", theta)?;
    Ok(los_prob_unchecked(params.los_c1, params.los_c2, theta))
}

/// Draws the LoS gain factor `L ∈ {1, η}`: `η` with probability `ρ(θ)`.
pub fn sample_los_factor<R: Rng + ?Sized>(theta: f64, params: &NetworkParams, rng: &mut R) -> f64 {
    let rho = los_prob_unchecked(params.los_c1, params.los_c2, theta);
    if rng.random::<f64>() < rho {
        params.los_enhancement
    } else {
        1.0
    }
}

/// Length of the reflected path `B_o → D_j → U_f` when the UAV hovers above
/// the midpoint of a ground segment of length `user_distance`.
pub fn relay_path_length(user_distance: f64, theta: f64) -> Result<f64> {
    if !(user_distance.is_finite() && user_distance > 0.0) {
        return Err(Error::Domain(format!("user distance {user_distance} must be > 0")));
    }
    check_angle("theta", theta)?;
    Ok(user_distance / theta.cos())
}

/// Samples an HPPP of the given density restricted to the annulus
/// `r_min <= |x| < r_max` around the origin.
pub fn sample_hppp_disk<R: Rng + ?Sized>(
    density: f64,
    r_min: f64,
    r_max: f64,
    rng: &mut R,
) -> Result<Vec<GroundPoint>> {
    if !(r_min >= 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::Domain(format!("annulus [{r_min}, {r_max}) is empty")));
    }
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::Domain(format!("density {density} must be >= 0")));
    }
    let (a, b) = (r_min * r_min, r_max * r_max);
    let mean = density * PI * (b - a);
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count =
        Poisson::new(mean).map_err(|e| Error::Domain(format!("poisson mean {mean}: {e}")))?.sample(rng) as usize;
    Ok((0..count)
        .map(|_| {
            let r = (a + rng.random::<f64>() * (b - a)).sqrt();
            let phi = rng.random::<f64>() * 2.0 * PI;
            GroundPoint::new(r * phi.cos(), r * phi.sin())
        })
        .collect())
}
