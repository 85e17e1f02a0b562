//! Trial-level Monte Carlo simulation of the near/far SIR model and of the
//! association counts.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, trial
//! index)`, and trials are reduced by integer success counting, so results
//! are bit-identical for any worker count or scheduling order.
//!
//! Distances are handled in the normalized domain `u = πλ_B r²`, where the
//! BS process is a unit-rate Poisson process on `[0, ∞)`: the serving
//! distance of the near user is `Exp(1)`, the far user's is the maximum of
//! two such draws, and interferers beyond the serving BS are consecutive
//! Poisson arrivals. Interferers are simulated out to
//! `u_max = interference_radius_factor²`; the expected interference beyond
//! that radius is added as a constant when `tail_compensation` is on.

use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::association::uav_association_pick;
use crate::error::{Error, Result};
use crate::network::{sample_hppp_disk, sample_los_factor, ElevationModel, NetworkParams, PowerSplit, UavPoint};

/// Largest tolerated first-order coverage bias from truncating the
/// interference field, relative to the threshold-scaled median signal.
pub const TRUNCATION_BIAS_LIMIT: f64 = 1e-4;

/// Fraction of the window radius treated as edge band in association
/// counting.
pub const EDGE_BAND: f64 = 0.2;

/// Minimum expected number of interior BSs per association window.
pub const MIN_INTERIOR_BSS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Interferers are simulated within `factor / √(πλ_B)` of the user.
    pub interference_radius_factor: f64,
    pub ci_level: f64,
    /// Keep the direct BS → far-user path in the far user's SIR.
    pub include_direct_far_path: bool,
    /// Add the mean interference beyond the simulated radius.
    pub tail_compensation: bool,
    /// Worker threads; `None` uses the global rayon pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 100_000,
            seed: 0x5eed,
            interference_radius_factor: 30.0,
            ci_level: 0.95,
            include_direct_far_path: true,
            tail_compensation: true,
            threads: None,
        }
    }
}

/// Truncation error bookkeeping for a [`SimConfig`] at given parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    /// Simulated radius in metres.
    pub radius: f64,
    /// `2πλ_B P r_max^{2−α} / (α − 2)`, the mean interference left out.
    pub omitted_mean: f64,
    /// Standard deviation of the interference left out.
    pub omitted_std: f64,
    /// Median serving power `P·ln2·r_med^{−α}` divided by `β`.
    pub scaled_median_signal: f64,
    /// First-order coverage bias relative to the scaled median signal:
    /// `omitted_mean / signal` without compensation and
    /// `(omitted_std / signal)² / 2` with it.
    pub relative_bias: f64,
}

impl SimConfig {
    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::invalid("trials", "must be >= 1"));
        }
        if !(self.interference_radius_factor >= 10.0 && self.interference_radius_factor.is_finite()) {
            return Err(Error::invalid(
                "interference_radius_factor",
                format!("must be >= 10, got {}", self.interference_radius_factor),
            ));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::invalid("ci_level", format!("must be in (0, 1), got {}", self.ci_level)));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads", "must be >= 1"));
        }
        Ok(())
    }

    pub fn truncation_report(&self, params: &NetworkParams) -> TruncationReport {
        let lambda = params.bs_density;
        let alpha = params.pathloss_exponent;
        let p = params.tx_power_watts;
        let radius = self.interference_radius_factor / (PI * lambda).sqrt();
        let omitted_mean = 2.0 * PI * lambda * p * radius.powf(2.0 - alpha) / (alpha - 2.0);
        // E[G²] = 2 for unit exponential fading.
        let omitted_var = 2.0 * PI * lambda * 2.0 * p * p * radius.powf(2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0);
        let median_distance = (LN_2 / (PI * lambda)).sqrt();
        let scaled_median_signal = p * LN_2 * median_distance.powf(-alpha) / params.sir_threshold;
        let relative_bias = if self.tail_compensation {
            0.5 * omitted_var / (scaled_median_signal * scaled_median_signal)
        } else {
            omitted_mean / scaled_median_signal
        };
        TruncationReport {
            radius,
            omitted_mean,
            omitted_std: omitted_var.sqrt(),
            scaled_median_signal,
            relative_bias,
        }
    }

    /// Rejects configurations whose truncation bias exceeds
    /// [`TRUNCATION_BIAS_LIMIT`].
    pub fn check_truncation(&self, params: &NetworkParams) -> Result<TruncationReport> {
        let r = self.truncation_report(params);
        if r.relative_bias >= TRUNCATION_BIAS_LIMIT {
            return Err(Error::invalid(
                "interference_radius_factor",
                format!(
                    "truncation bias {:.3e} >= {TRUNCATION_BIAS_LIMIT:e} (radius {:.0} m, compensation {})",
                    r.relative_bias, r.radius, self.tail_compensation
                ),
            ));
        }
        Ok(r)
    }
}

/// Empirical coverage probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEstimate {
    pub value: f64,
    /// Normal-approximation binomial CI half-width.
    pub half_width: f64,
    pub trials: u64,
    pub successes: u64,
}

impl CoverageEstimate {
    pub fn from_counts(successes: u64, trials: u64, ci_level: f64) -> Self {
        let n = trials as f64;
        let value = successes as f64 / n;
        let z = Normal::standard().inverse_cdf(0.5 + ci_level / 2.0);
        let half_width = z * (value * (1.0 - value) / n).sqrt();
        CoverageEstimate { value, half_width, trials, successes }
    }
}

/// Random stream for trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_counted<F>(sim: &SimConfig, trial: F) -> Result<u64>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let key = ChaCha8Rng::seed_from_u64(sim.seed).get_seed();
    let run = || {
        (0..sim.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(i);
                trial(&mut rng) as u64
            })
            .sum::<u64>()
    };
    with_pool(sim.threads, run)
}

fn with_pool<T: Send>(threads: Option<usize>, run: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(run()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(run))
            .map_err(|e| Error::invalid("threads", e.to_string())),
    }
}

/// `u^{−α/2}` with fast paths for the common exponents.
#[derive(Debug, Clone, Copy)]
enum PathLoss {
    Cubic,
    Quartic,
    General(f64),
}

impl PathLoss {
    fn new(alpha: f64) -> Self {
        if alpha == 3.0 {
            PathLoss::Cubic
        } else if alpha == 4.0 {
            PathLoss::Quartic
        } else {
            PathLoss::General(-alpha / 2.0)
        }
    }

    #[inline]
    fn gain(self, u: f64) -> f64 {
        match self {
            PathLoss::Cubic => 1.0 / (u * u.sqrt()),
            PathLoss::Quartic => 1.0 / (u * u),
            PathLoss::General(e) => u.powf(e),
        }
    }
}

/// Per-run constants of the interference field, in normalized units.
#[derive(Debug, Clone, Copy)]
struct Field {
    power: f64,
    u_max: f64,
    tail: f64,
    path_loss: PathLoss,
}

impl Field {
    fn new(params: &NetworkParams, sim: &SimConfig) -> Self {
        let half_alpha = params.pathloss_exponent / 2.0;
        let u_max = sim.interference_radius_factor * sim.interference_radius_factor;
        let tail = if sim.tail_compensation {
            params.tx_power_watts * u_max.powf(1.0 - half_alpha) / (half_alpha - 1.0)
        } else {
            0.0
        };
        Field { power: params.tx_power_watts, u_max, tail, path_loss: PathLoss::new(params.pathloss_exponent) }
    }

    /// Inter-cell interference at a user whose serving BS sits at `u_serving`.
    #[inline]
    fn interference<R: Rng>(&self, rng: &mut R, u_serving: f64) -> f64 {
        let mut u = u_serving;
        let mut acc = 0.0;
        loop {
            u += rng.sample::<f64, _>(Exp1);
            if u >= self.u_max {
                break;
            }
            acc += rng.sample::<f64, _>(Exp1) * self.path_loss.gain(u);
        }
        self.power * acc + self.tail
    }
}

fn check_inputs(params: &NetworkParams, split: &PowerSplit, sim: &SimConfig) -> Result<()> {
    params.validate()?;
    split.check_against(params)?;
    sim.validate()
}

/// Empirical near-user coverage.
pub fn simulate_near_coverage(
    params: &NetworkParams,
    split: &PowerSplit,
    sim: &SimConfig,
) -> Result<CoverageEstimate> {
    check_inputs(params, split, sim)?;
    let field = Field::new(params, sim);
    let beta = params.sir_threshold;
    let (p_near, p_far) = (split.p_near, split.p_far);
    // SIC removes the far user's signal only when it is the stronger one.
    let noma_term = p_far < p_near;
    let successes = run_counted(sim, |rng| {
        let u = rng.sample::<f64, _>(Exp1);
        let fade = rng.sample::<f64, _>(Exp1) * field.path_loss.gain(u);
        let intra = if noma_term { p_far * fade } else { 0.0 };
        let interference = field.interference(rng, u);
        p_near * fade >= beta * (intra + interference)
    })?;
    Ok(CoverageEstimate::from_counts(successes, sim.trials, sim.ci_level))
}

/// Empirical far-user coverage with the UAV relay above the midpoint of the
/// BS–user segment.
pub fn simulate_far_coverage(
    params: &NetworkParams,
    split: &PowerSplit,
    elevation: &ElevationModel,
    sim: &SimConfig,
) -> Result<CoverageEstimate> {
    check_inputs(params, split, sim)?;
    let field = Field::new(params, sim);
    let beta = params.sir_threshold;
    let (p_near, p_far) = (split.p_near, split.p_far);
    let noma_term = p_near < p_far;
    let elements = params.irs_elements;
    let alpha = params.pathloss_exponent;
    let direct = sim.include_direct_far_path;
    let successes = run_counted(sim, |rng| {
        let u = rng.sample::<f64, _>(Exp1).max(rng.sample::<f64, _>(Exp1));
        let theta = elevation.sample(rng);
        let l_in = sample_los_factor(theta, params, rng);
        let l_out = sample_los_factor(theta, params, rng);
        let h: f64 = (0..elements).map(|_| rng.sample::<f64, _>(Exp1)).sum();
        let path = field.path_loss.gain(u);
        // (sec θ · r)^{−α} = cos^α θ · r^{−α}
        let reflected = h * l_in * l_out * theta.cos().powf(alpha) * path;
        let direct_path = if direct { rng.sample::<f64, _>(Exp1) * path } else { 0.0 };
        let signal = reflected + direct_path;
        let intra = if noma_term { p_near * signal } else { 0.0 };
        let interference = field.interference(rng, u);
        p_far * signal >= beta * (intra + interference)
    })?;
    Ok(CoverageEstimate::from_counts(successes, sim.trials, sim.ci_level))
}

/// Pooled histograms of users (`M`) and UAVs (`N`) per interior BS.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AssociationCounts {
    pub users: Vec<u64>,
    pub uavs: Vec<u64>,
    pub interior_bss: u64,
}

fn bump(hist: &mut Vec<u64>, k: usize) {
    if hist.len() <= k {
        hist.resize(k + 1, 0);
    }
    hist[k] += 1;
}

fn merge(into: &mut Vec<u64>, from: &[u64]) {
    if into.len() < from.len() {
        into.resize(from.len(), 0);
    }
    for (a, b) in into.iter_mut().zip(from) {
        *a += b;
    }
}

/// Simulates `sim.trials` independent disk windows of the given radius and
/// counts, for every BS farther than [`EDGE_BAND`]·radius from the boundary,
/// the users associated by nearest distance and the UAVs associated by
/// [`crate::association::uav_association_pick`] with i.i.d. `(Θ, L)` draws
/// per UAV–BS pair.
pub fn simulate_association_counts(
    params: &NetworkParams,
    elevation: &ElevationModel,
    window_radius: f64,
    sim: &SimConfig,
) -> Result<AssociationCounts> {
    params.validate()?;
    sim.validate()?;
    let interior_radius = (1.0 - EDGE_BAND) * window_radius;
    let expected_interior = params.bs_density * PI * interior_radius * interior_radius;
    if !(expected_interior >= MIN_INTERIOR_BSS) {
        return Err(Error::InsufficientWindow {
            radius: window_radius,
            expected_interior,
            required: MIN_INTERIOR_BSS,
        });
    }
    let key = ChaCha8Rng::seed_from_u64(sim.seed).get_seed();
    let run = || {
        (0..sim.trials)
            .into_par_iter()
            .map(|w| {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(w);
                association_window(params, elevation, window_radius, interior_radius, &mut rng)
            })
            .collect::<Result<Vec<_>>>()
    };
    let windows = with_pool(sim.threads, run)??;
    let mut total = AssociationCounts::default();
    for w in &windows {
        merge(&mut total.users, &w.users);
        merge(&mut total.uavs, &w.uavs);
        total.interior_bss += w.interior_bss;
    }
    Ok(total)
}

fn association_window<R: Rng>(
    params: &NetworkParams,
    elevation: &ElevationModel,
    radius: f64,
    interior_radius: f64,
    rng: &mut R,
) -> Result<AssociationCounts> {
    let bss = sample_hppp_disk(params.bs_density, 0.0, radius, rng)?;
    let users = sample_hppp_disk(params.user_density, 0.0, radius, rng)?;
    let uavs = sample_hppp_disk(params.uav_density, 0.0, radius, rng)?;
    let interior: Vec<bool> = bss.iter().map(|b| b.norm() < interior_radius).collect();
    let mut user_counts = vec![0usize; bss.len()];
    let mut uav_counts = vec![0usize; bss.len()];
    if !bss.is_empty() {
        for u in &users {
            let nearest = (0..bss.len())
                .min_by(|&a, &b| bss[a].distance_sq(u).total_cmp(&bss[b].distance_sq(u)))
                .expect("non-empty");
            user_counts[nearest] += 1;
        }
        // Only BSs within this factor of the nearest distance can win.
        let alpha = params.pathloss_exponent;
        let (lo, hi) = elevation.support();
        let reach = (params.los_enhancement * (lo.cos() / hi.cos()).powf(alpha)).powf(2.0 / alpha);
        let mut candidates = Vec::new();
        let mut indices = Vec::new();
        let mut draws = Vec::new();
        for uav in &uavs {
            let d2: Vec<f64> = bss.iter().map(|b| b.distance_sq(uav)).collect();
            let nearest = d2.iter().copied().fold(f64::INFINITY, f64::min);
            candidates.clear();
            indices.clear();
            draws.clear();
            for (i, &d) in d2.iter().enumerate() {
                if d <= nearest * reach {
                    candidates.push(bss[i]);
                    indices.push(i);
                    let theta = elevation.sample(rng);
                    draws.push((theta, sample_los_factor(theta, params, rng)));
                }
            }
            let point = UavPoint { projection: *uav, elevation: draws[0].0 };
            let idx = indices[uav_association_pick(&point, &candidates, &draws, params)?];
            uav_counts[idx] += 1;
        }
    }
    let mut out = AssociationCounts::default();
    for (i, inside) in interior.iter().enumerate() {
        if *inside {
            bump(&mut out.users, user_counts[i]);
            bump(&mut out.uavs, uav_counts[i]);
            out.interior_bss += 1;
        }
    }
    Ok(out)
}
