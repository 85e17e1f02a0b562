//! Closed-form coverage of the near and far NOMA users, the power-allocation
//! policy and the elevation-angle optimizer.
//!
//! # Far-user coverage
//!
//! Conditioned on the LoS class `L_oj L_jf = η^i`, the far user is covered
//! with probability
//!
//! ```text
//! C_R(τ) = d^{R−1}/dt^{R−1} [ t^{R−1}/(R−1)! · G(t) ] at t = τ,
//! G(t)   = Π_{k=1,2} [1 + Ψ(2/α, 1/t)/k]^{−1}.
//! ```
//!
//! Two series routes evaluate `C_R`:
//!
//! * [`far_integrand_jet`] expands `t^{R−1} G(t)/(R−1)!` about `τ` and reads
//!   off the derivative. Its final coefficient is a binomial sum whose terms
//!   cancel, losing about `2^{R−1}` ulps.
//! * [`far_conditional_coverage`] uses the equivalent form
//!   `Σ_{k<R} (−s)^k/k! · ℒ^{(k)}(s)` with `s = 1/τ` and
//!   `ℒ(s) = 2/((1+Ψ(2/α,s))(2+Ψ(2/α,s)))`. Every term is nonnegative
//!   because `ℒ` is completely monotone, so the sum is accurate for any
//!   supported `R`. [`coverage_far`] uses this route.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{los_prob_unchecked, ElevationModel, NetworkParams, PowerSplit};
use crate::special::{psi, psi_jet, psi_recip_jet, try_expect_over_theta, QuadratureSpec, SeriesJet};

/// Largest tolerated excess of a coverage value over 1 from rounding alone.
const CLAMP_SLACK: f64 = 1e-12;

/// The series sum moves by at most a small multiple of the error in `Ψ`,
/// which the quadrature bounds by `abs_tol`.
const QUADRATURE_SLACK_FACTOR: f64 = 10.0;

static ROUNDING_CLAMPS: AtomicU64 = AtomicU64::new(0);

/// Number of times, process-wide, a conditional far-user coverage landed
/// above 1 by no more than `1e-12 + 10·abs_tol` and was reported as exactly 1.
///
/// Values near 1 are computed as `1 − tail` with a non-negative tail, so this
/// only moves when that tail fails to converge and the fallback overshoots.
/// The counter makes such events observable instead of silent.
pub fn rounding_clamp_count() -> u64 {
    ROUNDING_CLAMPS.load(AtomicOrdering::Relaxed)
}

/// Largest supported number of IRS elements.
pub const MAX_IRS_ELEMENTS: u32 = 64;

/// Case of the NOMA power split seen by one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NomaRegime {
    /// `P_n > max{1, β} P_f`: the near user decodes with the far user's
    /// signal as interference.
    NearDominant,
    /// `P_f > max{1, β} P_n`.
    FarDominant,
    /// `P_n ≤ P_f`: the near user removes the far user's signal by SIC.
    NearSic,
    /// `P_f ≤ P_n`: the far user removes the near user's signal by SIC.
    FarSic,
    /// `β > 1` and the weaker-than-β power margin leaves the user uncovered.
    DeadZone,
}

/// Regime of the near user.
pub fn near_regime(split: &PowerSplit, beta: f64) -> NomaRegime {
    if split.p_near <= split.p_far {
        NomaRegime::NearSic
    } else if split.p_near > beta.max(1.0) * split.p_far {
        NomaRegime::NearDominant
    } else {
        NomaRegime::DeadZone
    }
}

/// Regime of the far user.
pub fn far_regime(split: &PowerSplit, beta: f64) -> NomaRegime {
    if split.p_far <= split.p_near {
        NomaRegime::FarSic
    } else if split.p_far > beta.max(1.0) * split.p_near {
        NomaRegime::FarDominant
    } else {
        NomaRegime::DeadZone
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageValue {
    pub value: f64,
    pub regime: NomaRegime,
}

impl CoverageValue {
    fn new(value: f64, regime: NomaRegime) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ProbabilityOutOfRange { what: "coverage", value });
        }
        Ok(CoverageValue { value, regime })
    }
}

/// Weighting of the three LoS classes `L_oj L_jf ∈ {1, η, η²}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// `C(2,i) ρ^i (1−ρ)^{2−i}`, the law of two independent LoS hops.
    #[default]
    Binomial,
    /// `ρ^i (1−ρ)^{2−i}` without the factor 2 on the single-LoS class, as
    /// the closed form is usually printed. Sums to less than one.
    PaperLiteral,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binomial" => Ok(WeightMode::Binomial),
            "paper-literal" => Ok(WeightMode::PaperLiteral),
            other => {
                Err(Error::Config(format!("unknown weight mode `{other}` (expected binomial or paper-literal)")))
            }
        }
    }
}

/// Weights of the classes `i = 0, 1, 2` LoS hops.
pub fn los_class_weights(rho: f64, mode: WeightMode) -> [f64; 3] {
    let middle = match mode {
        WeightMode::Binomial => 2.0,
        WeightMode::PaperLiteral => 1.0,
    };
    [(1.0 - rho) * (1.0 - rho), middle * rho * (1.0 - rho), rho * rho]
}

/// Coverage probability of the near user.
pub fn coverage_near(params: &NetworkParams, split: &PowerSplit, q: &QuadratureSpec) -> Result<CoverageValue> {
    params.validate()?;
    split.check_against(params)?;
    let beta = params.sir_threshold;
    let regime = near_regime(split, beta);
    let margin = match regime {
        NomaRegime::NearDominant => split.p_near - beta * split.p_far,
        NomaRegime::NearSic => split.p_near,
        _ => return CoverageValue::new(0.0, regime),
    };
    if margin <= 0.0 {
        return CoverageValue::new(0.0, regime);
    }
    let y = params.tx_power_watts * beta / margin;
    let v = 1.0 / (1.0 + psi(params.psi_exponent(), y, q)?);
    CoverageValue::new(v, regime)
}

fn check_elements(r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("irs_elements", "must be >= 1"));
    }
    if r > MAX_IRS_ELEMENTS {
        return Err(Error::ElementCapExceeded { elements: r, max: MAX_IRS_ELEMENTS });
    }
    Ok(())
}

/// `G` jet: `[(1 + ψ)(1 + ψ/2)]^{−1}` for a jet `ψ`.
fn interference_transform(psi: &SeriesJet) -> Result<SeriesJet> {
    psi.add_scalar(1.0).mul(&psi.scale(0.5).add_scalar(1.0))?.reciprocal()
}

/// Jet of `t^{R−1}/(R−1)! · Π_{k=1,2}[1 + Ψ(x, 1/t)/k]^{−1}` about `τ`, to
/// order `R − 1`.
pub fn far_integrand_jet(x: f64, r: u32, tau: f64, q: &QuadratureSpec) -> Result<SeriesJet> {
    check_elements(r)?;
    let order = (r - 1) as usize;
    let g = psi_recip_jet(x, tau, order, q)?;
    let factorial: f64 = (1..r).map(f64::from).product();
    SeriesJet::monomial(r - 1, tau, order).mul(&interference_transform(&g)?).map(|j| j.scale(1.0 / factorial))
}

/// Extra orders tried past `R − 1` when summing the series tail.
const TAIL_MAX_EXTRA: usize = 512;

/// Tail terms below this are negligible against one ulp of 1.
const TAIL_TERM_FLOOR: f64 = 1e-3 * f64::EPSILON;

/// `Ψ(x, s0)` and the terms `t_k = (−s0)^k ℓ_k`, `k ≤ order`, of the Laplace
/// series; `ℓ_k` are the Taylor coefficients of `G(ψ(s))` about `s0`.
fn laplace_terms(x: f64, s0: f64, order: usize, q: &QuadratureSpec) -> Result<(f64, Vec<f64>)> {
    let psi = psi_jet(x, s0, order, q)?;
    let laplace = interference_transform(&psi)?;
    let mut weight = 1.0;
    let terms = laplace
        .coeffs()
        .iter()
        .map(|c| {
            let t = weight * c;
            weight *= -s0;
            t
        })
        .collect();
    Ok((psi.coeffs()[0], terms))
}

/// `Σ_{k≥r} t_k`, or `None` when the terms have not decayed below
/// [`TAIL_TERM_FLOOR`] within [`TAIL_MAX_EXTRA`] extra orders. The terms
/// decay geometrically at rate `s0/(s0 + |s*|)`, `s*` the pole of `G ∘ ψ`
/// on `(−1, 0)`.
fn series_tail(x: f64, s0: f64, r: usize, q: &QuadratureSpec) -> Result<Option<f64>> {
    let mut extra = 32;
    while extra <= TAIL_MAX_EXTRA {
        let (_, terms) = laplace_terms(x, s0, r - 1 + extra, q)?;
        if terms[terms.len() - 4..].iter().all(|t| t.abs() <= TAIL_TERM_FLOOR) {
            return Ok(Some(terms[r..].iter().rev().sum()));
        }
        extra *= 2;
    }
    Ok(None)
}

/// Conditional far-user coverage `C_R(τ)` through the Laplace-side series.
/// `τ = 0` (no usable power margin) gives 0.
pub fn far_conditional_coverage(x: f64, r: u32, tau: f64, q: &QuadratureSpec) -> Result<f64> {
    check_elements(r)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("τ = {tau} must be finite and >= 0")));
    }
    let s0 = 1.0 / tau;
    let r = r as usize;
    let (psi0, terms) = laplace_terms(x, s0, r - 1, q)?;
    // Smallest terms first.
    let higher: f64 = terms[1..].iter().rev().sum();
    let mut sum = terms[0] + higher;
    if sum > 0.5 {
        // Near 1 the head sum carries an error of a few ulps of 1, enough to
        // land above it. The tail `1 − C = Σ_{k≥R} t_k` is a sum of small
        // non-negative terms, accurate to far below one ulp of 1.
        sum = match series_tail(x, s0, r, q)? {
            Some(tail) => 1.0 - tail,
            // `1 − t₀ = t₀·ψ₀·(3/2 + ψ₀/2)` has no cancellation, which still
            // beats the head sum.
            None => 1.0 - (terms[0] * psi0 * (1.5 + 0.5 * psi0) - higher),
        };
    }
    // Every term is non-negative and the full series sums to L(0) = 1.
    if sum > 1.0 + CLAMP_SLACK + QUADRATURE_SLACK_FACTOR * q.abs_tol {
        return Err(Error::ProbabilityOutOfRange { what: "conditional far coverage", value: sum });
    }
    if sum > 1.0 {
        ROUNDING_CLAMPS.fetch_add(1, AtomicOrdering::Relaxed);
        return Ok(1.0);
    }
    Ok(sum)
}

/// Power margin entering `τ_i`, or `None` in the dead zone.
fn far_margin(split: &PowerSplit, beta: f64) -> (NomaRegime, f64) {
    let regime = far_regime(split, beta);
    let margin = match regime {
        NomaRegime::FarDominant => split.p_far - beta * split.p_near,
        NomaRegime::FarSic => split.p_far,
        _ => 0.0,
    };
    (regime, margin.max(0.0))
}

/// Coverage probability of the IRS-assisted far user.
pub fn coverage_far(
    params: &NetworkParams,
    split: &PowerSplit,
    elevation: &ElevationModel,
    q: &QuadratureSpec,
    mode: WeightMode,
) -> Result<CoverageValue> {
    params.validate()?;
    split.check_against(params)?;
    let r = params.irs_elements;
    check_elements(r)?;
    let (regime, margin) = far_margin(split, params.sir_threshold);
    if margin == 0.0 {
        return CoverageValue::new(0.0, regime);
    }
    let x = params.psi_exponent();
    let eta = params.los_enhancement;
    let scale = margin / (params.sir_threshold * params.tx_power_watts);
    let v = try_expect_over_theta(
        |theta| {
            let rho = los_prob_unchecked(params.los_c1, params.los_c2, theta);
            let base = scale * theta.cos().powf(params.pathloss_exponent);
            let w = los_class_weights(rho, mode);
            let mut acc = 0.0;
            for (i, wi) in w.iter().enumerate() {
                if *wi > 0.0 {
                    acc += wi * far_conditional_coverage(x, r, eta.powi(i as i32) * base, q)?;
                }
            }
            Ok(acc)
        },
        elevation,
        q,
    )?;
    CoverageValue::new(v, regime)
}

/// Which user the recommended split favours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FavoredUser {
    Near,
    Far,
}

/// Power-allocation thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerPolicy {
    /// `c_n` is maximized once `P_n / P_f` exceeds this ratio (`1 + 2β`).
    pub near_threshold_ratio: f64,
    /// `c_f` is maximized once `P_f / P_n` exceeds this ratio (`1 + 2β`).
    pub far_threshold_ratio: f64,
    /// The two policies are opposite; favouring the near user is preferred
    /// because the UAV relay can lift `c_f` on its own.
    pub recommended: FavoredUser,
}

pub fn optimal_power_policy(params: &NetworkParams) -> PowerPolicy {
    let t = 1.0 + 2.0 * params.sir_threshold;
    PowerPolicy { near_threshold_ratio: t, far_threshold_ratio: t, recommended: FavoredUser::Near }
}

/// Largest useful elevation angle `arccos(η^{−2/α})` in radians. Returns 0
/// for `η = 1`.
pub fn elevation_upper_bound(params: &NetworkParams) -> f64 {
    params.los_enhancement.powf(-params.psi_exponent()).clamp(-1.0, 1.0).acos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub grid_points: usize,
    /// Golden-section stopping width, radians.
    pub resolution: f64,
    pub weight_mode: WeightMode,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions { grid_points: 181, resolution: 0.01f64.to_radians(), weight_mode: WeightMode::Binomial }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanMaximum {
    pub argmax: f64,
    pub value: f64,
    /// Every `(point, value)` of the coarse grid.
    pub grid: Vec<(f64, f64)>,
}

/// Maximizes `f` on the open interval `(lo, hi)`: a uniform grid scan picks
/// the best bracket, golden-section search refines it to `resolution`.
/// Ties resolve toward the smaller argument.
pub fn grid_golden_maximize<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid_points: usize,
    resolution: f64,
) -> Result<ScanMaximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::DegenerateInterval);
    }
    if grid_points < 3 {
        return Err(Error::invalid("grid_points", "need at least 3"));
    }
    // Endpoints are pulled inside so the open-interval objective is defined.
    let inset = 1e-9 * (hi - lo);
    let (a, b) = (lo + inset, hi - inset);
    let step = (b - a) / (grid_points - 1) as f64;
    let mut grid = Vec::with_capacity(grid_points);
    for i in 0..grid_points {
        let t = if i + 1 == grid_points { b } else { a + i as f64 * step };
        grid.push((t, f(t)?));
    }
    let best = grid.iter().enumerate().fold(0, |best, (i, p)| if p.1 > grid[best].1 { i } else { best });
    let mut left = grid[best.saturating_sub(1)].0;
    let mut right = grid[(best + 1).min(grid_points - 1)].0;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = right - inv_phi * (right - left);
    let mut d = left + inv_phi * (right - left);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while right - left > resolution {
        if fc >= fd {
            right = d;
            d = c;
            fd = fc;
            c = right - inv_phi * (right - left);
            fc = f(c)?;
        } else {
            left = c;
            c = d;
            fc = fd;
            d = left + inv_phi * (right - left);
            fd = f(d)?;
        }
    }
    let (refined, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    let (argmax, value) = if value > grid[best].1 || (value == grid[best].1 && refined < grid[best].0) {
        (refined, value)
    } else {
        grid[best]
    };
    Ok(ScanMaximum { argmax, value, grid })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElevationOptimum {
    /// Optimal elevation angle, radians.
    pub angle: f64,
    pub coverage: f64,
    /// Feasibility bound `arccos(η^{−2/α})`, radians.
    pub upper_bound: f64,
    /// Coarse grid `(angle, c_f)` trace.
    pub trace: Vec<(f64, f64)>,
}

/// Maximizes `c_f(Θ)` over deterministic elevation angles in
/// `(0, arccos(η^{−2/α}))`.
pub fn optimize_elevation(
    params: &NetworkParams,
    split: &PowerSplit,
    q: &QuadratureSpec,
    opts: &OptimizerOptions,
) -> Result<ElevationOptimum> {
    params.validate()?;
    split.check_against(params)?;
    let upper_bound = elevation_upper_bound(params);
    if upper_bound <= 0.0 {
        return Err(Error::DegenerateInterval);
    }
    let scan = grid_golden_maximize(
        |theta| {
            let model = ElevationModel::deterministic(theta)?;
            Ok(coverage_far(params, split, &model, q, opts.weight_mode)?.value)
        },
        0.0,
        upper_bound,
        opts.grid_points,
        opts.resolution,
    )?;
    Ok(ElevationOptimum { angle: scan.argmax, coverage: scan.value, upper_bound, trace: scan.grid })
}
