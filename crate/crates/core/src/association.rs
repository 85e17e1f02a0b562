//! Association statistics: the UAV association weight `w_b`, the PMFs of
//! the number of users `M` and UAVs `N` served by a typical BS, and the
//! per-UAV association rule.
//!
//! Both PMFs use the Gamma(7/2) Voronoi-cell approximation, which makes the
//! counts negative binomial with shape 7/2. Evaluation is in log space so
//! indices up to 10⁴ and beyond do not overflow.

use statrs::function::beta::checked_beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::network::{los_prob_unchecked, ElevationModel, GroundPoint, NetworkParams, UavPoint};
use crate::special::{expect_over_theta, QuadratureSpec};

/// Shape constant of the cell-size approximation.
const CELL_SHAPE: f64 = 3.5;

/// A PMF on `0..probs.len()` plus the mass beyond the last index.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfVector {
    pub probs: Vec<f64>,
    pub truncation_mass: f64,
}

impl PmfVector {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.truncation_mass
    }

    /// Total variation distance to an empirical histogram of counts.
    ///
    /// The truncation mass is treated as one extra cell that collects every
    /// empirical count beyond the last index.
    pub fn tv_distance(&self, histogram: &[u64]) -> f64 {
        let n: u64 = histogram.iter().sum();
        if n == 0 {
            return 1.0;
        }
        let n = n as f64;
        let k = self.probs.len();
        let mut l1 = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            let e = histogram.get(i).copied().unwrap_or(0) as f64 / n;
            l1 += (p - e).abs();
        }
        let beyond = histogram.iter().skip(k).sum::<u64>() as f64 / n;
        l1 += (self.truncation_mass - beyond).abs();
        0.5 * l1
    }
}

/// Negative binomial with shape 7/2 and ratio `q = 2·density/(7·λ)`.
fn cell_count_pmf(q: f64, max_index: usize) -> Result<PmfVector> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("density ratio {q} must be finite and > 0")));
    }
    let ln_q = q.ln();
    let ln_1q = q.ln_1p();
    let base = ln_gamma(CELL_SHAPE);
    let probs = (0..=max_index)
        .map(|m| {
            let mf = m as f64;
            (ln_gamma(mf + CELL_SHAPE) - ln_gamma(mf + 1.0) - base + mf * ln_q - (mf + CELL_SHAPE) * ln_1q).exp()
        })
        .collect();
    // P[X > m] = I_{q/(1+q)}(m + 1, 7/2).
    let truncation_mass = checked_beta_reg(max_index as f64 + 1.0, CELL_SHAPE, q / (1.0 + q))
        .map_err(|e| Error::Domain(format!("tail mass: {e}")))?;
    Ok(PmfVector { probs, truncation_mass })
}

/// `w_b = E[L^{2/α} cos²Θ] · E[L^{−2/α} sec²Θ]` with `L = η` with
/// probability `ρ(Θ)` and 1 otherwise.
pub fn association_weight_wb(
    params: &NetworkParams,
    elevation: &ElevationModel,
    q: &QuadratureSpec,
) -> Result<f64> {
    params.validate()?;
    let x = params.psi_exponent();
    let up = params.los_enhancement.powf(x);
    let down = 1.0 / up;
    let rho = |t: f64| los_prob_unchecked(params.los_c1, params.los_c2, t);
    let e_up = expect_over_theta(|t| t.cos().powi(2) * (rho(t) * up + 1.0 - rho(t)), elevation, q)?;
    let e_down = expect_over_theta(|t| (rho(t) * down + 1.0 - rho(t)) / t.cos().powi(2), elevation, q)?;
    Ok(e_up * e_down)
}

/// PMF of the number of users associated with a typical BS.
pub fn pmf_users(params: &NetworkParams, m_max: usize) -> Result<PmfVector> {
    params.validate()?;
    cell_count_pmf(2.0 * params.user_density / (7.0 * params.bs_density), m_max)
}

/// PMF of the number of UAVs associated with a typical BS.
pub fn pmf_uavs(
    params: &NetworkParams,
    elevation: &ElevationModel,
    n_max: usize,
    q: &QuadratureSpec,
) -> Result<PmfVector> {
    let wb = association_weight_wb(params, elevation, q)?;
    cell_count_pmf(2.0 * params.uav_density / (7.0 * wb * params.bs_density), n_max)
}

/// Index of the BS maximizing `L · cos^α(θ) · ‖B_i − X_j‖^{−α}`.
///
/// `draws[i]` is the `(θ, L)` pair of the link between the UAV and `bss[i]`.
/// Ties go to the lowest index.
pub fn uav_association_pick(
    uav: &UavPoint,
    bss: &[GroundPoint],
    draws: &[(f64, f64)],
    params: &NetworkParams,
) -> Result<usize> {
    if bss.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if draws.len() != bss.len() {
        return Err(Error::invalid("draws", format!("{} (θ, L) pairs for {} BSs", draws.len(), bss.len())));
    }
    let half_alpha = params.pathloss_exponent / 2.0;
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, (bs, &(theta, l))) in bss.iter().zip(draws).enumerate() {
        // L (cos²θ / d²)^{α/2}
        let d2 = bs.distance_sq(&uav.projection);
        let score = l * (theta.cos().powi(2) / d2).powf(half_alpha);
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::sample_los_factor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn theta15() -> ElevationModel {
        ElevationModel::deterministic_deg(15.0).unwrap()
    }

    #[test]
    fn wb_is_one_without_los_gain() {
        let mut p = NetworkParams::table1();
        p.los_enhancement = 1.0;
        let w = association_weight_wb(&p, &theta15(), &q()).unwrap();
        assert!((w - 1.0).abs() < 1e-14);
        // Only the geometric Jensen gap E[cos²Θ]·E[sec²Θ] remains.
        let u = ElevationModel::uniform(0.2, 1.0).unwrap();
        let cos2 = (0.4 + ((2.0f64).sin() - (0.4f64).sin()) / 4.0) / 0.8;
        let sec2 = ((1.0f64).tan() - (0.2f64).tan()) / 0.8;
        assert!((association_weight_wb(&p, &u, &q()).unwrap() - cos2 * sec2).abs() < 1e-9);
    }

    #[test]
    fn wb_is_one_when_los_is_certain() {
        let mut p = NetworkParams::table1();
        p.los_c2 = 1e-300;
        p.los_enhancement = 7.0;
        let w = association_weight_wb(&p, &theta15(), &q()).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wb_golden_matches_sampling_oracle() {
        let p = NetworkParams::table1();
        let theta = 15f64.to_radians();
        let w = association_weight_wb(&p, &theta15(), &q()).unwrap();
        // 40-digit evaluation.
        assert!((w - 1.021_612_491_996_687_6).abs() < 1e-13);

        // Sample L directly and estimate both expectations.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 2_000_000;
        let x = p.psi_exponent();
        let (mut up, mut down) = (0.0, 0.0);
        for _ in 0..n {
            let l = sample_los_factor(theta, &p, &mut rng);
            up += l.powf(x) * theta.cos().powi(2);
            down += l.powf(-x) / theta.cos().powi(2);
        }
        let est = (up / n as f64) * (down / n as f64);
        // Delta-method standard error is below 1e-4 at this n.
        assert!((est - w).abs() < 5e-4, "sampled {est} vs {w}");
    }

    #[test]
    fn wb_uniform_golden() {
        let p = NetworkParams::table1();
        let m = ElevationModel::uniform(10f64.to_radians(), 50f64.to_radians()).unwrap();
        let w = association_weight_wb(&p, &m, &QuadratureSpec::with_tol(1e-13)).unwrap();
        assert!((w - 1.062_170_582_050_658).abs() < 1e-10);
    }

    #[test]
    fn wb_at_least_one() {
        let mut p = NetworkParams::table1();
        for eta in [1.0, 1.5, 2.5, 10.0] {
            p.los_enhancement = eta;
            for m in [
                theta15(),
                ElevationModel::uniform(0.05, 1.5).unwrap(),
                ElevationModel::uniform(0.3, 0.4).unwrap(),
            ] {
                let w = association_weight_wb(&p, &m, &q()).unwrap();
                assert!(w >= 1.0 - 1e-12, "eta {eta}: w_b = {w}");
            }
        }
    }

    #[test]
    fn user_pmf_examples() {
        let mut p = NetworkParams::table1();
        p.user_density = 10.0 * p.bs_density;
        let pmf = pmf_users(&p, 500).unwrap();
        assert!((pmf.probs[0] - (27.0f64 / 7.0).powf(-3.5)).abs() < 1e-15);
        assert!((pmf.probs[0] - 0.008_872_989_457_173_156).abs() < 1e-15);
        assert!((pmf.total() - 1.0).abs() < 1e-9);
        assert!(pmf.probs.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn user_pmf_truncated_tail_is_consistent() {
        let p = NetworkParams::table1();
        for m_max in [0, 3, 10, 40] {
            let pmf = pmf_users(&p, m_max).unwrap();
            assert!((pmf.total() - 1.0).abs() < 1e-9, "m_max {m_max}");
        }
    }

    #[test]
    fn user_pmf_large_index_does_not_overflow() {
        let mut p = NetworkParams::table1();
        p.user_density = 1e3 * p.bs_density;
        let pmf = pmf_users(&p, 10_000).unwrap();
        assert!(pmf.probs.iter().all(|v| v.is_finite()));
        assert!((pmf.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn user_pmf_scale_invariant() {
        let p = NetworkParams::table1();
        let mut scaled = p;
        scaled.user_density *= 37.0;
        scaled.bs_density *= 37.0;
        let a = pmf_users(&p, 60).unwrap();
        let b = pmf_users(&scaled, 60).unwrap();
        for (x, y) in a.probs.iter().zip(&b.probs) {
            assert!((x - y).abs() <= 1e-14 * x.max(1e-300));
        }
    }

    #[test]
    fn uav_pmf_collapses_to_user_form_without_los_gain() {
        let mut p = NetworkParams::table1();
        p.los_enhancement = 1.0;
        let uav = pmf_uavs(&p, &theta15(), 80, &q()).unwrap();
        let mut as_users = p;
        as_users.user_density = p.uav_density;
        let users = pmf_users(&as_users, 80).unwrap();
        for (a, b) in uav.probs.iter().zip(&users.probs) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn uav_pmf_zero_entry_golden() {
        let p = NetworkParams::table1();
        let pmf = pmf_uavs(&p, &theta15(), 10, &q()).unwrap();
        let wb: f64 = 1.021_612_491_996_687_6;
        assert!((pmf.probs[0] - (1.0 + 20.0 / (7.0 * wb)).powf(-3.5)).abs() < 1e-14);
        assert!((pmf.probs[0] - 0.009_377_311_118_855_952).abs() < 1e-14);
    }

    #[test]
    fn uav_pmf_mean() {
        let p = NetworkParams::table1();
        let pmf = pmf_uavs(&p, &theta15(), 1000, &q()).unwrap();
        let wb = association_weight_wb(&p, &theta15(), &q()).unwrap();
        let target = p.uav_density / (wb * p.bs_density);
        assert!((pmf.mean() - target).abs() < 0.02 * target);
    }

    #[test]
    fn tv_distance_basics() {
        let pmf = PmfVector { probs: vec![0.5, 0.5], truncation_mass: 0.0 };
        assert!((pmf.tv_distance(&[5, 5]) - 0.0).abs() < 1e-15);
        assert!((pmf.tv_distance(&[10, 0]) - 0.5).abs() < 1e-15);
        assert!((pmf.tv_distance(&[0, 0, 10]) - 1.0).abs() < 1e-15);
    }

    fn uav_at_origin() -> UavPoint {
        UavPoint::new(GroundPoint::new(0.0, 0.0), 0.3).unwrap()
    }

    #[test]
    fn pick_single_and_empty() {
        let p = NetworkParams::table1();
        let bs = [GroundPoint::new(100.0, 0.0)];
        assert_eq!(uav_association_pick(&uav_at_origin(), &bs, &[(0.2, 1.0)], &p).unwrap(), 0);
        assert!(matches!(uav_association_pick(&uav_at_origin(), &[], &[], &p), Err(Error::EmptyCandidates)));
    }

    #[test]
    fn pick_reduces_to_nearest() {
        let p = NetworkParams::table1();
        let bss = [
            GroundPoint::new(300.0, 0.0),
            GroundPoint::new(0.0, -120.0),
            GroundPoint::new(-80.0, 90.0),
            GroundPoint::new(0.0, 500.0),
        ];
        let draws = [(0.4, 1.0); 4];
        assert_eq!(uav_association_pick(&uav_at_origin(), &bss, &draws, &p).unwrap(), 1);
    }

    #[test]
    fn pick_ties_go_to_lowest_index() {
        let p = NetworkParams::table1();
        let bss = [GroundPoint::new(100.0, 0.0), GroundPoint::new(0.0, 100.0)];
        assert_eq!(uav_association_pick(&uav_at_origin(), &bss, &[(0.4, 1.0); 2], &p).unwrap(), 0);
    }

    #[test]
    fn pick_matches_exhaustive_scores() {
        let p = NetworkParams::table1();
        let bss = [GroundPoint::new(100.0, 0.0), GroundPoint::new(0.0, 125.0), GroundPoint::new(-140.0, 0.0)];
        let thetas = [0.9, 0.2, 0.1];
        // Every assignment of L ∈ {1, η} to the three links.
        for mask in 0..8u32 {
            let draws: Vec<(f64, f64)> =
                (0..3).map(|i| (thetas[i], if mask & (1 << i) != 0 { p.los_enhancement } else { 1.0 })).collect();
            let scores: Vec<f64> =
                (0..3).map(|i| draws[i].1 * draws[i].0.cos().powf(3.0) / bss[i].norm().powf(3.0)).collect();
            let brute = (0..3).fold(0, |b, i| if scores[i] > scores[b] { i } else { b });
            assert_eq!(uav_association_pick(&uav_at_origin(), &bss, &draws, &p).unwrap(), brute);
        }
    }
}
