//! Number of users and UAVs associated with a typical BS: the negative
//! binomial approximations against a simulated network.

use uav_irs_noma::association::{association_weight_wb, pmf_uavs, pmf_users};
use uav_irs_noma::experiment::window_radius_for;
use uav_irs_noma::montecarlo::{simulate_association_counts, SimConfig};
use uav_irs_noma::network::{ElevationModel, NetworkParams};
use uav_irs_noma::special::QuadratureSpec;

fn main() -> uav_irs_noma::Result<()> {
    let params = NetworkParams::table1();
    let elevation = ElevationModel::deterministic_deg(15.0)?;
    let q = QuadratureSpec::default();

    let wb = association_weight_wb(&params, &elevation, &q)?;
    let users = pmf_users(&params, 40)?;
    let uavs = pmf_uavs(&params, &elevation, 40, &q)?;
    println!("w_b = {wb:.6}; mean users/BS = {:.3}, mean UAVs/BS = {:.3}", users.mean(), uavs.mean());

    let sim = SimConfig { trials: 50, ..SimConfig::default() };
    let counts = simulate_association_counts(&params, &elevation, window_radius_for(&params, 200.0), &sim)?;
    let n = counts.interior_bss as f64;
    println!("{} interior BSs over {} windows", counts.interior_bss, sim.trials);
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "k", "P[M=k]", "emp", "P[N=k]", "emp");
    for k in 0..=15 {
        let emp = |h: &[u64]| h.get(k).copied().unwrap_or(0) as f64 / n;
        println!(
            "{k:>3} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            users.probs[k],
            emp(&counts.users),
            uavs.probs[k],
            emp(&counts.uavs)
        );
    }
    println!(
        "TV distance: users {:.4}, UAVs {:.4}",
        users.tv_distance(&counts.users),
        uavs.tv_distance(&counts.uavs)
    );
    Ok(())
}
