//! Monte Carlo counts depend only on the seed: every trial draws from its own
//! ChaCha stream, so the worker count does not change the result.

use std::time::Instant;

use uav_irs_noma::montecarlo::{simulate_near_coverage, SimConfig};
use uav_irs_noma::network::{NetworkParams, PowerSplit};

fn main() -> uav_irs_noma::Result<()> {
    let params = NetworkParams::table1();
    let split = PowerSplit::from_ratio(params.tx_power_watts, 4.0)?;
    let report = SimConfig::default().check_truncation(&params)?;
    println!("simulated radius {:.0} m, relative truncation bias {:.2e}", report.radius, report.relative_bias);
    for threads in [1, 2, 4, 8] {
        let sim = SimConfig { trials: 50_000, seed: 7, threads: Some(threads), ..SimConfig::default() };
        let start = Instant::now();
        let est = simulate_near_coverage(&params, &split, &sim)?;
        println!(
            "{threads} workers: {} / {} successes, {:.3} s",
            est.successes,
            est.trials,
            start.elapsed().as_secs_f64()
        );
    }
    let other = SimConfig { trials: 50_000, seed: 8, ..SimConfig::default() };
    println!("seed 8: {} successes", simulate_near_coverage(&params, &split, &other)?.successes);
    Ok(())
}
