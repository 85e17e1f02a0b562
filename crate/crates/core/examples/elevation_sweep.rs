//! Far-user coverage against the UAV elevation angle for several element
//! counts, with the angle beyond which the LoS gain no longer pays.

use uav_irs_noma::coverage::elevation_upper_bound;
use uav_irs_noma::experiment::{run_elevation_sweep, ExperimentConfig, SweepConfig, SweepKind};

fn main() -> uav_irs_noma::Result<()> {
    let mut cfg = ExperimentConfig::preset(SweepKind::Elevation);
    if let SweepConfig::Elevation { angles_deg, .. } = &mut cfg.sweep {
        *angles_deg = (1..=11).map(|i| 5.0 * i as f64).collect();
    }
    println!("upper bound: {:.2} deg", elevation_upper_bound(&cfg.network).to_degrees());
    let out = run_elevation_sweep(&cfg)?;
    print!("{}", out.table.to_csv());
    for c in &out.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
