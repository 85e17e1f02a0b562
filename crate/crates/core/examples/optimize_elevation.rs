//! Elevation angle maximizing far-user coverage, by grid scan followed by
//! golden-section refinement.

use uav_irs_noma::coverage::{optimize_elevation, OptimizerOptions, WeightMode};
use uav_irs_noma::network::{NetworkParams, PowerSplit};
use uav_irs_noma::special::QuadratureSpec;

fn main() -> uav_irs_noma::Result<()> {
    let q = QuadratureSpec::default();
    let split = PowerSplit::new(20.0, 10.0)?;
    for mode in [WeightMode::Binomial, WeightMode::PaperLiteral] {
        let opts = OptimizerOptions { weight_mode: mode, ..OptimizerOptions::default() };
        for r in [8, 16, 32] {
            let o = optimize_elevation(&NetworkParams::table1().with_irs_elements(r), &split, &q, &opts)?;
            println!(
                "{mode:?}, R = {r:>2}: theta* = {:.2} deg, c_f = {:.8} (search bound {:.2} deg)",
                o.angle.to_degrees(),
                o.coverage,
                o.upper_bound.to_degrees()
            );
        }
    }
    Ok(())
}
