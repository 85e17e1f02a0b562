//! Near- and far-user coverage at one power split, analytic against Monte
//! Carlo, with both LoS-class weightings.

use uav_irs_noma::coverage::{coverage_far, coverage_near, WeightMode};
use uav_irs_noma::montecarlo::{simulate_far_coverage, simulate_near_coverage, SimConfig};
use uav_irs_noma::network::{ElevationModel, NetworkParams, PowerSplit};
use uav_irs_noma::special::QuadratureSpec;

fn main() -> uav_irs_noma::Result<()> {
    let q = QuadratureSpec::default();
    let split = PowerSplit::new(20.0, 10.0)?;
    let elevation = ElevationModel::deterministic_deg(15.0)?;
    let sim = SimConfig { trials: 50_000, ..SimConfig::default() };

    let params = NetworkParams::table1();
    let cn = coverage_near(&params, &split, &q)?;
    let cn_mc = simulate_near_coverage(&params, &split, &sim)?;
    println!(
        "near user ({:?}): analytic {:.4}, simulated {:.4} ± {:.4}",
        cn.regime, cn.value, cn_mc.value, cn_mc.half_width
    );

    for r in [1, 4, 8, 16] {
        let p = params.with_irs_elements(r);
        let binomial = coverage_far(&p, &split, &elevation, &q, WeightMode::Binomial)?;
        let literal = coverage_far(&p, &split, &elevation, &q, WeightMode::PaperLiteral)?;
        let mc = simulate_far_coverage(&p, &split, &elevation, &sim)?;
        println!(
            "far user, R = {r:>2}: binomial {:.4}, printed weights {:.4}, simulated {:.4} ± {:.4}",
            binomial.value, literal.value, mc.value, mc.half_width
        );
    }
    Ok(())
}
