//! Coverage of both users against P_n/P_f, written as CSV and SVG into the
//! system temp directory.

use uav_irs_noma::experiment::{emit_csv, emit_svg, run_power_sweep, ExperimentConfig, RunMode, SweepKind};

fn main() -> uav_irs_noma::Result<()> {
    let mut cfg = ExperimentConfig::preset(SweepKind::PowerRatio);
    cfg.mode = RunMode::Analytic;
    let out = run_power_sweep(&cfg)?;
    for line in &out.summary {
        println!("{line}");
    }
    for (k, v) in &out.table.metadata {
        println!("  {k}: {v}");
    }
    let dir = std::env::temp_dir();
    let (csv, svg) = (dir.join("power_sweep.csv"), dir.join("power_sweep.svg"));
    emit_csv(&out.table, &csv)?;
    emit_svg(&out.table, &svg)?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
