//! Sweep runners. Each returns a [`ResultTable`] plus the cross-validation
//! checks whose failure the command line tool reports with its own exit code.

use super::table::{Marker, ResultTable, Series, SeriesStyle};
use super::{ExperimentConfig, SweepConfig};
use crate::association::{pmf_uavs, pmf_users};
use crate::coverage::{
    coverage_far, coverage_near, elevation_upper_bound, optimal_power_policy, optimize_elevation, OptimizerOptions,
};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_association_counts, simulate_far_coverage, simulate_near_coverage};
use crate::network::{ElevationModel, PowerSplit};
use crate::special::QuadratureSpec;

/// Largest accepted `|analytic − mc|` beyond the CI half-width.
pub const CROSS_CHECK_SLACK: f64 = 0.02;

/// Largest accepted TV distance between a PMF and its simulated histogram.
pub const TV_LIMIT: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: ResultTable,
    pub checks: Vec<Check>,
    /// Human-readable result lines for the terminal.
    pub summary: Vec<String>,
}

impl RunOutput {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs whatever `cfg.sweep` describes.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.sweep {
        SweepConfig::PowerRatio { .. } => run_power_sweep(cfg),
        SweepConfig::Elevation { .. } => run_elevation_sweep(cfg),
        SweepConfig::AssocStats { .. } => run_assoc_stats(cfg),
        SweepConfig::OptimizeElevation { .. } => run_optimize(cfg),
    }
}

fn wrong_sweep(cfg: &ExperimentConfig, wanted: &str) -> Error {
    Error::Config(format!("sweep.kind is `{}`, this runner needs `{wanted}`", cfg.sweep.kind()))
}

fn base_table(cfg: &ExperimentConfig, title: &str, columns: &[&str]) -> Result<ResultTable> {
    let mut t = ResultTable::new(title, columns);
    t.meta("generator", concat!("uav-irs-noma ", env!("CARGO_PKG_VERSION")));
    t.meta("seed", cfg.sim.seed);
    t.meta("mode", format!("{:?}", cfg.mode).to_lowercase());
    t.echo = cfg.to_toml()?;
    Ok(t)
}

/// Worst `|analytic − mc| − half_width` over `(analytic, mc, ci)` triples.
fn cross_check(name: String, triples: &[(f64, f64, f64)]) -> Check {
    let worst = triples.iter().map(|(a, m, ci)| (a - m).abs() - ci).fold(f64::NEG_INFINITY, f64::max);
    Check {
        name,
        passed: worst < CROSS_CHECK_SLACK,
        detail: format!("max |analytic - mc| - ci = {worst:.4} (limit {CROSS_CHECK_SLACK})"),
    }
}

fn col_name(prefix: &str, r: u32) -> String {
    format!("{prefix}_R{r}")
}

/// `c_n` and `c_f` against `P_n / P_f` with the total power fixed at `P`.
pub fn run_power_sweep(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let SweepConfig::PowerRatio { ratios, irs_elements } = &cfg.sweep else {
        return Err(wrong_sweep(cfg, "power-ratio"));
    };
    cfg.validate()?;
    let q = QuadratureSpec::default();
    let elevation = cfg.elevation.to_model()?;
    let mut names = vec!["ratio".to_string(), "p_near".into(), "p_far".into()];
    names.extend(["c_n_analytic", "c_n_mc", "c_n_ci"].map(String::from));
    for &r in irs_elements {
        for p in ["c_f_analytic", "c_f_mc", "c_f_ci"] {
            names.push(col_name(p, r));
        }
    }
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = base_table(cfg, "Coverage vs power ratio", &name_refs)?;
    let policy = optimal_power_policy(&cfg.network);
    t.meta("policy_threshold_ratio", policy.near_threshold_ratio);
    t.meta("weight_mode", format!("{:?}", cfg.weight_mode).to_lowercase());
    t.meta("elevation", format!("{:?}", cfg.elevation));

    let mut near_pairs = Vec::new();
    let mut far_pairs: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); irs_elements.len()];
    for &ratio in ratios {
        let split = PowerSplit::from_ratio(cfg.network.tx_power_watts, ratio)?;
        let mut row = vec![Some(ratio), Some(split.p_near), Some(split.p_far)];
        let cn = cfg.mode.analytic().then(|| coverage_near(&cfg.network, &split, &q)).transpose()?;
        let cn_mc =
            cfg.mode.montecarlo().then(|| simulate_near_coverage(&cfg.network, &split, &cfg.sim)).transpose()?;
        row.extend([cn.map(|c| c.value), cn_mc.map(|e| e.value), cn_mc.map(|e| e.half_width)]);
        if let (Some(a), Some(m)) = (cn, cn_mc) {
            near_pairs.push((a.value, m.value, m.half_width));
        }
        for (k, &r) in irs_elements.iter().enumerate() {
            let params = cfg.network.with_irs_elements(r);
            let cf = cfg
                .mode
                .analytic()
                .then(|| coverage_far(&params, &split, &elevation, &q, cfg.weight_mode))
                .transpose()?;
            let cf_mc = cfg
                .mode
                .montecarlo()
                .then(|| simulate_far_coverage(&params, &split, &elevation, &cfg.sim))
                .transpose()?;
            row.extend([cf.map(|c| c.value), cf_mc.map(|e| e.value), cf_mc.map(|e| e.half_width)]);
            if let (Some(a), Some(m)) = (cf, cf_mc) {
                far_pairs[k].push((a.value, m.value, m.half_width));
            }
        }
        t.push_row(row);
    }

    // Qualitative shape of the curves, from the analytic columns when present.
    let source = if cfg.mode.analytic() { "analytic" } else { "mc" };
    let cn = t.column(&format!("c_n_{source}")).unwrap_or_default();
    let mut summary = Vec::new();
    for &r in irs_elements {
        let cf = t.column(&col_name(&format!("c_f_{source}"), r)).unwrap_or_default();
        let above = cf.iter().zip(&cn).all(|(f, n)| f > n);
        t.meta(format!("c_f_above_c_n_R{r}"), above);
    }
    let threshold = policy.near_threshold_ratio;
    let mirrored = mirrored_gap(ratios, &cn, threshold);
    if let Some(gap) = mirrored {
        t.meta("c_n_gain_above_threshold_vs_mirror", format!("{gap:.6}"));
    }
    summary.push(format!("{} ratios, R = {irs_elements:?}, policy threshold P_n/P_f = {threshold}", ratios.len()));

    let mut checks = Vec::new();
    if !near_pairs.is_empty() {
        checks.push(cross_check("c_n analytic vs mc".into(), &near_pairs));
    }
    for (k, &r) in irs_elements.iter().enumerate() {
        if !far_pairs[k].is_empty() {
            checks.push(cross_check(format!("c_f analytic vs mc (R = {r})"), &far_pairs[k]));
        }
    }

    t.x_label = "P_n / P_f".into();
    t.y_label = "coverage probability".into();
    t.log_x = true;
    t.y_range = Some((0.0, 1.0));
    t.markers.push(Marker { label: format!("P_n/P_f = {threshold}"), x: threshold });
    push_series(&mut t, "c_n");
    for &r in irs_elements {
        push_series(&mut t, &format!("c_f_{{}}_R{r}"));
    }
    Ok(RunOutput { table: t, checks, summary })
}

/// Adds line (analytic) and marker (mc) series for a quantity. `stem` is
/// either a plain prefix (`c_n`) or a pattern with `{}` where the estimator
/// name goes.
fn push_series(t: &mut ResultTable, stem: &str) {
    for (est, style) in [("analytic", SeriesStyle::Line), ("mc", SeriesStyle::Markers)] {
        let name = if stem.contains("{}") { stem.replace("{}", est) } else { format!("{stem}_{est}") };
        if let Some(column) = t.column_index(&name) {
            if t.rows.iter().any(|r| r[column].is_some()) {
                t.series.push(Series { column, style });
            }
        }
    }
}

/// Mean of `c_n(ρ) − c_n(threshold²/ρ)` over sweep ratios above the
/// threshold whose mirror image (about the threshold on a log axis) is also
/// in the sweep, matched to the nearest grid point.
fn mirrored_gap(ratios: &[f64], cn: &[f64], threshold: f64) -> Option<f64> {
    if cn.len() != ratios.len() {
        return None;
    }
    let mut gaps = Vec::new();
    for (i, &r) in ratios.iter().enumerate() {
        if r <= threshold {
            continue;
        }
        let mirror = threshold * threshold / r;
        let (j, d) = ratios
            .iter()
            .enumerate()
            .map(|(j, &x)| (j, (x.ln() - mirror.ln()).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if d < 0.1 {
            gaps.push(cn[i] - cn[j]);
        }
    }
    (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64)
}

/// `c_f` against a deterministic elevation angle.
pub fn run_elevation_sweep(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let SweepConfig::Elevation { angles_deg, irs_elements, p_near, p_far } = &cfg.sweep else {
        return Err(wrong_sweep(cfg, "elevation"));
    };
    cfg.validate()?;
    let q = QuadratureSpec::default();
    let split = PowerSplit::new(*p_near, *p_far)?;
    let bound_deg = elevation_upper_bound(&cfg.network).to_degrees();
    let mut names = vec!["theta_deg".to_string()];
    for &r in irs_elements {
        for p in ["c_f_analytic", "c_f_mc", "c_f_ci"] {
            names.push(col_name(p, r));
        }
    }
    names.push("bound_deg".into());
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = base_table(cfg, "Far-user coverage vs elevation angle", &name_refs)?;
    t.meta("p_near", p_near);
    t.meta("p_far", p_far);
    t.meta("bound_deg", format!("{bound_deg:.4}"));
    t.meta("weight_mode", format!("{:?}", cfg.weight_mode).to_lowercase());

    let mut pairs: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); irs_elements.len()];
    for &deg in angles_deg {
        let model = ElevationModel::deterministic(deg.to_radians())?;
        let mut row = vec![Some(deg)];
        for (k, &r) in irs_elements.iter().enumerate() {
            let params = cfg.network.with_irs_elements(r);
            let a = cfg
                .mode
                .analytic()
                .then(|| coverage_far(&params, &split, &model, &q, cfg.weight_mode))
                .transpose()?;
            let m = cfg
                .mode
                .montecarlo()
                .then(|| simulate_far_coverage(&params, &split, &model, &cfg.sim))
                .transpose()?;
            row.extend([a.map(|c| c.value), m.map(|e| e.value), m.map(|e| e.half_width)]);
            if let (Some(a), Some(m)) = (a, m) {
                pairs[k].push((a.value, m.value, m.half_width));
            }
        }
        row.push(Some(bound_deg));
        t.push_row(row);
    }

    let mut summary = Vec::new();
    let mut checks = Vec::new();
    let source = if cfg.mode.analytic() { "analytic" } else { "mc" };
    let mut previous: Option<Vec<f64>> = None;
    let mut monotone = true;
    for &r in irs_elements {
        let col = t.column(&col_name(&format!("c_f_{source}"), r)).unwrap_or_default();
        if let Some((i, best)) = col.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))) {
            t.meta(format!("argmax_deg_R{r}"), angles_deg[i]);
            summary.push(format!("R = {r}: grid argmax {}° (c_f = {best:.6})", angles_deg[i]));
        }
        if let Some(prev) = &previous {
            monotone &= col.iter().zip(prev).all(|(c, p)| *c >= p - 1e-12);
        }
        previous = Some(col);
    }
    // Simulated columns are noisy, so ordering in R is only checked on the
    // closed form.
    if irs_elements.len() > 1 && cfg.mode.analytic() {
        checks.push(Check {
            name: "c_f non-decreasing in R".into(),
            passed: monotone,
            detail: "analytic columns, row-wise".into(),
        });
    }
    for (k, &r) in irs_elements.iter().enumerate() {
        if !pairs[k].is_empty() {
            checks.push(cross_check(format!("c_f analytic vs mc (R = {r})"), &pairs[k]));
        }
    }

    t.x_label = "elevation angle (deg)".into();
    t.y_label = "far-user coverage".into();
    t.markers.push(Marker { label: format!("bound {bound_deg:.2}°"), x: bound_deg });
    for &r in irs_elements {
        push_series(&mut t, &format!("c_f_{{}}_R{r}"));
    }
    let ys: Vec<f64> = t.series.iter().flat_map(|s| t.rows.iter().filter_map(move |row| row[s.column])).collect();
    let lo = ys.iter().copied().fold(1.0, f64::min);
    t.y_range = Some(((lo * 20.0).floor() / 20.0, 1.0));
    Ok(RunOutput { table: t, checks, summary })
}

/// PMFs of the users and UAVs served by a BS against simulated histograms.
pub fn run_assoc_stats(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let SweepConfig::AssocStats { window_radius, max_count } = &cfg.sweep else {
        return Err(wrong_sweep(cfg, "assoc-stats"));
    };
    cfg.validate()?;
    let q = QuadratureSpec::default();
    let elevation = cfg.elevation.to_model()?;
    let users = pmf_users(&cfg.network, *max_count)?;
    let uavs = pmf_uavs(&cfg.network, &elevation, *max_count, &q)?;
    let counts = cfg
        .mode
        .montecarlo()
        .then(|| simulate_association_counts(&cfg.network, &elevation, *window_radius, &cfg.sim))
        .transpose()?;
    let mut t =
        base_table(cfg, "Users and UAVs per BS", &["count", "pmf_users", "emp_users", "pmf_uavs", "emp_uavs"])?;
    t.meta("window_radius_m", window_radius);
    t.meta("windows", if counts.is_some() { cfg.sim.trials } else { 0 });
    t.meta("elevation", format!("{:?}", cfg.elevation));
    let analytic = cfg.mode.analytic();
    let freq = |h: &[u64], k: usize, n: u64| (n > 0).then(|| h.get(k).copied().unwrap_or(0) as f64 / n as f64);
    let n = counts.as_ref().map_or(0, |c| c.interior_bss);
    for k in 0..=*max_count {
        let emp_users = counts.as_ref().and_then(|c| freq(&c.users, k, n));
        let emp_uavs = counts.as_ref().and_then(|c| freq(&c.uavs, k, n));
        t.push_row(vec![
            Some(k as f64),
            analytic.then(|| users.probs[k]),
            emp_users,
            analytic.then(|| uavs.probs[k]),
            emp_uavs,
        ]);
    }
    let mut summary = vec![
        format!("P[M = 0] = {:.6} (analytic)", users.probs[0]),
        format!("P[N = 0] = {:.6} (analytic)", uavs.probs[0]),
    ];
    t.meta("p_m0_analytic", users.probs[0]);
    t.meta("p_n0_analytic", uavs.probs[0]);
    let mut checks = Vec::new();
    if let Some(c) = &counts {
        t.meta("interior_bss", c.interior_bss);
        let tv_m = users.tv_distance(&c.users);
        let tv_n = uavs.tv_distance(&c.uavs);
        t.meta("tv_users", format!("{tv_m:.6}"));
        t.meta("tv_uavs", format!("{tv_n:.6}"));
        summary.push(format!("{} interior BSs over {} windows", c.interior_bss, cfg.sim.trials));
        summary.push(format!("TV(M) = {tv_m:.4}, TV(N) = {tv_n:.4}"));
        if analytic {
            for (name, tv) in [("TV users", tv_m), ("TV uavs", tv_n)] {
                checks.push(Check {
                    name: name.into(),
                    passed: tv < TV_LIMIT,
                    detail: format!("{tv:.4} (limit {TV_LIMIT})"),
                });
            }
        }
    }
    t.x_label = "count per BS".into();
    t.y_label = "probability".into();
    for (col, style) in [
        ("pmf_users", SeriesStyle::Line),
        ("emp_users", SeriesStyle::Markers),
        ("pmf_uavs", SeriesStyle::Line),
        ("emp_uavs", SeriesStyle::Markers),
    ] {
        let column = t.column_index(col).expect("column exists");
        if t.rows.iter().any(|r| r[column].is_some()) {
            t.series.push(Series { column, style });
        }
    }
    Ok(RunOutput { table: t, checks, summary })
}

/// Optimal deterministic elevation per element count; the table holds the
/// coarse-grid trace, the optima go to the metadata and summary.
pub fn run_optimize(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let SweepConfig::OptimizeElevation { irs_elements, p_near, p_far, grid_points, resolution_deg } = &cfg.sweep
    else {
        return Err(wrong_sweep(cfg, "optimize-elevation"));
    };
    cfg.validate()?;
    let q = QuadratureSpec::default();
    let split = PowerSplit::new(*p_near, *p_far)?;
    let opts = OptimizerOptions {
        grid_points: *grid_points,
        resolution: resolution_deg.to_radians(),
        weight_mode: cfg.weight_mode,
    };
    let mut names = vec!["theta_deg".to_string()];
    names.extend(irs_elements.iter().map(|&r| col_name("c_f_analytic", r)));
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = base_table(cfg, "Elevation optimization trace", &name_refs)?;
    let mut optima = Vec::new();
    for &r in irs_elements {
        optima.push(optimize_elevation(&cfg.network.with_irs_elements(r), &split, &q, &opts)?);
    }
    let bound_deg = elevation_upper_bound(&cfg.network).to_degrees();
    t.meta("bound_deg", format!("{bound_deg:.4}"));
    let mut summary = Vec::new();
    for (o, &r) in optima.iter().zip(irs_elements) {
        let deg = o.angle.to_degrees();
        t.meta(format!("theta_opt_deg_R{r}"), format!("{deg:.4}"));
        t.meta(format!("c_f_opt_R{r}"), format!("{:.8}", o.coverage));
        summary.push(format!("R = {r}: theta* = {deg:.2}°, c_f = {:.6}, bound = {bound_deg:.2}°", o.coverage));
        t.markers.push(Marker { label: format!("R{r} opt"), x: deg });
    }
    for i in 0..*grid_points {
        let mut row = vec![Some(optima[0].trace[i].0.to_degrees())];
        row.extend(optima.iter().map(|o| Some(o.trace[i].1)));
        t.push_row(row);
    }
    t.x_label = "elevation angle (deg)".into();
    t.y_label = "far-user coverage".into();
    for k in 0..irs_elements.len() {
        t.series.push(Series { column: k + 1, style: SeriesStyle::Line });
    }
    Ok(RunOutput { table: t, checks: Vec::new(), summary })
}

#[cfg(test)]
mod tests {
    use super::super::{RunMode, SweepKind};
    use super::*;

    fn small(kind: SweepKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::preset(kind);
        cfg.sim.trials = 2000;
        match &mut cfg.sweep {
            SweepConfig::PowerRatio { ratios, .. } => *ratios = vec![0.5, 2.0, 4.0],
            SweepConfig::Elevation { angles_deg, .. } => *angles_deg = vec![5.0, 15.0, 30.0],
            SweepConfig::OptimizeElevation { grid_points, .. } => *grid_points = 19,
            SweepConfig::AssocStats { .. } => cfg.sim.trials = 3,
        }
        cfg
    }

    #[test]
    fn power_sweep_columns_and_modes() {
        let out = run_power_sweep(&small(SweepKind::PowerRatio)).unwrap();
        assert_eq!(out.table.rows.len(), 3);
        assert_eq!(out.table.columns.len(), 6 + 3 * 2);
        assert_eq!(out.checks.len(), 3);

        let mut cfg = small(SweepKind::PowerRatio);
        cfg.mode = RunMode::Analytic;
        cfg.sim.trials = 0;
        let out = run_power_sweep(&cfg).unwrap();
        let mc = out.table.column_index("c_n_mc").unwrap();
        assert!(out.table.rows.iter().all(|r| r[mc].is_none()));
        assert!(out.checks.is_empty());
        assert!(out.table.to_csv().contains("# policy_threshold_ratio: 2"));
    }

    #[test]
    fn csv_is_byte_stable() {
        let cfg = small(SweepKind::PowerRatio);
        let a = run_power_sweep(&cfg).unwrap().table.to_csv();
        let b = run_power_sweep(&cfg).unwrap().table.to_csv();
        assert_eq!(a, b);
        assert!(a.contains("# seed: 24301"));
        assert!(a.contains("#   [network]"));
    }

    #[test]
    fn elevation_sweep_bound_column() {
        let out = run_elevation_sweep(&small(SweepKind::Elevation)).unwrap();
        let bound = out.table.column("bound_deg").unwrap();
        assert!(bound.iter().all(|b| (b - 57.12).abs() < 0.01));
        assert!(out.all_passed());
    }

    #[test]
    fn runner_rejects_other_sweep_kinds() {
        let cfg = small(SweepKind::Elevation);
        assert!(matches!(run_power_sweep(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn assoc_stats_reports_zero_probabilities() {
        let out = run_assoc_stats(&small(SweepKind::AssocStats)).unwrap();
        let p0 = out.table.column("pmf_uavs").unwrap()[0];
        assert!(p0 < 0.05);
        assert!(out.table.metadata.iter().any(|(k, _)| k == "tv_users"));
    }

    #[test]
    fn optimize_trace_has_grid_rows() {
        let out = run_optimize(&small(SweepKind::OptimizeElevation)).unwrap();
        assert_eq!(out.table.rows.len(), 19);
        assert_eq!(out.summary.len(), 3);
    }

    #[test]
    fn mirrored_gap_matches_pairs() {
        let ratios = [0.5, 1.0, 2.0, 4.0, 8.0];
        let cn = [0.1, 0.2, 0.3, 0.5, 0.6];
        // 4 ↔ 1, 8 ↔ 0.5.
        assert!((mirrored_gap(&ratios, &cn, 2.0).unwrap() - 0.4).abs() < 1e-12);
    }
}
