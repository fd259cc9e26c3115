//! Engine execution and artifact writing: one CSV per engine plus a
//! `report.json` with pairwise agreement statistics and the resolved config.
//!
//! All files are written to a temporary name in the target directory and
//! renamed into place, so aborted runs never leave partial files under
//! final names.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use quenchlat_core::curve::{zeta_for, CurvePoint, EngineTag, EntropyCurve};
use quenchlat_core::entropy::stationary_entropy_density;
use quenchlat_core::exact::{exact_entropy_curve, ExactBackend};
use quenchlat_core::exec::ExecMode;
use quenchlat_core::lattice::ReducedGrid;
use quenchlat_core::mc::{qp_entropy_curve_mc, McConfig};
use quenchlat_core::qp::{qp_entropy_analytic, QpGeometry};
use quenchlat_core::state::cell_green;

use crate::config::{EngineKind, ExperimentConfig, ResolvedExperiment, SCHEMA_VERSION};
use crate::error::{runtime_err, CliError, Result};

/// Everything one experiment run leaves on disk.
pub struct RunArtifacts {
    pub stationary_value: Option<f64>,
    pub csv_paths: Vec<PathBuf>,
    pub report_path: PathBuf,
}

/// Agreement statistics for one pair of engine curves, evaluated pointwise
/// on the shared time grid.
#[derive(Serialize)]
pub struct Comparison {
    pub engine_a: &'static str,
    pub engine_b: &'static str,
    /// `max_i |S_a(t_i) - S_b(t_i)|` (entropy-density units).
    pub max_abs_gap: f64,
    /// Time where that gap peaks.
    pub at_t: f64,
    /// `max_i |gap_i| / sigma_i` with the standard errors of both curves
    /// combined in quadrature; absent when neither curve carries errors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pull: Option<f64>,
}

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub code_version: &'static str,
    pub seed: u64,
    pub engines: Vec<EngineKind>,
    /// Late-time stationary entropy density, when that engine was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary_value: Option<f64>,
    pub comparisons: Vec<Comparison>,
    /// Fully resolved config; running it again reproduces the CSVs bit
    /// for bit.
    pub resolved_config: ExperimentConfig,
}

fn run_core(e: quenchlat_core::Error) -> CliError {
    runtime_err(e.to_string())
}

/// Run every selected engine in order and write CSVs plus `report.json`
/// into the experiment's output directory.
pub fn execute(exp: &ResolvedExperiment, mode: ExecMode) -> Result<RunArtifacts> {
    fs::create_dir_all(&exp.out_dir)
        .map_err(|e| runtime_err(format!("cannot create {}: {e}", exp.out_dir.display())))?;

    let mut curves = Vec::new();
    let mut stationary_value = None;
    for &engine in &exp.config.engines {
        let curve = run_engine(engine, exp, mode).map_err(run_core)?;
        if engine == EngineKind::Stationary {
            stationary_value = curve.points.first().map(|p| p.density);
        }
        curves.push((engine, curve));
    }

    let mut csv_paths = Vec::new();
    for (engine, curve) in &curves {
        csv_paths.push(write_csv(&exp.out_dir, *engine, curve)?);
    }

    let report = build_report(exp, &curves, stationary_value);
    let report_path = write_report(&exp.out_dir, &report)?;

    Ok(RunArtifacts { stationary_value, csv_paths, report_path })
}

fn run_engine(
    engine: EngineKind,
    exp: &ResolvedExperiment,
    mode: ExecMode,
) -> quenchlat_core::Result<EntropyCurve> {
    let p = &exp.config.params;
    // The per-engine parameters below were filled during resolution for
    // every engine in the list, so the expects cannot fire.
    match engine {
        EngineKind::Analytic => {
            let geometry =
                QpGeometry::from_region(&exp.region).expect("validated during resolution");
            let grid =
                ReducedGrid::isotropic(&exp.qcfg, p.analytic_grid.expect("resolved"))?;
            qp_entropy_analytic(&exp.qcfg, &exp.state, &geometry, &grid, &exp.times, mode)
        }
        EngineKind::Mc => {
            let mut mc = McConfig::new(p.mc_samples.expect("resolved"), exp.seed)?;
            if let Some(b) = p.mc_batch {
                mc = mc.with_batch_size(b)?;
            }
            qp_entropy_curve_mc(&exp.qcfg, &exp.state, &exp.region, &exp.times, &mc, mode)
        }
        EngineKind::ExactThermo => {
            let grid = ReducedGrid::isotropic(&exp.qcfg, p.thermo_grid.expect("resolved"))?;
            let backend = ExactBackend::Thermo { grid };
            exact_entropy_curve(&exp.qcfg, &exp.state, &exp.region, &exp.times, &backend, mode)
        }
        EngineKind::ExactFinite => {
            let lattice = p.finite_lattice.clone().expect("resolved");
            let backend = ExactBackend::Finite { lattice };
            exact_entropy_curve(&exp.qcfg, &exp.state, &exp.region, &exp.times, &backend, mode)
        }
        EngineKind::Stationary => {
            let grid =
                ReducedGrid::isotropic(&exp.qcfg, p.stationary_grid.expect("resolved"))?;
            let green = cell_green(&exp.state)?;
            let value = stationary_entropy_density(&exp.qcfg, &green, &grid)?;
            let points = exp
                .times
                .iter()
                .map(|&t| CurvePoint::simple(t, zeta_for(&exp.qcfg, &exp.region, t), value))
                .collect();
            Ok(EntropyCurve { engine: EngineTag::Stationary, points })
        }
    }
}

fn build_report(
    exp: &ResolvedExperiment,
    curves: &[(EngineKind, EntropyCurve)],
    stationary_value: Option<f64>,
) -> Report {
    let mut comparisons = Vec::new();
    for (i, (kind_a, curve_a)) in curves.iter().enumerate() {
        for (kind_b, curve_b) in &curves[i + 1..] {
            comparisons.push(compare(*kind_a, curve_a, *kind_b, curve_b));
        }
    }
    Report {
        schema_version: SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION"),
        seed: exp.seed,
        engines: exp.config.engines.clone(),
        stationary_value,
        comparisons,
        resolved_config: exp.config.clone(),
    }
}

fn compare(
    kind_a: EngineKind,
    a: &EntropyCurve,
    kind_b: EngineKind,
    b: &EntropyCurve,
) -> Comparison {
    let mut max_abs_gap = 0.0f64;
    let mut at_t = a.points.first().map_or(0.0, |p| p.t);
    let mut max_pull: Option<f64> = None;
    for (pa, pb) in a.points.iter().zip(&b.points) {
        let gap = (pa.density - pb.density).abs();
        if gap >= max_abs_gap {
            max_abs_gap = gap;
            at_t = pa.t;
        }
        let var = pa.stderr.unwrap_or(0.0).powi(2) + pb.stderr.unwrap_or(0.0).powi(2);
        if var > 0.0 {
            let pull = gap / var.sqrt();
            max_pull = Some(max_pull.map_or(pull, |m| m.max(pull)));
        }
    }
    Comparison {
        engine_a: kind_a.as_str(),
        engine_b: kind_b.as_str(),
        max_abs_gap,
        at_t,
        max_pull,
    }
}

/// CSV schema shared by every engine output.
pub const CSV_HEADER: &str = "t,zeta,entropy_density,stderr,engine";

fn write_csv(dir: &Path, engine: EngineKind, curve: &EntropyCurve) -> Result<PathBuf> {
    let path = dir.join(format!("{}.csv", engine.as_str()));
    let mut text = String::with_capacity(64 * (curve.points.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for pt in &curve.points {
        let se = pt.stderr.map(|s| s.to_string()).unwrap_or_default();
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            pt.t,
            pt.zeta,
            pt.density,
            se,
            curve.engine.as_str()
        ));
    }
    persist(dir, &path, text.as_bytes())?;
    Ok(path)
}

fn write_report(dir: &Path, report: &Report) -> Result<PathBuf> {
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| runtime_err(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    persist(dir, &path, text.as_bytes())?;
    Ok(path)
}

/// Write `bytes` to a temporary file in `dir`, then rename onto `path`.
pub fn persist(dir: &Path, path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = NamedTempFile::new_in(dir)
        .map_err(|e| runtime_err(format!("cannot create temp file in {}: {e}", dir.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| runtime_err(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| runtime_err(format!("cannot finalize {}: {e}", path.display())))?;
    Ok(())
}
