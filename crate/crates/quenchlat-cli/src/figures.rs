//! Built-in experiment presets: the reference curve sets shipped with the
//! project, at desk-scale resolution.
//!
//! Each preset expands into a list of named variants (one per state, region
//! and rotation angle). `reproduce` gives every variant its own directory
//! containing `config.json`, the per-engine CSVs and `report.json`, so any
//! variant can be re-run or upscaled later with `quenchlat run`.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use quenchlat_core::exec::ExecMode;
use quenchlat_core::region::{RegionSpec, ShapeSpec};
use quenchlat_core::state::{CellStateSpec, CellTermSpec};

use crate::config::{
    EngineKind, EngineParams, ExperimentConfig, TimeUnit, TimesSpec, SCHEMA_VERSION,
};
use crate::error::{config_err, runtime_err, Result};
use crate::runner;

pub const KNOWN_IDS: [&str; 5] = ["fig3a", "fig3b", "fig5", "fig6", "fig7"];

pub struct FigurePreset {
    pub id: &'static str,
    pub summary: &'static str,
    pub variants: Vec<(String, ExperimentConfig)>,
}

/// Look up a preset by id.
pub fn preset(id: &str) -> Result<FigurePreset> {
    match id {
        "fig3a" => Ok(fig3a()),
        "fig3b" => Ok(fig3b()),
        "fig5" => Ok(fig5()),
        "fig6" => Ok(fig6()),
        "fig7" => Ok(fig7()),
        other => Err(config_err(format!(
            "unknown figure id {other:?}; known ids: {}",
            KNOWN_IDS.join(", ")
        ))),
    }
}

/// Expand a preset and run every variant.
pub fn reproduce(
    id: &str,
    out_parent: Option<&Path>,
    mc_samples: Option<u64>,
    time_points: Option<usize>,
    mode: ExecMode,
) -> Result<()> {
    let preset = preset(id)?;
    let parent = out_parent
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("figures").join(preset.id));
    println!("{}: {}", preset.id, preset.summary);

    let total = preset.variants.len();
    for (idx, (name, mut config)) in preset.variants.into_iter().enumerate() {
        if let Some(samples) = mc_samples {
            if config.engines.contains(&EngineKind::Mc) {
                config.params.mc_samples = Some(samples);
            }
        }
        if let Some(count) = time_points {
            if let TimesSpec::Grid { count: c, .. } = &mut config.times {
                *c = count;
            }
        }
        let dir = parent.join(&name);
        let resolved = config.resolve(Some(&dir))?;
        fs::create_dir_all(&dir)
            .map_err(|e| runtime_err(format!("cannot create {}: {e}", dir.display())))?;
        let config_json = {
            let mut text = serde_json::to_string_pretty(&resolved.config)
                .map_err(|e| runtime_err(format!("cannot serialize config: {e}")))?;
            text.push('\n');
            text
        };
        runner::persist(&dir, &dir.join("config.json"), config_json.as_bytes())?;
        runner::execute(&resolved, mode)?;
        println!("  [{}/{}] {}", idx + 1, total, dir.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Preset construction
// ---------------------------------------------------------------------------

fn classical(nu: &[usize], sites: &[usize]) -> CellStateSpec {
    CellStateSpec {
        nu: nu.to_vec(),
        terms: vec![CellTermSpec { amp: [1.0, 0.0], sites: sites.to_vec() }],
    }
}

/// Two-configuration superposition `|a> + alpha |b>` in each cell.
fn superposed(nu: &[usize], a: &[usize], b: &[usize], alpha: f64) -> CellStateSpec {
    CellStateSpec {
        nu: nu.to_vec(),
        terms: vec![
            CellTermSpec { amp: [1.0, 0.0], sites: a.to_vec() },
            CellTermSpec { amp: [alpha, 0.0], sites: b.to_vec() },
        ],
    }
}

fn zeta_grid(count: usize) -> TimesSpec {
    TimesSpec::Grid { unit: TimeUnit::Zeta, min: 0.0, max: 3.0, count }
}

fn region(shape: ShapeSpec, theta: f64) -> RegionSpec {
    RegionSpec { shape, theta, offset: None }
}

fn experiment(
    seed: u64,
    state: CellStateSpec,
    region: RegionSpec,
    engines: Vec<EngineKind>,
    params: EngineParams,
) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        seed: Some(seed),
        state,
        region,
        times: zeta_grid(31),
        engines,
        params,
        output: None,
    }
}

/// 1D chain, four-site cells: three classical states against the
/// thermodynamic-limit numerics at two interval lengths.
fn fig3a() -> FigurePreset {
    let states = [("s0", vec![0usize]), ("s01", vec![0, 1]), ("s02", vec![0, 2])];
    let lengths = [20.0f64, 40.0];
    let mut variants = Vec::new();
    let mut seed = 100;
    for (sname, sites) in &states {
        for &l in &lengths {
            let params = EngineParams {
                analytic_grid: Some(10_000),
                thermo_grid: Some(10_240),
                stationary_grid: Some(4_096),
                ..EngineParams::default()
            };
            variants.push((
                format!("{sname}-l{l:.0}"),
                experiment(
                    seed,
                    classical(&[4], sites),
                    region(ShapeSpec::Interval { l }, 0.0),
                    vec![EngineKind::Analytic, EngineKind::ExactThermo, EngineKind::Stationary],
                    params,
                ),
            ));
            seed += 1;
        }
    }
    FigurePreset {
        id: "fig3a",
        summary: "1D classical cell states: ballistic prediction vs exact \
                  thermodynamic-limit numerics on intervals",
        variants,
    }
}

/// 2D square lattice, 2x2 cells: three classical states on aligned squares
/// against finite-lattice numerics at two subsystem sizes.
fn fig3b() -> FigurePreset {
    let states = [("s0", vec![0usize]), ("s02", vec![0, 2]), ("s03", vec![0, 3])];
    let sides = [4.0f64, 8.0];
    let mut variants = Vec::new();
    let mut seed = 200;
    for (sname, sites) in &states {
        for &l in &sides {
            // finite_lattice is left to the auto default, which sizes the
            // periodic lattice so no wrap-around signal arrives by t_max.
            let params = EngineParams {
                analytic_grid: Some(128),
                stationary_grid: Some(256),
                ..EngineParams::default()
            };
            variants.push((
                format!("{sname}-l{l:.0}"),
                experiment(
                    seed,
                    classical(&[2, 2], sites),
                    region(ShapeSpec::Rectangle { lx: l, ly: l }, 0.0),
                    vec![EngineKind::Analytic, EngineKind::ExactFinite, EngineKind::Stationary],
                    params,
                ),
            ));
            seed += 1;
        }
    }
    FigurePreset {
        id: "fig3b",
        summary: "2D classical cell states: ballistic prediction vs exact \
                  finite-lattice numerics on aligned squares",
        variants,
    }
}

/// Rotation (in)dependence for rectangles: two aspect ratios, four angles,
/// analytic and Monte Carlo side by side.
fn fig5() -> FigurePreset {
    let state_alpha = 10.0 / 7.0;
    let shapes: [(&str, f64, f64); 2] = [
        ("r1", 1.0, 1.0),
        ("r5", 5.0f64.sqrt(), 1.0 / 5.0f64.sqrt()),
    ];
    let angles = [("deg0", 0.0), ("deg18", PI / 10.0), ("deg54", 3.0 * PI / 10.0), ("deg90", PI / 2.0)];
    let mut variants = Vec::new();
    let mut seed = 500;
    for (rname, lx, ly) in &shapes {
        for (aname, theta) in &angles {
            let params = EngineParams {
                analytic_grid: Some(96),
                mc_samples: Some(200_000),
                stationary_grid: Some(256),
                ..EngineParams::default()
            };
            variants.push((
                format!("{rname}-{aname}"),
                experiment(
                    seed,
                    superposed(&[2, 2], &[0, 2], &[0, 3], state_alpha),
                    region(ShapeSpec::Rectangle { lx: *lx, ly: *ly }, *theta),
                    vec![EngineKind::Analytic, EngineKind::Mc, EngineKind::Stationary],
                    params,
                ),
            ));
            seed += 1;
        }
    }
    FigurePreset {
        id: "fig5",
        summary: "rectangles at two aspect ratios and four rotation angles: \
                  analytic vs Monte Carlo ballistic prediction",
        variants,
    }
}

/// Non-rectangular convex regions (two triangles and a regular pentagon)
/// at four rotation angles, Monte Carlo only.
fn fig6() -> FigurePreset {
    let shapes: [(&str, ShapeSpec); 3] = [
        (
            "iso",
            ShapeSpec::Polygon {
                vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.20711]],
            },
        ),
        ("equi", ShapeSpec::RegularPolygon { q: 3, circumradius: 1.0 / 3.0f64.sqrt() }),
        ("pent", ShapeSpec::RegularPolygon { q: 5, circumradius: 0.5528 }),
    ];
    let angles = [("deg0", 0.0), ("deg18", PI / 10.0), ("deg54", 3.0 * PI / 10.0), ("deg90", PI / 2.0)];
    let mut variants = Vec::new();
    let mut seed = 600;
    for (rname, shape) in &shapes {
        for (aname, theta) in &angles {
            let params = EngineParams {
                mc_samples: Some(200_000),
                stationary_grid: Some(256),
                ..EngineParams::default()
            };
            variants.push((
                format!("{rname}-{aname}"),
                experiment(
                    seed,
                    superposed(&[2, 2], &[0, 2], &[0, 3], 0.5),
                    region(shape.clone(), *theta),
                    vec![EngineKind::Mc, EngineKind::Stationary],
                    params,
                ),
            ));
            seed += 1;
        }
    }
    FigurePreset {
        id: "fig6",
        summary: "triangles and a regular pentagon at four rotation angles: \
                  Monte Carlo ballistic prediction",
        variants,
    }
}

/// A non-convex five-pointed star at three rotation angles for a classical
/// diagonal-pair state.
fn fig7() -> FigurePreset {
    let angles = [("deg0", 0.0), ("deg12", PI / 15.0), ("deg24", 2.0 * PI / 15.0)];
    let mut variants = Vec::new();
    let mut seed = 700;
    for (aname, theta) in &angles {
        let params = EngineParams {
            mc_samples: Some(200_000),
            stationary_grid: Some(256),
            ..EngineParams::default()
        };
        variants.push((
            (*aname).to_string(),
            experiment(
                seed,
                classical(&[2, 2], &[0, 3]),
                region(
                    ShapeSpec::Star { points: 5, outer: 1.0, inner: Some(0.4) },
                    *theta,
                ),
                vec![EngineKind::Mc, EngineKind::Stationary],
                params,
            ),
        ));
        seed += 1;
    }
    FigurePreset {
        id: "fig7",
        summary: "five-pointed star at three rotation angles: Monte Carlo \
                  ballistic prediction for a non-convex region",
        variants,
    }
}
