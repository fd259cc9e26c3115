//! JSON experiment description: parsing, validation, and resolution into the
//! concrete objects the engines consume.
//!
//! A config names a quench state, a region, a time grid and the engines to
//! run. [`ExperimentConfig::resolve`] validates it, fills every default, and
//! applies the `QUENCHLAT_SEED` override; the resolved form is echoed into
//! `report.json` and re-running it reproduces the outputs bit for bit.

use std::env::VarError;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use quenchlat_core::curve::t_for_zeta;
use quenchlat_core::entropy::STATIONARY_MIN_SUBDIVISIONS;
use quenchlat_core::exact::thermo_min_points;
use quenchlat_core::lattice::QuenchConfig;
use quenchlat_core::qp::QpGeometry;
use quenchlat_core::region::{Region, RegionSpec};
use quenchlat_core::state::{CellState, CellStateSpec};

use crate::error::{config_err, CliError, Result};

/// Config schema understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides the config seed.
pub const SEED_ENV: &str = "QUENCHLAT_SEED";

/// One experiment: a quench state, a region, a time grid and the engines to
/// run on them. This is the schema of the JSON config files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Base RNG seed for the Monte Carlo engine ([`SEED_ENV`] overrides it;
    /// defaults to 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Initial state: one particle configuration per unit cell, e.g.
    /// `{"nu":[2,2],"terms":[{"amp":[1,0],"sites":[0,2]}]}`.
    pub state: CellStateSpec,
    /// Region whose entropy density is tracked, e.g.
    /// `{"shape":"rectangle","lx":5,"ly":1,"theta":0.314}`.
    pub region: RegionSpec,
    pub times: TimesSpec,
    /// Engines to run, in order. At least one.
    pub engines: Vec<EngineKind>,
    #[serde(default)]
    pub params: EngineParams,
    /// Output directory (the CLI `--out` flag takes precedence).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Sampling times, given either in raw time `t` or in the rescaled time
/// `zeta = 2 v_max t / |A|^(1/d)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimesSpec {
    /// `count` evenly spaced points on `[min, max]`.
    Grid { unit: TimeUnit, min: f64, max: f64, count: usize },
    /// Explicit strictly increasing values.
    List { unit: TimeUnit, values: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    /// Raw hopping time.
    T,
    /// Rescaled time `2 v_max t / |A|^(1/d)`.
    Zeta,
}

/// Engines selectable in a config file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    /// Ballistic-mode prediction from exact overlap areas
    /// (intervals and rectangles, including rotated ones).
    Analytic,
    /// Ballistic-mode prediction by Monte Carlo (any polygonal region).
    Mc,
    /// Exact correlation-matrix numerics in the thermodynamic limit
    /// (classical states only).
    ExactThermo,
    /// Exact correlation-matrix numerics on a finite periodic lattice.
    ExactFinite,
    /// Late-time stationary entropy density, emitted as a constant curve.
    Stationary,
}

impl EngineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::Analytic => "analytic",
            EngineKind::Mc => "mc",
            EngineKind::ExactThermo => "exact-thermo",
            EngineKind::ExactFinite => "exact-finite",
            EngineKind::Stationary => "stationary",
        }
    }
}

/// Per-engine tuning knobs. Every field is optional; resolution fills the
/// defaults for the engines actually selected and leaves the rest untouched.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineParams {
    /// Reduced-zone subdivisions per axis for the analytic engine
    /// (default 10000 in 1D, 128 in 2D).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_grid: Option<usize>,
    /// Monte Carlo samples per time point (default 100000).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
    /// Monte Carlo batch size; one RNG stream per batch (default 65536).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_batch: Option<u64>,
    /// Subdivisions per axis for the thermodynamic-limit backend
    /// (default 10240 in 1D, 256 in 2D).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermo_grid: Option<usize>,
    /// Periodic lattice extents for the finite backend (default: large
    /// enough that no wrap-around signal reaches the region by the last
    /// requested time).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_lattice: Option<Vec<usize>>,
    /// Subdivisions per axis for the stationary-density quadrature
    /// (default 4096 in 1D, 256 in 2D).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary_grid: Option<usize>,
}

/// A validated experiment with every default filled in.
pub struct ResolvedExperiment {
    /// Config echoed into `report.json`; re-running it reproduces the CSVs.
    pub config: ExperimentConfig,
    pub qcfg: QuenchConfig,
    pub state: CellState,
    pub region: Region,
    /// Raw times, strictly increasing.
    pub times: Vec<f64>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

fn cfg_core(e: quenchlat_core::Error) -> CliError {
    config_err(e.to_string())
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    /// Validate, fill defaults, apply the seed override from [`SEED_ENV`],
    /// and build the engine inputs. `out_override` is the CLI `--out` flag.
    pub fn resolve(mut self, out_override: Option<&Path>) -> Result<ResolvedExperiment> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.engines.is_empty() {
            return Err(config_err(
                "engines list is empty; pick at least one of analytic, mc, \
                 exact-thermo, exact-finite, stationary",
            ));
        }
        for (i, e) in self.engines.iter().enumerate() {
            if self.engines[..i].contains(e) {
                return Err(config_err(format!("engine {} listed twice", e.as_str())));
            }
        }

        let state = CellState::try_from(self.state.clone()).map_err(cfg_core)?;
        let region = Region::try_from(self.region.clone()).map_err(cfg_core)?;
        if state.dim() != region.dim() {
            return Err(config_err(format!(
                "state cell is {}-dimensional but region is {}-dimensional",
                state.dim(),
                region.dim()
            )));
        }
        if region.dim() == 1 && self.region.theta != 0.0 {
            return Err(config_err("theta is a 2D rotation; intervals do not take one"));
        }
        let qcfg = QuenchConfig::with_unit_hopping(state.nu().to_vec()).map_err(cfg_core)?;

        // Seed precedence: environment > config > 0.
        let seed = match std::env::var(SEED_ENV) {
            Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
                config_err(format!(
                    "{SEED_ENV} must be an unsigned 64-bit integer, got {raw:?}"
                ))
            })?,
            Err(VarError::NotPresent) => self.seed.unwrap_or(0),
            Err(VarError::NotUnicode(_)) => {
                return Err(config_err(format!("{SEED_ENV} is not valid UTF-8")))
            }
        };
        self.seed = Some(seed);

        let times = self.times.raw_times(&qcfg, &region)?;
        self.params = self.params.resolved(&self.engines, &qcfg, &region, &times)?;
        for &engine in &self.engines {
            check_engine_applies(engine, &state, &region)?;
        }

        let out_dir = out_override
            .map(Path::to_path_buf)
            .or_else(|| self.output.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        self.output = Some(out_dir.clone());

        Ok(ResolvedExperiment { config: self, qcfg, state, region, times, seed, out_dir })
    }
}

impl TimesSpec {
    /// The requested sampling times converted to raw `t`, after checking
    /// finiteness, non-negativity and strict monotonicity.
    pub fn raw_times(&self, cfg: &QuenchConfig, region: &Region) -> Result<Vec<f64>> {
        let (unit, values) = match self {
            TimesSpec::Grid { unit, min, max, count } => {
                if *count == 0 {
                    return Err(config_err("times.count must be >= 1"));
                }
                if *count == 1 && min != max {
                    return Err(config_err("times with count = 1 need min == max"));
                }
                if *count > 1 && !(max > min) {
                    return Err(config_err(format!(
                        "times need max > min, got [{min}, {max}]"
                    )));
                }
                let vals = (0..*count)
                    .map(|i| {
                        if *count == 1 {
                            *min
                        } else {
                            min + (max - min) * i as f64 / (*count - 1) as f64
                        }
                    })
                    .collect();
                (*unit, vals)
            }
            TimesSpec::List { unit, values } => {
                if values.is_empty() {
                    return Err(config_err("times.values must not be empty"));
                }
                (*unit, values.clone())
            }
        };
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(config_err(format!("times must be finite and >= 0, got {bad}")));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
            return Err(config_err(format!(
                "times must be strictly increasing, got {} after {}",
                w[1], w[0]
            )));
        }
        Ok(match unit {
            TimeUnit::T => values,
            TimeUnit::Zeta => {
                values.iter().map(|&z| t_for_zeta(cfg, region, z)).collect()
            }
        })
    }
}

impl EngineParams {
    /// Fill defaults for the selected engines and validate the rest.
    fn resolved(
        &self,
        engines: &[EngineKind],
        qcfg: &QuenchConfig,
        region: &Region,
        times: &[f64],
    ) -> Result<EngineParams> {
        let dim = qcfg.dim();
        let uses = |e: EngineKind| engines.contains(&e);
        let mut out = self.clone();

        if uses(EngineKind::Analytic) {
            let m = *out.analytic_grid.get_or_insert(if dim == 1 { 10_000 } else { 128 });
            if m < 8 {
                return Err(config_err(format!("analytic_grid must be >= 8, got {m}")));
            }
        }
        if uses(EngineKind::Mc) {
            let s = *out.mc_samples.get_or_insert(100_000);
            if s == 0 {
                return Err(config_err("mc_samples must be >= 1"));
            }
            if out.mc_batch == Some(0) {
                return Err(config_err("mc_batch must be >= 1"));
            }
        }
        if uses(EngineKind::ExactThermo) {
            let m = *out.thermo_grid.get_or_insert(if dim == 1 { 10_240 } else { 256 });
            let per_axis_min =
                (thermo_min_points(dim) as f64).powf(1.0 / dim as f64).ceil() as usize;
            if m < per_axis_min {
                return Err(config_err(format!(
                    "thermo_grid must be >= {per_axis_min} per axis in {dim}D, got {m}"
                )));
            }
        }
        if uses(EngineKind::ExactFinite) {
            let lattice = match out.finite_lattice.take() {
                Some(l) => l,
                None => default_finite_lattice(qcfg, region, times),
            };
            if lattice.len() != dim {
                return Err(config_err(format!(
                    "finite_lattice needs {dim} extents, got {:?}",
                    lattice
                )));
            }
            for (&l, &nu) in lattice.iter().zip(qcfg.nu()) {
                if l == 0 || l % nu != 0 {
                    return Err(config_err(format!(
                        "finite_lattice extent {l} is not a positive multiple of the \
                         cell extent {nu}"
                    )));
                }
            }
            out.finite_lattice = Some(lattice);
        }
        if uses(EngineKind::Stationary) {
            let m = *out.stationary_grid.get_or_insert(if dim == 1 { 4_096 } else { 256 });
            if m < STATIONARY_MIN_SUBDIVISIONS {
                return Err(config_err(format!(
                    "stationary_grid must be >= {STATIONARY_MIN_SUBDIVISIONS}, got {m}"
                )));
            }
        }
        Ok(out)
    }
}

/// Smallest cell-commensurate periodic lattice on which no wrap-around
/// signal (moving at `v_max` from the region's periodic images) reaches the
/// region within the simulated window.
fn default_finite_lattice(qcfg: &QuenchConfig, region: &Region, times: &[f64]) -> Vec<usize> {
    let t_max = times.last().copied().unwrap_or(0.0);
    let (lo, hi) = region.bounding_box();
    qcfg.nu()
        .iter()
        .enumerate()
        .map(|(axis, &nu)| {
            let extent = (hi[axis] - lo[axis]).max(1.0);
            let needed = extent + 2.0 * qcfg.v_max() * t_max + 2.0;
            let cells = (needed / nu as f64).ceil() as usize;
            cells.max(4) * nu
        })
        .collect()
}

/// Reject engine/state/region combinations the engines cannot compute.
fn check_engine_applies(engine: EngineKind, state: &CellState, region: &Region) -> Result<()> {
    match engine {
        EngineKind::Analytic => {
            if QpGeometry::from_region(region).is_none() {
                return Err(config_err(
                    "the analytic engine handles intervals and rectangles only; \
                     use mc for general polygons",
                ));
            }
            let want: &[usize] = if region.dim() == 1 { &[4] } else { &[2, 2] };
            if state.nu() != want {
                return Err(config_err(format!(
                    "the analytic engine needs a {want:?} unit cell in {}D, got {:?}",
                    region.dim(),
                    state.nu()
                )));
            }
        }
        EngineKind::ExactThermo => {
            if !state.is_classical() {
                return Err(config_err(
                    "exact-thermo handles classical (single-configuration) states; \
                     use exact-finite for superpositions",
                ));
            }
        }
        EngineKind::Mc | EngineKind::ExactFinite | EngineKind::Stationary => {}
    }
    Ok(())
}
