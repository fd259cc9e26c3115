//! Monte Carlo estimator of the spreading-mode entropy density.
//!
//! Instead of integrating exact coverage areas over momentum (the analytic
//! engines), this engine samples the same decomposition pointwise, which
//! works for *any* region shape:
//!
//! 1. draw a point `x~` uniformly in the region `A`;
//! 2. draw a momentum `p` uniformly in the reduced zone and a mode index
//!    `n` uniformly among the `|nu|` multiplet modes;
//! 3. displace: `x = x~ + u_n t` with `u_i = 2J sin(p + k_i)` per axis;
//! 4. form the mode subset `M = {i : x - u_i t in A}` — mode `n` is a
//!    member by construction and is recorded as such (re-testing it could
//!    spuriously fail on the region boundary after floating-point
//!    round-trip);
//! 5. score `y = s_p(M) / |M|`, where `s_p(M)` is the mode-bipartition
//!    entropy; the full subset scores 0.
//!
//! The sample mean of `y` is an unbiased estimator of `S_A(t) / |A|`: the
//! change of variables from `x~` to `x` shows each covered point is visited
//! once per covering mode, and the `1 / |M|` weight cancels exactly that
//! multiplicity (see the in-module mutation test: dropping the weight
//! breaks the calibration against the exact engine by far more than the
//! statistical error).
//!
//! Determinism: batch `b` of time point `ti` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `ti * n_batches + b`, and
//! batch partial sums merge in batch order, so results are bit-identical
//! across worker counts and between the sequential and parallel paths, and
//! a one-time curve equals the standalone single-time estimate bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{zeta_for, CurvePoint, EngineTag, EntropyCurve};
use crate::entropy::{all_bipartition_entropies, bipartition_entropy, ModeMask};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::lattice::{kshifts, Momentum, QuenchConfig};
use crate::region::Region;
use crate::state::{cell_green, multiplet_correlation, CellGreen, CellState};

/// Monte Carlo sampling plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    /// Total samples per time point.
    pub samples: u64,
    /// Samples per RNG stream (the unit of deterministic parallelism).
    pub batch_size: u64,
    /// Base seed; every (time, batch) pair derives its own stream from it.
    pub seed: u64,
}

impl McConfig {
    pub const DEFAULT_BATCH_SIZE: u64 = 65_536;

    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        McConfig { samples, batch_size: Self::DEFAULT_BATCH_SIZE, seed }.validated()
    }

    pub fn with_batch_size(mut self, batch_size: u64) -> Result<Self> {
        self.batch_size = batch_size;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.samples < 2 {
            return Err(Error::InvalidMcConfig(format!(
                "need at least 2 samples for an error estimate, got {}",
                self.samples
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidMcConfig("batch size must be >= 1".into()));
        }
        Ok(self)
    }

    /// Number of RNG streams per time point.
    pub fn n_batches(&self) -> u64 {
        self.samples.div_ceil(self.batch_size)
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    /// Estimated entropy density `S_A(t) / |A|`.
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Samples contributing to the estimate.
    pub samples: u64,
}

/// Whether samples carry the inverse-multiplicity weight. Production always
/// divides; the unweighted variant exists so tests can demonstrate that the
/// weight is what makes the estimator unbiased.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SampleWeight {
    InverseMultiplicity,
    #[cfg_attr(not(test), allow(dead_code))]
    Unweighted,
}

struct McContext<'a> {
    cfg: &'a QuenchConfig,
    green: &'a CellGreen,
    region: &'a Region,
    /// reduced-zone widths per axis
    widths: Vec<f64>,
    /// mode shift components, flattened `[mode][axis]`
    shifts: Vec<Vec<f64>>,
    /// momentum-independent entropy table (product states only)
    shared_table: Option<Vec<f64>>,
    weight: SampleWeight,
}

impl McContext<'_> {
    fn entropy_of(&self, p: &[f64], mask: ModeMask) -> Result<f64> {
        if let Some(table) = &self.shared_table {
            return Ok(table[mask.0 as usize]);
        }
        let corr =
            multiplet_correlation(self.cfg, self.green, &Momentum::new(p.to_vec()))?;
        bipartition_entropy(&corr, mask)
    }

    /// Sum and sum of squares of the scores of `count` samples.
    fn batch_sums(&self, rng: &mut ChaCha8Rng, count: u64, t: f64) -> Result<(f64, f64)> {
        let d = self.cfg.dim();
        let total = self.cfg.nu_total();
        let full = ModeMask::all(total);
        let j2 = 2.0 * self.cfg.hopping();
        let mut p = vec![0.0; d];
        let mut disp = vec![0.0; total * d];
        let mut probe = vec![0.0; d];
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..count {
            let origin = self.region.sample_uniform(rng)?.point;
            for (pa, w) in p.iter_mut().zip(&self.widths) {
                *pa = rng.gen_range(0.0..*w);
            }
            let n = rng.gen_range(0..total);
            for i in 0..total {
                for a in 0..d {
                    disp[i * d + a] = j2 * (p[a] + self.shifts[i][a]).sin() * t;
                }
            }
            let mut bits = 1u16 << n;
            let mut multiplicity = 1u32;
            for i in 0..total {
                if i == n {
                    continue;
                }
                for a in 0..d {
                    probe[a] = origin[a] + disp[n * d + a] - disp[i * d + a];
                }
                if self.region.contains(&probe) {
                    bits |= 1 << i;
                    multiplicity += 1;
                }
            }
            let mask = ModeMask(bits);
            let y = if mask == full {
                0.0
            } else {
                let s = self.entropy_of(&p, mask)?;
                match self.weight {
                    SampleWeight::InverseMultiplicity => s / multiplicity as f64,
                    SampleWeight::Unweighted => s,
                }
            };
            sum += y;
            sumsq += y * y;
        }
        Ok((sum, sumsq))
    }

    /// Estimate at one time, drawing streams `time_index * B ..` in order.
    fn estimate(
        &self,
        mc: &McConfig,
        time_index: usize,
        t: f64,
        mode: ExecMode,
    ) -> Result<McEstimate> {
        let n_batches = mc.n_batches();
        let stream_base = time_index as u64 * n_batches;
        let totals = exec::chunked_fold(
            mode,
            n_batches as usize,
            1,
            |range| -> Result<(f64, f64)> {
                let (mut sum, mut sumsq) = (0.0, 0.0);
                for b in range {
                    let b = b as u64;
                    let lo = b * mc.batch_size;
                    let hi = ((b + 1) * mc.batch_size).min(mc.samples);
                    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
                    rng.set_stream(stream_base + b);
                    let (s, s2) = self.batch_sums(&mut rng, hi - lo, t)?;
                    sum += s;
                    sumsq += s2;
                }
                Ok((sum, sumsq))
            },
            |a, b| match (a, b) {
                (Ok((s, s2)), Ok((u, u2))) => Ok((s + u, s2 + u2)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            },
            Ok((0.0, 0.0)),
        )?;
        let n = mc.samples as f64;
        let mean = totals.0 / n;
        let var = ((totals.1 - n * mean * mean) / (n - 1.0)).max(0.0);
        Ok(McEstimate { mean, stderr: (var / n).sqrt(), samples: mc.samples })
    }
}

fn build_context<'a>(
    cfg: &'a QuenchConfig,
    state: &CellState,
    region: &'a Region,
    green: &'a CellGreen,
    weight: SampleWeight,
) -> Result<McContext<'a>> {
    if state.nu() != cfg.nu() {
        return Err(Error::InvalidState(format!(
            "state cell {:?} does not match configuration cell {:?}",
            state.nu(),
            cfg.nu()
        )));
    }
    if region.dim() != cfg.dim() {
        return Err(Error::GeometryStateMismatch(format!(
            "{}D region does not match {}D configuration",
            region.dim(),
            cfg.dim()
        )));
    }
    let shared_table = if state.is_classical() {
        // momentum independent: evaluate once at an arbitrary momentum
        let p = Momentum::new(vec![0.1; cfg.dim()]);
        let corr = multiplet_correlation(cfg, green, &p)?;
        Some(all_bipartition_entropies(&corr)?)
    } else {
        None
    };
    Ok(McContext {
        cfg,
        green,
        region,
        widths: cfg.reduced_widths(),
        shifts: kshifts(cfg)
            .iter()
            .map(|k| k.components().to_vec())
            .collect(),
        shared_table,
        weight,
    })
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Monte Carlo estimate of the entropy density `S_A(t) / |A|` at one time.
///
/// Works for any region shape (intervals, rectangles, polygons, stars).
/// Equals the first point of [`qp_entropy_curve_mc`] bit for bit when `t`
/// is the first requested time.
pub fn qp_entropy_mc(
    cfg: &QuenchConfig,
    state: &CellState,
    region: &Region,
    t: f64,
    mc: &McConfig,
    mode: ExecMode,
) -> Result<McEstimate> {
    mc.validated()?;
    check_time(t)?;
    let green = cell_green(state)?;
    let ctx = build_context(cfg, state, region, &green, SampleWeight::InverseMultiplicity)?;
    ctx.estimate(mc, 0, t, mode)
}

/// Monte Carlo entropy-density curve over `times`, with per-point standard
/// errors. Time point `i` uses RNG streams `i * n_batches ..`, so curves
/// are reproducible point by point regardless of which times are requested
/// together.
pub fn qp_entropy_curve_mc(
    cfg: &QuenchConfig,
    state: &CellState,
    region: &Region,
    times: &[f64],
    mc: &McConfig,
    mode: ExecMode,
) -> Result<EntropyCurve> {
    mc.validated()?;
    for &t in times {
        check_time(t)?;
    }
    let green = cell_green(state)?;
    let ctx = build_context(cfg, state, region, &green, SampleWeight::InverseMultiplicity)?;
    let points = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let est = ctx.estimate(mc, i, t, mode)?;
            Ok(CurvePoint {
                t,
                zeta: zeta_for(cfg, region, t),
                density: est.mean,
                stderr: Some(est.stderr),
                site_density: None,
                area_density: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyCurve { engine: EngineTag::Mc, points })
}
