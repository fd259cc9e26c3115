//! Semiclassical (ballistic mode-spreading) entropy engines.
//!
//! After the quench, each momentum multiplet spreads as `|nu|` rigid copies
//! of the subsystem region translated with the opposite group velocities of
//! its modes. The entanglement entropy is the momentum average of the
//! mode-bipartition entropies of the multiplet, weighted by the exact area
//! covered by each subset of copies:
//!
//! `S_A(t) = sum_p w_p sum_M s_p(M) * area_M(p, t)`
//!
//! where `M` runs over mode subsets, `s_p(M)` is the bipartition entropy of
//! the multiplet correlation matrix ([`crate::entropy::bipartition_entropy`])
//! and `area_M` is the measure of the set covered by exactly the copies in
//! `M`. The engines here evaluate this with midpoint quadrature over the
//! reduced zone and *exact* per-mask areas:
//!
//! * intervals (1D, four-mode cells) — segment sweep of translated windows;
//! * axis-aligned rectangles (2x2 cells) — per-axis factorized coverage with
//!   closed-form in-cell momentum integrals of the coverage lengths, so the
//!   quadrature error comes only from the momentum dependence of `s_p`
//!   (none at all for product states);
//! * rotated rectangles (2x2 cells) — exact rectangle-frame product areas
//!   ([`rotated::rect_mask_areas`]), cross-checked against independent
//!   polygon clipping ([`clip`]).
//!
//! All momentum reductions go through [`crate::exec`], so results are
//! bit-identical between the sequential and parallel paths.

mod areas;
pub mod clip;
pub mod closed_form;
pub mod rotated;
mod sweep;

pub use areas::{areas_1d_nu4, areas_2d_rect, areas_2d_rect_rotated, AreaBreakdown};
pub use closed_form::{closed_form_rectangle, f_cover};

use std::f64::consts::PI;

use crate::curve::{CurvePoint, EngineTag, EntropyCurve};
use crate::entropy::all_bipartition_entropies;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::lattice::{QuenchConfig, ReducedGrid};
use crate::region::{Region, Shape};
use crate::state::{cell_green, multiplet_correlation, CellGreen, CellState};

use areas::mode_offsets;
use rotated::rect_mask_areas;
use sweep::{int_min_csin, int_pos_l_minus_csin, interval_cover};

/// Grid points (or cells) per deterministic reduction chunk.
const CHUNK: usize = 256;

/// Region families the analytic engine evaluates in closed geometric form.
#[derive(Clone, Debug, PartialEq)]
pub enum QpGeometry {
    /// 1D interval of length `l` (requires a four-mode 1D cell).
    Interval { l: f64 },
    /// Axis-aligned `lx x ly` rectangle (requires a 2x2 cell).
    Rectangle { lx: f64, ly: f64 },
    /// `lx x ly` rectangle rotated by `theta` (requires a 2x2 cell).
    RotatedRectangle { lx: f64, ly: f64, theta: f64 },
}

impl QpGeometry {
    pub fn dim(&self) -> usize {
        match self {
            QpGeometry::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Measure of the region (length in 1D, area in 2D).
    pub fn area(&self) -> f64 {
        match self {
            QpGeometry::Interval { l } => *l,
            QpGeometry::Rectangle { lx, ly }
            | QpGeometry::RotatedRectangle { lx, ly, .. } => lx * ly,
        }
    }

    /// Linear scale `|A|^(1/d)` entering the rescaled time.
    pub fn linear_scale(&self) -> f64 {
        match self {
            QpGeometry::Interval { l } => *l,
            _ => self.area().sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            QpGeometry::Interval { l } => {
                if !ok(l) {
                    return Err(Error::InvalidParameter(format!(
                        "interval length must be positive, got {l}"
                    )));
                }
            }
            QpGeometry::Rectangle { lx, ly } => {
                if !ok(lx) || !ok(ly) {
                    return Err(Error::InvalidParameter(format!(
                        "rectangle sides must be positive, got {lx} x {ly}"
                    )));
                }
            }
            QpGeometry::RotatedRectangle { lx, ly, theta } => {
                if !ok(lx) || !ok(ly) || !theta.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "rotated rectangle needs positive sides and finite angle, \
                         got {lx} x {ly} at {theta}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Recognize a [`Region`] the analytic engine can handle: intervals, and
    /// 4-vertex polygons that are rectangles (combining the polygon's own
    /// orientation with the region's rotation). Returns `None` for anything
    /// else; an effective angle within `1e-9` of a quarter turn counts as
    /// axis-aligned.
    pub fn from_region(region: &Region) -> Option<QpGeometry> {
        match region.shape() {
            Shape::Interval { l } => Some(QpGeometry::Interval { l: *l }),
            Shape::Polygon { vertices } => {
                if vertices.len() != 4 {
                    return None;
                }
                let edge = |a: usize, b: usize| {
                    [vertices[b][0] - vertices[a][0], vertices[b][1] - vertices[a][1]]
                };
                let e01 = edge(0, 1);
                let e12 = edge(1, 2);
                let e23 = edge(2, 3);
                let e30 = edge(3, 0);
                let norm = |e: [f64; 2]| e[0].hypot(e[1]);
                let (lx, ly) = (norm(e01), norm(e12));
                let tol = 1e-9 * (lx + ly);
                let is_rect = (norm(e23) - lx).abs() < tol
                    && (norm(e30) - ly).abs() < tol
                    && (e01[0] * e12[0] + e01[1] * e12[1]).abs() < tol * (lx + ly);
                if !is_rect {
                    return None;
                }
                // effective rotation = region rotation + raw orientation
                let total = region.theta() + e01[1].atan2(e01[0]);
                let quarter_turns = (total / (PI / 2.0)).round();
                let residual = total - quarter_turns * PI / 2.0;
                if residual.abs() < 1e-9 {
                    // quarter turns swap the side labels
                    if (quarter_turns as i64).rem_euclid(2) == 1 {
                        Some(QpGeometry::Rectangle { lx: ly, ly: lx })
                    } else {
                        Some(QpGeometry::Rectangle { lx, ly })
                    }
                } else {
                    Some(QpGeometry::RotatedRectangle { lx, ly, theta: total })
                }
            }
        }
    }
}

/// Mode-bipartition entropy tables, one `2^|nu|` row per momentum grid point.
///
/// Product (single-term) states have momentum-independent tables — the
/// multiplet correlation is a fixed projector conjugated by phases that
/// cancel inside every principal minor — so one shared row serves the whole
/// grid. Superposition states get one row per grid point, computed once and
/// reused across all requested times.
enum Tables {
    Shared(Vec<f64>),
    PerPoint(Vec<Vec<f64>>),
}

impl Tables {
    fn at(&self, i: usize) -> &[f64] {
        match self {
            Tables::Shared(row) => row,
            Tables::PerPoint(rows) => &rows[i],
        }
    }
}

fn contribution_tables(
    cfg: &QuenchConfig,
    green: &CellGreen,
    classical: bool,
    grid: &ReducedGrid,
    mode: ExecMode,
) -> Result<Tables> {
    let row_at = |i: usize| -> Result<Vec<f64>> {
        let corr = multiplet_correlation(cfg, green, &grid.point(i))?;
        all_bipartition_entropies(&corr)
    };
    if classical {
        return Ok(Tables::Shared(row_at(0)?));
    }
    let rows = exec::indexed_map(mode, grid.len(), 64, row_at)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Tables::PerPoint(rows))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn merge_curves(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// `S_A(t)` for an interval: per-momentum segment sweep of the four
/// translated windows.
fn interval_totals(
    cfg: &QuenchConfig,
    grid: &ReducedGrid,
    tables: &Tables,
    l: f64,
    times: &[f64],
    mode: ExecMode,
) -> Vec<f64> {
    let accum = exec::chunked_fold(
        mode,
        grid.len(),
        CHUNK,
        |range| {
            let mut acc = vec![0.0; times.len()];
            for i in range {
                let p = grid.point(i);
                let table = tables.at(i);
                let u: Vec<f64> = mode_offsets(cfg, &p).iter().map(|o| o[0]).collect();
                for (ti, &t) in times.iter().enumerate() {
                    let starts: Vec<f64> = u.iter().map(|&ui| ui * t).collect();
                    let lens = interval_cover(&starts, l);
                    acc[ti] += dot(&lens, table);
                }
            }
            acc
        },
        merge_curves,
        vec![0.0; times.len()],
    );
    accum.into_iter().map(|s| s * grid.weight()).collect()
}

/// Flat mode mask of the product of per-axis group masks
/// (mode flat index = kx * 2 + ky).
fn product_bits(mx: usize, my: usize) -> usize {
    let mut bits = 0usize;
    for kx in 0..2 {
        for ky in 0..2 {
            if mx >> kx & 1 == 1 && my >> ky & 1 == 1 {
                bits |= 1 << (kx * 2 + ky);
            }
        }
    }
    bits
}

/// `S_A(t)` for an axis-aligned rectangle, with exact in-cell momentum
/// integrals of the per-axis coverage lengths and the entropy table taken at
/// the cell midpoint.
fn rect_totals(
    cfg: &QuenchConfig,
    grid: &ReducedGrid,
    tables: &Tables,
    lx: f64,
    ly: f64,
    times: &[f64],
    mode: ExecMode,
) -> Vec<f64> {
    let subs = grid.subdivisions();
    let (nx, ny) = (subs[0], subs[1]);
    let widths = cfg.reduced_widths();
    // (axis-mask pair, flat-mask bits) for the nine coverage products
    let combos: Vec<(usize, usize, usize)> = (1..4usize)
        .flat_map(|mx| (1..4usize).map(move |my| (mx, my, product_bits(mx, my))))
        .collect();
    times
        .iter()
        .map(|&t| {
            let c = 2.0 * cfg.v_max() * t;
            // per-axis in-cell integrals: [only-each, both] per cell
            let axis_ints = |n: usize, width: f64, side: f64| -> Vec<[f64; 2]> {
                (0..n)
                    .map(|i| {
                        let p0 = i as f64 * width / n as f64;
                        let p1 = (i + 1) as f64 * width / n as f64;
                        [int_min_csin(c, side, p0, p1), int_pos_l_minus_csin(c, side, p0, p1)]
                    })
                    .collect()
            };
            let ix = axis_ints(nx, widths[0], lx);
            let iy = axis_ints(ny, widths[1], ly);
            let raw = exec::chunked_sum(mode, nx * ny, CHUNK, |flat| {
                let table = tables.at(flat);
                let gx = &ix[flat / ny];
                let gy = &iy[flat % ny];
                // axis mask 1 and 2 are the two only-one-group regions
                // (equal lengths), 3 is the both-groups region
                let pick = |g: &[f64; 2], m: usize| if m == 3 { g[1] } else { g[0] };
                combos
                    .iter()
                    .map(|&(mx, my, bits)| table[bits] * pick(gx, mx) * pick(gy, my))
                    .sum()
            });
            raw / (2.0 * PI).powi(2)
        })
        .collect()
}

/// `S_A(t)` for a rotated rectangle: exact rectangle-frame product areas
/// per momentum grid point.
fn rotated_totals(
    cfg: &QuenchConfig,
    grid: &ReducedGrid,
    tables: &Tables,
    lx: f64,
    ly: f64,
    theta: f64,
    times: &[f64],
    mode: ExecMode,
) -> Vec<f64> {
    let accum = exec::chunked_fold(
        mode,
        grid.len(),
        CHUNK,
        |range| {
            let mut acc = vec![0.0; times.len()];
            for i in range {
                let p = grid.point(i);
                let table = tables.at(i);
                let offsets = mode_offsets(cfg, &p);
                for (ti, &t) in times.iter().enumerate() {
                    let translations: Vec<[f64; 2]> =
                        offsets.iter().map(|o| [o[0] * t, o[1] * t]).collect();
                    let areas = rect_mask_areas(lx, ly, theta, &translations);
                    acc[ti] += dot(&areas, table);
                }
            }
            acc
        },
        merge_curves,
        vec![0.0; times.len()],
    );
    accum.into_iter().map(|s| s * grid.weight()).collect()
}

/// Entropy density `S_A(t) / |A|` of a region under ballistic mode
/// spreading, sampled at `times`.
///
/// `grid` sets the reduced-zone quadrature resolution; the entropy tables
/// are computed once per grid point (once in total for product states) and
/// reused across all times. Interval geometry requires a four-mode 1D cell,
/// rectangle geometries a 2x2 cell ([`Error::GeometryStateMismatch`]
/// otherwise). Results are bit-stable across execution modes and worker
/// counts.
pub fn qp_entropy_analytic(
    cfg: &QuenchConfig,
    state: &CellState,
    geometry: &QpGeometry,
    grid: &ReducedGrid,
    times: &[f64],
    mode: ExecMode,
) -> Result<EntropyCurve> {
    geometry.validate()?;
    if state.nu() != cfg.nu() {
        return Err(Error::InvalidState(format!(
            "state cell {:?} does not match configuration cell {:?}",
            state.nu(),
            cfg.nu()
        )));
    }
    if grid.dim() != cfg.dim() {
        return Err(Error::InvalidConfig(format!(
            "grid dimension {} does not match configuration dimension {}",
            grid.dim(),
            cfg.dim()
        )));
    }
    let compatible = match geometry {
        QpGeometry::Interval { .. } => cfg.dim() == 1 && cfg.nu() == [4],
        QpGeometry::Rectangle { .. } | QpGeometry::RotatedRectangle { .. } => {
            cfg.dim() == 2 && cfg.nu() == [2, 2]
        }
    };
    if !compatible {
        return Err(Error::GeometryStateMismatch(format!(
            "{geometry:?} is not compatible with cell {:?}",
            cfg.nu()
        )));
    }
    if let Some(&bad) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::InvalidParameter(format!("times must be finite and >= 0, got {bad}")));
    }

    let green = cell_green(state)?;
    let tables = contribution_tables(cfg, &green, state.is_classical(), grid, mode)?;

    let totals = match *geometry {
        QpGeometry::Interval { l } => interval_totals(cfg, grid, &tables, l, times, mode),
        QpGeometry::Rectangle { lx, ly } => {
            rect_totals(cfg, grid, &tables, lx, ly, times, mode)
        }
        QpGeometry::RotatedRectangle { lx, ly, theta } => {
            rotated_totals(cfg, grid, &tables, lx, ly, theta, times, mode)
        }
    };

    let area = geometry.area();
    let scale = geometry.linear_scale();
    let points = times
        .iter()
        .zip(totals)
        .map(|(&t, s)| CurvePoint::simple(t, 2.0 * cfg.v_max() * t / scale, s / area))
        .collect();
    Ok(EntropyCurve { engine: EngineTag::Analytic, points })
}
