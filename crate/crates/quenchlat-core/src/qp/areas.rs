//! Exact coverage-area breakdowns for the three analytic geometries:
//! 1D intervals (four-mode cells), axis-aligned rectangles and rotated
//! rectangles (2x2 cells).
//!
//! The fundamental object is the per-mask area: the measure of the set of
//! points covered by exactly a given subset of the mode-translated copies of
//! the region. Entropy assembly only ever needs those. The conventional
//! three "classes" are reported on top of them:
//!
//! * class 0 — single-mode regions, plus three-mode regions (which carry the
//!   same entropy by purity of the four-mode multiplet);
//! * class 1 — the two-mode regions whose modes differ along the first cell
//!   axis (1D: the two outer velocity-adjacent pairs);
//! * class 2 — the pair differing along the second axis (1D: the inner
//!   velocity-adjacent pair).

use crate::entropy::ModeMask;
use crate::error::{Error, Result};
use crate::lattice::{kshifts, Momentum, QuenchConfig};
use crate::qp::rotated::rect_mask_areas;
use crate::qp::sweep::interval_cover;

/// Relative tolerance below which two mode velocities count as degenerate.
const DEGENERACY_EPS: f64 = 1e-12;

/// Per-mask coverage areas at one momentum and time, with the conventional
/// class grouping and the natural time/length scales.
#[derive(Clone, Debug)]
pub struct AreaBreakdown {
    n_modes: usize,
    mask_areas: Vec<f64>,
    classes: [Vec<ModeMask>; 3],
    /// Times at which the coverage structure changes qualitatively
    /// (1D: pairwise separation times of the velocity-sorted modes, in the
    /// order ab, ac, ad, bc, bd, cd; 2D: per-axis times `l_i / |v-gap_i|`).
    pub natural_times: Vec<f64>,
    /// Current separations (1D: pairwise `|v_i - v_j| t` in the same order;
    /// 2D: the per-axis copy separations X and Y).
    pub separations: Vec<f64>,
}

impl AreaBreakdown {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Area of the exact-coverage set of `mask`.
    pub fn area(&self, mask: ModeMask) -> f64 {
        self.mask_areas[mask.0 as usize]
    }

    /// All per-mask areas, indexed by mask bits.
    pub fn mask_areas(&self) -> &[f64] {
        &self.mask_areas
    }

    /// Masks belonging to class `j` (0, 1 or 2).
    pub fn class_masks(&self, j: usize) -> &[ModeMask] {
        &self.classes[j]
    }

    /// Total area of class `j`.
    pub fn class_area(&self, j: usize) -> f64 {
        self.classes[j].iter().map(|&m| self.area(m)).sum()
    }

    /// The three class areas.
    pub fn class_areas(&self) -> [f64; 3] {
        [self.class_area(0), self.class_area(1), self.class_area(2)]
    }

    /// `sum_M |M| * area(M)`: equals `|nu| * |A|` exactly (every copy has
    /// the region's full measure).
    pub fn total_coverage(&self) -> f64 {
        self.mask_areas
            .iter()
            .enumerate()
            .map(|(bits, &a)| bits.count_ones() as f64 * a)
            .sum()
    }
}

fn check_positive(value: f64, name: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// All masks of a given total mode count whose size is 1 or 3.
fn odd_masks(n: usize) -> Vec<ModeMask> {
    (1u16..(1 << n))
        .map(ModeMask)
        .filter(|m| m.count() == 1 || m.count() == 3)
        .collect()
}

/// Translation offsets (per unit time) of the multiplet modes:
/// `u_s = 2J sin(p + k_s)` componentwise.
pub(crate) fn mode_offsets(cfg: &QuenchConfig, p: &Momentum) -> Vec<Vec<f64>> {
    kshifts(cfg)
        .iter()
        .map(|k| {
            p.components()
                .iter()
                .zip(k.components())
                .map(|(pa, ka)| 2.0 * cfg.hopping() * (pa + ka).sin())
                .collect()
        })
        .collect()
}

/// Coverage areas for a length-`l` interval and a four-mode 1D cell.
pub fn areas_1d_nu4(cfg: &QuenchConfig, l: f64, p: &Momentum, t: f64) -> Result<AreaBreakdown> {
    if cfg.dim() != 1 || cfg.nu() != [4] {
        return Err(Error::InvalidConfig(format!(
            "interval areas need a 1D four-mode cell, got nu = {:?}",
            cfg.nu()
        )));
    }
    check_positive(l, "interval length")?;
    check_time(t)?;
    let offsets = mode_offsets(cfg, p);
    let u: Vec<f64> = offsets.iter().map(|o| o[0]).collect();
    // Velocity order: group velocity is -u, so ascending u = descending v.
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| u[i].partial_cmp(&u[j]).unwrap());
    let v_sorted: Vec<f64> = order.iter().map(|&i| -u[i]).collect();
    let scale = 2.0 * cfg.hopping();
    for w in v_sorted.windows(2) {
        if (w[0] - w[1]).abs() <= DEGENERACY_EPS * scale {
            return Err(Error::DegenerateVelocities(v_sorted));
        }
    }
    let starts: Vec<f64> = u.iter().map(|&ui| ui * t).collect();
    let mask_areas = interval_cover(&starts, l);
    let classes = [
        odd_masks(4),
        vec![
            ModeMask::from_indices(&[order[0], order[1]]),
            ModeMask::from_indices(&[order[2], order[3]]),
        ],
        vec![ModeMask::from_indices(&[order[1], order[2]])],
    ];
    let mut natural_times = Vec::with_capacity(6);
    let mut separations = Vec::with_capacity(6);
    for i in 0..4 {
        for j in (i + 1)..4 {
            let gap = (v_sorted[i] - v_sorted[j]).abs();
            natural_times.push(l / gap);
            separations.push(gap * t);
        }
    }
    Ok(AreaBreakdown { n_modes: 4, mask_areas, classes, natural_times, separations })
}

fn require_2x2(cfg: &QuenchConfig) -> Result<()> {
    if cfg.dim() != 2 || cfg.nu() != [2, 2] {
        return Err(Error::InvalidConfig(format!(
            "rectangle areas need a 2D 2x2 cell, got nu = {:?}",
            cfg.nu()
        )));
    }
    Ok(())
}

fn rect_classes() -> [Vec<ModeMask>; 3] {
    [
        odd_masks(4),
        // pairs differing along x (mode flat index = kx * 2 + ky)
        vec![ModeMask::from_indices(&[0, 2]), ModeMask::from_indices(&[1, 3])],
        // pairs differing along y
        vec![ModeMask::from_indices(&[0, 1]), ModeMask::from_indices(&[2, 3])],
    ]
}

fn check_axis_degeneracy(cfg: &QuenchConfig, offsets: &[Vec<f64>]) -> Result<()> {
    let scale = 2.0 * cfg.hopping();
    // modes 0..3 have offsets (±sx, ±sy); the x groups degenerate when
    // offsets 0 and 2 coincide in x, the y groups when 0 and 1 do in y.
    if (offsets[0][0] - offsets[2][0]).abs() <= DEGENERACY_EPS * scale
        || (offsets[0][1] - offsets[1][1]).abs() <= DEGENERACY_EPS * scale
    {
        let vs = offsets.iter().flat_map(|o| o.iter().map(|&x| -x)).collect();
        return Err(Error::DegenerateVelocities(vs));
    }
    Ok(())
}

/// Coverage areas for an axis-aligned `lx x ly` rectangle and a 2x2 cell.
/// The per-axis coverage factorizes, so this is exact for every momentum.
pub fn areas_2d_rect(
    cfg: &QuenchConfig,
    lx: f64,
    ly: f64,
    p: &Momentum,
    t: f64,
) -> Result<AreaBreakdown> {
    require_2x2(cfg)?;
    check_positive(lx, "lx")?;
    check_positive(ly, "ly")?;
    check_time(t)?;
    let offsets = mode_offsets(cfg, p);
    check_axis_degeneracy(cfg, &offsets)?;
    // per-axis coverage of the two velocity groups
    let lens_x = interval_cover(&[offsets[0][0] * t, offsets[2][0] * t], lx);
    let lens_y = interval_cover(&[offsets[0][1] * t, offsets[1][1] * t], ly);
    let mut mask_areas = vec![0.0; 16];
    for mx in 1..4usize {
        for my in 1..4usize {
            let mut bits = 0u16;
            for kx in 0..2 {
                for ky in 0..2 {
                    if mx >> kx & 1 == 1 && my >> ky & 1 == 1 {
                        bits |= 1 << (kx * 2 + ky);
                    }
                }
            }
            mask_areas[bits as usize] = lens_x[mx] * lens_y[my];
        }
    }
    let gap_x = (offsets[0][0] - offsets[2][0]).abs();
    let gap_y = (offsets[0][1] - offsets[1][1]).abs();
    Ok(AreaBreakdown {
        n_modes: 4,
        mask_areas,
        classes: rect_classes(),
        natural_times: vec![lx / gap_x, ly / gap_y],
        separations: vec![gap_x * t, gap_y * t],
    })
}

/// Coverage areas for a rotated rectangle and a 2x2 cell, computed exactly
/// by rectangle-frame products ([`rect_mask_areas`]). Valid for any
/// rotation angle and translation pattern; two-mode regions whose modes
/// differ along both axes (possible only at nonzero rotation) are reported
/// in the per-mask areas but belong to no class.
pub fn areas_2d_rect_rotated(
    cfg: &QuenchConfig,
    lx: f64,
    ly: f64,
    theta: f64,
    p: &Momentum,
    t: f64,
) -> Result<AreaBreakdown> {
    require_2x2(cfg)?;
    check_positive(lx, "lx")?;
    check_positive(ly, "ly")?;
    check_time(t)?;
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be finite, got {theta}")));
    }
    let offsets = mode_offsets(cfg, p);
    check_axis_degeneracy(cfg, &offsets)?;
    let translations: Vec<[f64; 2]> =
        offsets.iter().map(|o| [o[0] * t, o[1] * t]).collect();
    let mask_areas = rect_mask_areas(lx, ly, theta, &translations);
    let gap_x = (offsets[0][0] - offsets[2][0]).abs();
    let gap_y = (offsets[0][1] - offsets[1][1]).abs();
    Ok(AreaBreakdown {
        n_modes: 4,
        mask_areas,
        classes: rect_classes(),
        natural_times: vec![lx / gap_x, ly / gap_y],
        separations: vec![gap_x * t, gap_y * t],
    })
}
