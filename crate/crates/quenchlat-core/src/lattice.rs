//! Lattice conventions: hopping model, dispersion, group velocities,
//! unit-cell mode shifts and reduced-zone quadrature grids.
//!
//! The model is a free-fermion nearest-neighbour hopping Hamiltonian on a
//! hypercubic lattice with spacing 1 and coupling `J`, diagonalized by
//! Fourier transform with dispersion `eps(k) = 2J * sum_i cos(k_i)` and group
//! velocity `v(k) = -2J * (sin k_1, ..., sin k_d)`. Initial states are
//! translation invariant over cells of `nu = (nu_1, ..., nu_d)` sites, which
//! couples the `|nu|` momentum modes `p + k` with `k` in the shift set
//! returned by [`kshifts`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Lattice/quench parameters: dimension `d`, hopping `J`, unit cell `nu`.
///
/// The lattice spacing is fixed to 1. `d = 1, 2` are exercised by the shipped
/// engines; the conventions here are written for general `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuenchConfig {
    d: usize,
    j: f64,
    nu: Vec<usize>,
}

impl QuenchConfig {
    /// Build a configuration, validating `d >= 1`, `J > 0`, `nu_i >= 1` and
    /// `nu.len() == d`.
    pub fn new(d: usize, j: f64, nu: Vec<usize>) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidConfig("dimension must be >= 1".into()));
        }
        if nu.len() != d {
            return Err(Error::InvalidConfig(format!(
                "cell extents {nu:?} do not match dimension {d}"
            )));
        }
        if !(j > 0.0) || !j.is_finite() {
            return Err(Error::InvalidConfig(format!("hopping J = {j} must be positive")));
        }
        if nu.iter().any(|&n| n == 0) {
            return Err(Error::InvalidConfig(format!("cell extents {nu:?} must all be >= 1")));
        }
        Ok(Self { d, j, nu })
    }

    /// Configuration with the conventional coupling `J = 1`.
    pub fn with_unit_hopping(nu: Vec<usize>) -> Result<Self> {
        let d = nu.len();
        Self::new(d, 1.0, nu)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn hopping(&self) -> f64 {
        self.j
    }

    pub fn nu(&self) -> &[usize] {
        &self.nu
    }

    /// Number of sites per cell, `|nu| = nu_1 * ... * nu_d`.
    pub fn nu_total(&self) -> usize {
        self.nu.iter().product()
    }

    /// Per-axis maximum group speed, `v_max = 2J`.
    ///
    /// This is the speed governing the rescaled time `zeta = 2 v_max t /
    /// |A|^(1/d)`: the light-cone kinks of rectangular regions sit at
    /// per-axis saturation, not at the diagonal speed `2J sqrt(d)`.
    pub fn v_max(&self) -> f64 {
        2.0 * self.j
    }

    /// Reduced-zone width per axis, `2 pi / nu_i`.
    pub fn reduced_widths(&self) -> Vec<f64> {
        self.nu.iter().map(|&n| TWO_PI / n as f64).collect()
    }
}

/// A quasi-momentum in the Brillouin zone, components reduced to `[0, 2 pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Momentum(Vec<f64>);

impl Momentum {
    /// Reduce each component modulo `2 pi` into `[0, 2 pi)`.
    pub fn new(components: impl Into<Vec<f64>>) -> Self {
        let mut k = components.into();
        for c in &mut k {
            *c = reduce_mod(*c, TWO_PI);
        }
        Momentum(k)
    }

    /// Components without reduction; caller guarantees they are in range.
    pub(crate) fn from_reduced(components: Vec<f64>) -> Self {
        Momentum(components)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Componentwise sum, reduced back into `[0, 2 pi)`.
    pub fn add(&self, other: &Momentum) -> Momentum {
        Momentum::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect::<Vec<_>>(),
        )
    }
}

/// Reduce `x` into `[0, m)`.
fn reduce_mod(x: f64, m: f64) -> f64 {
    let r = x.rem_euclid(m);
    // rem_euclid may return exactly `m` when `x` is a tiny negative number.
    if r >= m {
        r - m
    } else {
        r
    }
}

/// Dispersion relation `eps(k) = 2J * sum_i cos(k_i)`; `|eps| <= 2 J d`.
pub fn dispersion(cfg: &QuenchConfig, k: &Momentum) -> f64 {
    2.0 * cfg.hopping() * k.components().iter().map(|&c| c.cos()).sum::<f64>()
}

/// Group velocity `v(k) = grad eps = -2J * (sin k_1, ..., sin k_d)`.
pub fn group_velocity(cfg: &QuenchConfig, k: &Momentum) -> Vec<f64> {
    k.components()
        .iter()
        .map(|&c| -2.0 * cfg.hopping() * c.sin())
        .collect()
}

/// The `|nu|` momentum shifts `(2 pi n_1 / nu_1, ..., 2 pi n_d / nu_d)` with
/// `0 <= n_i < nu_i`, in lexicographic order of `(n_1, ..., n_d)` (last axis
/// varies fastest). This order is the canonical mode indexing shared by the
/// multiplet correlation matrix, bipartition masks and Monte Carlo mode
/// selection.
pub fn kshifts(cfg: &QuenchConfig) -> Vec<Momentum> {
    shift_integers(cfg.nu())
        .into_iter()
        .map(|n| {
            Momentum::from_reduced(
                n.iter()
                    .zip(cfg.nu())
                    .map(|(&ni, &nui)| TWO_PI * ni as f64 / nui as f64)
                    .collect(),
            )
        })
        .collect()
}

/// Shift integer vectors `(n_1, ..., n_d)` in the same canonical order as
/// [`kshifts`].
pub fn shift_integers(nu: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = nu.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut n = vec![0usize; nu.len()];
    for _ in 0..total {
        out.push(n.clone());
        // increment with the last axis fastest
        for axis in (0..nu.len()).rev() {
            n[axis] += 1;
            if n[axis] < nu[axis] {
                break;
            }
            n[axis] = 0;
        }
    }
    out
}

/// Uniform midpoint grid over the reduced zone
/// `[0, 2 pi / nu_1) x ... x [0, 2 pi / nu_d)`.
///
/// Every point carries the same weight `prod_i (2 pi / nu_i) / M_i / (2 pi)^d
/// = prod_i 1 / (nu_i M_i)`, so the weights sum to `1 / |nu|` — the measure
/// `dp / (2 pi)^d` of the reduced zone. Midpoints never hit `sin k_i = 0`
/// degeneracies, so coinciding-velocity configurations are never sampled.
#[derive(Clone, Debug)]
pub struct ReducedGrid {
    m: Vec<usize>,
    /// reduced-zone width per axis
    widths: Vec<f64>,
    weight: f64,
}

impl ReducedGrid {
    /// `m` holds the per-axis subdivision counts (all `>= 1`).
    pub fn new(cfg: &QuenchConfig, m: Vec<usize>) -> Result<Self> {
        if m.len() != cfg.dim() {
            return Err(Error::InvalidConfig(format!(
                "grid subdivisions {m:?} do not match dimension {}",
                cfg.dim()
            )));
        }
        if m.iter().any(|&mi| mi == 0) {
            return Err(Error::InvalidConfig("grid subdivisions must be >= 1".into()));
        }
        let widths = cfg.reduced_widths();
        let weight = m
            .iter()
            .zip(cfg.nu())
            .map(|(&mi, &nui)| 1.0 / (mi as f64 * nui as f64))
            .product();
        Ok(Self { m, widths, weight })
    }

    /// Convenience: the same subdivision count on every axis.
    pub fn isotropic(cfg: &QuenchConfig, m_per_axis: usize) -> Result<Self> {
        Self::new(cfg, vec![m_per_axis; cfg.dim()])
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn subdivisions(&self) -> &[usize] {
        &self.m
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.m.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Weight shared by every grid point; weights sum to `1 / |nu|`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// The `flat`-th midpoint, with the last axis varying fastest (same
    /// canonical order as [`kshifts`]).
    pub fn point(&self, flat: usize) -> Momentum {
        debug_assert!(flat < self.len());
        let mut rem = flat;
        let d = self.m.len();
        let mut comps = vec![0.0; d];
        for axis in (0..d).rev() {
            let idx = rem % self.m[axis];
            rem /= self.m[axis];
            comps[axis] = (idx as f64 + 0.5) * self.widths[axis] / self.m[axis] as f64;
        }
        Momentum::from_reduced(comps)
    }

    /// Iterate `(point, weight)` in flat order.
    pub fn iter(&self) -> impl Iterator<Item = (Momentum, f64)> + '_ {
        (0..self.len()).map(move |i| (self.point(i), self.weight))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg1d() -> QuenchConfig {
        QuenchConfig::new(1, 1.0, vec![4]).unwrap()
    }

    fn cfg2d() -> QuenchConfig {
        QuenchConfig::new(2, 1.0, vec![2, 2]).unwrap()
    }

    #[test]
    fn dispersion_reference_values() {
        let c2 = cfg2d();
        assert_relative_eq!(
            dispersion(&c2, &Momentum::new(vec![0.0, 0.0])),
            4.0,
            max_relative = 1e-15
        );
        assert!(dispersion(&c2, &Momentum::new(vec![PI / 2.0, PI / 2.0])).abs() < 1e-15);
        let c1 = cfg1d();
        assert_relative_eq!(
            dispersion(&c1, &Momentum::new(vec![PI])),
            -2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn group_velocity_reference_values() {
        let c2 = cfg2d();
        let v0 = group_velocity(&c2, &Momentum::new(vec![0.0, 0.0]));
        assert!(v0.iter().all(|&v| v.abs() < 1e-15));
        let c1 = cfg1d();
        let v = group_velocity(&c1, &Momentum::new(vec![PI / 2.0]));
        assert_relative_eq!(v[0], -2.0, max_relative = 1e-15);
        let v = group_velocity(&c2, &Momentum::new(vec![PI / 2.0, 3.0 * PI / 2.0]));
        assert_relative_eq!(v[0], -2.0, max_relative = 1e-15);
        assert_relative_eq!(v[1], 2.0, max_relative = 1e-15);
    }

    #[test]
    fn kshift_sets() {
        let s1 = kshifts(&cfg1d());
        let expect = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        assert_eq!(s1.len(), 4);
        for (m, e) in s1.iter().zip(expect) {
            assert_relative_eq!(m.components()[0], e, max_relative = 1e-15);
        }
        let s2 = kshifts(&cfg2d());
        let expect2 = [[0.0, 0.0], [0.0, PI], [PI, 0.0], [PI, PI]];
        assert_eq!(s2.len(), 4);
        for (m, e) in s2.iter().zip(expect2) {
            assert_relative_eq!(m.components()[0], e[0], max_relative = 1e-15);
            assert_relative_eq!(m.components()[1], e[1], max_relative = 1e-15);
        }
        let s0 = kshifts(&QuenchConfig::new(1, 1.0, vec![1]).unwrap());
        assert_eq!(s0.len(), 1);
        assert_eq!(s0[0].components()[0], 0.0);
    }

    #[test]
    fn grid_weights_sum_to_inverse_cell_size() {
        let g = ReducedGrid::new(&cfg2d(), vec![7, 11]).unwrap();
        let total: f64 = g.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(total, 0.25, epsilon = 1e-12);
        // all points strictly inside the reduced zone
        for (p, _) in g.iter() {
            for (c, w) in p.components().iter().zip(&g.widths) {
                assert!(*c > 0.0 && *c < *w);
            }
        }
    }

    #[test]
    fn momentum_reduction() {
        let m = Momentum::new(vec![-0.1, 7.0]);
        assert!(m.components()[0] > 0.0 && m.components()[0] < TWO_PI);
        assert!(m.components()[1] > 0.0 && m.components()[1] < TWO_PI);
        assert_relative_eq!(m.components()[0], TWO_PI - 0.1, epsilon = 1e-12);
        assert_relative_eq!(m.components()[1], 7.0 - TWO_PI, epsilon = 1e-12);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(QuenchConfig::new(0, 1.0, vec![]).is_err());
        assert!(QuenchConfig::new(1, 0.0, vec![4]).is_err());
        assert!(QuenchConfig::new(1, 1.0, vec![0]).is_err());
        assert!(QuenchConfig::new(2, 1.0, vec![2]).is_err());
        let cfg = cfg2d();
        assert!(ReducedGrid::new(&cfg, vec![10]).is_err());
        assert!(ReducedGrid::new(&cfg, vec![10, 0]).is_err());
    }
}
