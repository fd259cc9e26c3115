//! Helpers shared by the integration-test binaries (each test file is its
//! own crate and pulls these in via `mod common;`).
#![allow(dead_code)] // each test binary uses a subset

use num_complex::Complex64;

use quenchlat_core::entropy::all_bipartition_entropies;
use quenchlat_core::lattice::{kshifts, QuenchConfig, ReducedGrid};
use quenchlat_core::qp::clip::exact_mask_areas;
use quenchlat_core::region::Region;
use quenchlat_core::state::{cell_green, multiplet_correlation, CellState, CellTerm};

/// Canonical 2x2 superposition: left column + alpha * main diagonal.
pub fn phi_state(alpha: f64) -> CellState {
    CellState::new(
        vec![2, 2],
        vec![
            CellTerm { amp: Complex64::new(1.0, 0.0), sites: vec![0, 2] },
            CellTerm { amp: Complex64::new(alpha, 0.0), sites: vec![0, 3] },
        ],
    )
    .unwrap()
}

/// Deterministic reference for arbitrary convex regions: reduced-zone
/// midpoint quadrature with exact polygon-clipping mask areas.
pub fn clipping_quadrature_density(
    cfg: &QuenchConfig,
    state: &CellState,
    region: &Region,
    t: f64,
    subdivisions: usize,
) -> f64 {
    let green = cell_green(state).unwrap();
    let grid = ReducedGrid::isotropic(cfg, subdivisions).unwrap();
    let shifts = kshifts(cfg);
    let base = region.world_vertices();
    let two_j = 2.0 * cfg.hopping();
    let mut total = 0.0;
    for (p, w) in grid.iter() {
        let corr = multiplet_correlation(cfg, &green, &p).unwrap();
        let table = all_bipartition_entropies(&corr).unwrap();
        let translations: Vec<[f64; 2]> = shifts
            .iter()
            .map(|k| {
                let q = p.add(k);
                let c = q.components();
                [two_j * c[0].sin() * t, two_j * c[1].sin() * t]
            })
            .collect();
        let areas = exact_mask_areas(base, &translations);
        total += w * areas.iter().zip(&table).map(|(a, s)| a * s).sum::<f64>();
    }
    total / region.area()
}
