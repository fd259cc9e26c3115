//! Cross-engine agreement: the exact correlation-matrix numerics must
//! converge to the ballistic (quasiparticle) prediction as the region grows,
//! plateau at the stationary density at late times, and the Monte Carlo
//! engine must agree with a deterministic polygon-clipping quadrature on a
//! region no closed-form engine handles.

use num_complex::Complex64;

use quenchlat_core::entropy::{all_bipartition_entropies, stationary_entropy_density};
use quenchlat_core::exact::{exact_entropy_curve, ExactBackend};
use quenchlat_core::exec::ExecMode;
use quenchlat_core::lattice::{kshifts, QuenchConfig, ReducedGrid};
use quenchlat_core::mc::{qp_entropy_mc, McConfig};
use quenchlat_core::qp::clip::exact_mask_areas;
use quenchlat_core::qp::{qp_entropy_analytic, QpGeometry};
use quenchlat_core::region::Region;
use quenchlat_core::state::{cell_green, multiplet_correlation, CellState, CellTerm};

mod common;
use common::{clipping_quadrature_density, phi_state};

fn mode() -> ExecMode {
    ExecMode::default()
}

fn cfg_1d() -> QuenchConfig {
    QuenchConfig::with_unit_hopping(vec![4]).unwrap()
}

fn cfg_2d() -> QuenchConfig {
    QuenchConfig::with_unit_hopping(vec![2, 2]).unwrap()
}

/// Max |exact - ballistic| over a shared rescaled-time grid for a 1D
/// interval of `l` sites in the thermodynamic limit.
fn interval_max_gap(l: usize, zetas: &[f64]) -> f64 {
    let cfg = cfg_1d();
    let state = CellState::classical(vec![4], vec![0, 1]).unwrap();
    let region = Region::interval(l as f64).unwrap();
    let times: Vec<f64> = zetas.iter().map(|z| z * l as f64 / 4.0).collect();

    let backend = ExactBackend::Thermo { grid: ReducedGrid::isotropic(&cfg, 10_000).unwrap() };
    let exact = exact_entropy_curve(&cfg, &state, &region, &times, &backend, mode()).unwrap();

    let geometry = QpGeometry::Interval { l: l as f64 };
    let grid = ReducedGrid::isotropic(&cfg, 10_000).unwrap();
    let qp = qp_entropy_analytic(&cfg, &state, &geometry, &grid, &times, mode()).unwrap();

    exact
        .points
        .iter()
        .zip(&qp.points)
        .map(|(e, q)| (e.density - q.density).abs())
        .fold(0.0, f64::max)
}

/// The ballistic prediction is the leading term of a large-region expansion:
/// doubling the interval must shrink the worst-case gap to the exact curve.
#[test]
fn interval_gap_to_ballistic_prediction_shrinks_with_size() {
    let zetas: Vec<f64> = (1..=10).map(|i| i as f64 * 0.25).collect();
    let gap10 = interval_max_gap(10, &zetas);
    let gap20 = interval_max_gap(20, &zetas);
    println!("interval max gaps: l=10 -> {gap10:.5}, l=20 -> {gap20:.5}");
    assert!(
        gap20 < gap10,
        "gap should shrink with interval size: l=10 {gap10}, l=20 {gap20}"
    );
    assert!(gap10 < 0.08, "l=10 gap unexpectedly large: {gap10}");
    assert!(gap20 < 0.04, "l=20 gap unexpectedly large: {gap20}");
}

/// At late times a large interval's entropy density must level off at the
/// stationary density computed directly from the mode occupations.
#[test]
fn interval_plateaus_at_the_stationary_density() {
    let cfg = cfg_1d();
    let state = CellState::classical(vec![4], vec![0, 1]).unwrap();
    let green = cell_green(&state).unwrap();
    let s_stat =
        stationary_entropy_density(&cfg, &green, &ReducedGrid::isotropic(&cfg, 4096).unwrap())
            .unwrap();

    let l = 40usize;
    let region = Region::interval(l as f64).unwrap();
    let times: Vec<f64> = [12.0, 14.0, 16.0].iter().map(|z| z * l as f64 / 4.0).collect();
    let backend = ExactBackend::Thermo { grid: ReducedGrid::isotropic(&cfg, 10_000).unwrap() };
    let exact = exact_entropy_curve(&cfg, &state, &region, &times, &backend, mode()).unwrap();

    for point in &exact.points {
        let rel = (point.density / s_stat - 1.0).abs();
        println!(
            "zeta {:>5.1}: density {:.6} vs stationary {s_stat:.6} (rel dev {rel:.4})",
            point.zeta, point.density
        );
        assert!(rel < 0.05, "plateau off stationary by {rel} at zeta {}", point.zeta);
    }
}

/// Max |exact - ballistic| for an `l x l` square of a periodic `L x L`
/// lattice prepared in the superposition state.
fn square_max_gap(l: usize, lattice: usize, zetas: &[f64], alpha: f64) -> f64 {
    let cfg = cfg_2d();
    let state = phi_state(alpha);
    let region = Region::rectangle(l as f64, l as f64).unwrap();
    let times: Vec<f64> = zetas.iter().map(|z| z * l as f64 / 4.0).collect();

    let backend = ExactBackend::Finite { lattice: vec![lattice, lattice] };
    let exact = exact_entropy_curve(&cfg, &state, &region, &times, &backend, mode()).unwrap();

    let geometry = QpGeometry::Rectangle { lx: l as f64, ly: l as f64 };
    let grid = ReducedGrid::isotropic(&cfg, 160).unwrap();
    let qp = qp_entropy_analytic(&cfg, &state, &geometry, &grid, &times, mode()).unwrap();

    exact
        .points
        .iter()
        .zip(&qp.points)
        .map(|(e, q)| (e.density - q.density).abs())
        .fold(0.0, f64::max)
}

/// Same convergence statement in 2D, for a superposition state on a finite
/// periodic lattice large enough that no wrap-around front reaches the
/// square within the simulated window.
#[test]
fn square_gap_to_ballistic_prediction_shrinks_with_size() {
    let zetas = [0.4, 0.8, 1.2, 1.6, 2.0];
    let gap10 = square_max_gap(10, 64, &zetas, 0.5);
    let gap20 = square_max_gap(20, 64, &zetas, 0.5);
    println!("square max gaps: l=10 -> {gap10:.5}, l=20 -> {gap20:.5}");
    assert!(
        gap20 < gap10,
        "gap should shrink with square size: l=10 {gap10}, l=20 {gap20}"
    );
    assert!(gap10 < 0.08, "l=10 gap unexpectedly large: {gap10}");
    assert!(gap20 < 0.04, "l=20 gap unexpectedly large: {gap20}");
}

/// Classical 2D check against the thermodynamic-limit kernel: the diagonal
/// configuration on a moderate square already sits close to the ballistic
/// curve at representative early/mid/late rescaled times.
#[test]
fn thermo_square_agrees_with_ballistic_prediction_for_classical_state() {
    let cfg = cfg_2d();
    let state = CellState::classical(vec![2, 2], vec![0, 3]).unwrap();
    let l = 12usize;
    let region = Region::rectangle(l as f64, l as f64).unwrap();
    let zetas = [0.5, 1.0, 2.0];
    let times: Vec<f64> = zetas.iter().map(|z| z * l as f64 / 4.0).collect();

    let backend = ExactBackend::Thermo { grid: ReducedGrid::isotropic(&cfg, 250).unwrap() };
    let exact = exact_entropy_curve(&cfg, &state, &region, &times, &backend, mode()).unwrap();

    let geometry = QpGeometry::Rectangle { lx: l as f64, ly: l as f64 };
    let grid = ReducedGrid::isotropic(&cfg, 250).unwrap();
    let qp = qp_entropy_analytic(&cfg, &state, &geometry, &grid, &times, mode()).unwrap();

    for (e, q) in exact.points.iter().zip(&qp.points) {
        let gap = (e.density - q.density).abs();
        println!("zeta {:>4.1}: exact {:.6} vs ballistic {:.6} (gap {gap:.5})", e.zeta, e.density, q.density);
        assert!(gap < 0.05, "gap {gap} at zeta {}", e.zeta);
    }
}

/// On a pentagon — outside every closed-form geometry — the Monte Carlo
/// engine must match a deterministic quadrature built from exact
/// polygon-clipping overlap areas.
#[test]
fn mc_agrees_with_clipping_quadrature_on_a_pentagon() {
    let cfg = cfg_2d();
    let state = phi_state(0.5);
    let region = Region::regular_polygon(5, 1.3).unwrap();
    assert!(region.is_convex());

    for &t in &[0.3, 0.6] {
        let reference = clipping_quadrature_density(&cfg, &state, &region, t, 64);
        let mc = McConfig::new(300_000, 0x5eed_cafe).unwrap();
        let est = qp_entropy_mc(&cfg, &state, &region, t, &mc, mode()).unwrap();
        let pull = (est.mean - reference).abs() / est.stderr;
        println!(
            "t {t}: quadrature {reference:.6}, mc {:.6} +- {:.6} (pull {pull:.2})",
            est.mean, est.stderr
        );
        assert!(
            pull < 4.0,
            "Monte Carlo {} +- {} vs quadrature {reference} (pull {pull})",
            est.mean,
            est.stderr
        );
    }
}
