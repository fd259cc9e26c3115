//! Entanglement entropy of free-fermion correlation data.
//!
//! All entropies are von Neumann entropies in nats. For a fermionic Gaussian
//! state restricted to a set of modes, the entropy is the sum of binary
//! entropies of the eigenvalues of the restricted correlation matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{QuenchConfig, ReducedGrid};
use crate::state::{multiplet_occupations, CellGreen, MultipletCorrelation};

/// Eigenvalues of a correlation matrix may stray this far outside `[0, 1]`
/// before we refuse to interpret them as occupations.
pub const OCCUPATION_TOL: f64 = 1e-8;

/// Minimum reduced-grid subdivisions per dimension accepted by
/// [`stationary_entropy_density`].
pub const STATIONARY_MIN_SUBDIVISIONS: usize = 64;

/// Binary (two-outcome) entropy `h(x) = -x ln x - (1-x) ln(1-x)`, with the
/// continuous-extension convention `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let mut s = 0.0;
    if x > 0.0 {
        s -= x * x.ln();
    }
    let y = 1.0 - x;
    if y > 0.0 {
        s -= y * y.ln();
    }
    s
}

/// Entropy of a Hermitian correlation (sub)matrix: `sum_i h(lambda_i)`.
///
/// Errors with [`Error::NotACorrelationMatrix`] if any eigenvalue falls
/// outside `[-OCCUPATION_TOL, 1 + OCCUPATION_TOL]`; eigenvalues inside the
/// window are clamped to `[0, 1]` before evaluating `h`.
pub fn fermi_entropy(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let eig = m.clone().symmetric_eigen();
    let mut s = 0.0;
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -OCCUPATION_TOL || lambda > 1.0 + OCCUPATION_TOL {
            return Err(Error::NotACorrelationMatrix {
                eigenvalue: lambda,
                lo: -OCCUPATION_TOL,
                hi: 1.0 + OCCUPATION_TOL,
            });
        }
        s += binary_entropy(lambda.clamp(0.0, 1.0));
    }
    Ok(s)
}

/// A subset of the `|nu|` multiplet modes, as a bitmask over flat mode
/// indices.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeMask(pub u16);

impl ModeMask {
    pub const EMPTY: ModeMask = ModeMask(0);

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut bits = 0u16;
        for &i in indices {
            debug_assert!(i < 16);
            bits |= 1 << i;
        }
        ModeMask(bits)
    }

    /// Mask containing all of the first `total` modes.
    pub fn all(total: usize) -> Self {
        debug_assert!(total <= 16);
        ModeMask(((1u32 << total) - 1) as u16)
    }

    pub fn indices(self) -> Vec<usize> {
        (0..16).filter(|&i| self.contains(i)).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, total: usize) -> Self {
        ModeMask(!self.0 & Self::all(total).0)
    }

    pub fn union(self, other: ModeMask) -> Self {
        ModeMask(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: ModeMask) -> bool {
        self.0 & !other.0 == 0
    }
}

/// Entropy of the multiplet restricted to the modes in `mask`.
///
/// The empty mask and the full mask give exactly zero: a pure multiplet has
/// no entanglement with an empty complement.
pub fn bipartition_entropy(corr: &MultipletCorrelation, mask: ModeMask) -> Result<f64> {
    let total = corr.len();
    if mask.is_empty() || mask == ModeMask::all(total) {
        return Ok(0.0);
    }
    let indices = mask.indices();
    if let Some(&bad) = indices.iter().find(|&&i| i >= total) {
        return Err(Error::InvalidMask(format!(
            "mode index {bad} outside multiplet of {total} modes"
        )));
    }
    fermi_entropy(&corr.submatrix(&indices))
}

/// Entropies of every one of the `2^|nu|` mode subsets, indexed by mask bits.
/// This is the per-momentum table the quasiparticle engines weight by areas.
pub fn all_bipartition_entropies(corr: &MultipletCorrelation) -> Result<Vec<f64>> {
    let total = corr.len();
    (0..1u32 << total)
        .map(|bits| bipartition_entropy(corr, ModeMask(bits as u16)))
        .collect()
}

/// Late-time (dephased) entropy density per site: the average of
/// `h(n(k))` over the full Brillouin zone, evaluated on a reduced-zone grid.
///
/// Requires at least [`STATIONARY_MIN_SUBDIVISIONS`] grid subdivisions per
/// dimension so the quadrature error is negligible at the accuracies used
/// elsewhere.
pub fn stationary_entropy_density(
    cfg: &QuenchConfig,
    green: &CellGreen,
    grid: &ReducedGrid,
) -> Result<f64> {
    if let Some(&m) = grid.subdivisions().iter().find(|&&m| m < STATIONARY_MIN_SUBDIVISIONS) {
        return Err(Error::InvalidConfig(format!(
            "stationary density needs >= {STATIONARY_MIN_SUBDIVISIONS} subdivisions per \
             dimension, got {m}"
        )));
    }
    let mut acc = 0.0;
    for (p, w) in grid.iter() {
        let occ = multiplet_occupations(cfg, green, &p)?;
        let cell: f64 = occ.iter().map(|&n| binary_entropy(n.clamp(0.0, 1.0))).sum();
        // Summing h over the |nu| modes at weight w (with sum w = 1/|nu|)
        // is exactly the full-zone average of h(n(k)), i.e. the per-site
        // density.
        acc += w * cell;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{cell_green, CellState};
    use approx::assert_abs_diff_eq;

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5), (2.0f64).ln(), epsilon = 1e-15);
        let quarter = 2.0 * (2.0f64).ln() - 0.75 * (3.0f64).ln();
        assert_abs_diff_eq!(binary_entropy(0.25), quarter, epsilon = 1e-15);
    }

    #[test]
    fn fermi_entropy_of_diagonal() {
        let m = DMatrix::from_diagonal_element(2, 2, Complex64::new(0.5, 0.0));
        assert_abs_diff_eq!(fermi_entropy(&m).unwrap(), 2.0 * (2.0f64).ln(), epsilon = 1e-12);
        let id = DMatrix::from_diagonal_element(3, 3, Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(fermi_entropy(&id).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fermi_entropy_rejects_bad_eigenvalues() {
        let m = DMatrix::from_diagonal_element(1, 1, Complex64::new(1.5, 0.0));
        assert!(matches!(fermi_entropy(&m), Err(Error::NotACorrelationMatrix { .. })));
        let m = DMatrix::from_diagonal_element(1, 1, Complex64::new(-0.1, 0.0));
        assert!(fermi_entropy(&m).is_err());
    }

    #[test]
    fn mask_helpers() {
        let m = ModeMask::from_indices(&[0, 2]);
        assert_eq!(m.count(), 2);
        assert!(m.contains(0) && !m.contains(1) && m.contains(2));
        assert_eq!(m.complement(4), ModeMask::from_indices(&[1, 3]));
        assert_eq!(m.indices(), vec![0, 2]);
        assert!(m.is_subset_of(ModeMask::all(4)));
        assert!(!ModeMask::all(4).is_subset_of(m));
    }

    #[test]
    fn bipartition_short_circuits() {
        use crate::lattice::{Momentum, QuenchConfig};
        use crate::state::multiplet_correlation;
        let cfg = QuenchConfig::with_unit_hopping(vec![4]).unwrap();
        let s = CellState::classical(vec![4], vec![0, 1]).unwrap();
        let g = cell_green(&s).unwrap();
        let c = multiplet_correlation(&cfg, &g, &Momentum::new(vec![0.4])).unwrap();
        assert_eq!(bipartition_entropy(&c, ModeMask::EMPTY).unwrap(), 0.0);
        assert_eq!(bipartition_entropy(&c, ModeMask::all(4)).unwrap(), 0.0);
        // complementarity: s(M) = s(complement M) for a pure multiplet
        let table = all_bipartition_entropies(&c).unwrap();
        for bits in 0..16u16 {
            let m = ModeMask(bits);
            assert_abs_diff_eq!(
                table[bits as usize],
                table[m.complement(4).0 as usize],
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn stationary_density_classical_is_flat_filling() {
        // A single-determinant cell state carries no inter-site coherence, so
        // n(k) = N/|nu| for every k and the dephased density is exactly
        // h(filling); the quadrature introduces no error on a constant.
        use crate::lattice::ReducedGrid;
        let cfg = QuenchConfig::with_unit_hopping(vec![4]).unwrap();
        let s = CellState::classical(vec![4], vec![0, 2]).unwrap();
        let g = cell_green(&s).unwrap();
        let grid = ReducedGrid::isotropic(&cfg, 64).unwrap();
        let got = stationary_entropy_density(&cfg, &g, &grid).unwrap();
        assert_abs_diff_eq!(got, (2.0f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn stationary_density_superposition() {
        // (|{0,1}> + a|{0,2}>)/sqrt(1+a^2) has the 1<->2 coherence a/(1+a^2),
        // so n(q) = 1/2 + a/(2(1+a^2)) cos q — smooth, hence the midpoint
        // grid converges spectrally. Compare against a fine direct sum.
        use crate::lattice::ReducedGrid;
        use crate::state::CellTerm;
        use num_complex::Complex64;
        let a = 0.5;
        let cfg = QuenchConfig::with_unit_hopping(vec![4]).unwrap();
        let s = CellState::new(
            vec![4],
            vec![
                CellTerm { amp: Complex64::new(1.0, 0.0), sites: vec![0, 1] },
                CellTerm { amp: Complex64::new(a, 0.0), sites: vec![0, 2] },
            ],
        )
        .unwrap();
        let g = cell_green(&s).unwrap();
        let grid = ReducedGrid::isotropic(&cfg, 64).unwrap();
        let got = stationary_entropy_density(&cfg, &g, &grid).unwrap();
        let coherence = 0.5 * a / (1.0 + a * a);
        let m = 1 << 16;
        let mut expect = 0.0;
        for i in 0..m {
            let q = (i as f64 + 0.5) / m as f64 * std::f64::consts::TAU;
            let n = 0.5 + coherence * q.cos();
            expect += binary_entropy(n.clamp(0.0, 1.0)) / m as f64;
        }
        assert_abs_diff_eq!(got, expect, epsilon = 1e-10);
    }

    #[test]
    fn stationary_density_rejects_coarse_grids() {
        use crate::lattice::ReducedGrid;
        let cfg = QuenchConfig::with_unit_hopping(vec![4]).unwrap();
        let s = CellState::classical(vec![4], vec![0, 1]).unwrap();
        let g = cell_green(&s).unwrap();
        let grid = ReducedGrid::isotropic(&cfg, 8).unwrap();
        assert!(stationary_entropy_density(&cfg, &g, &grid).is_err());
    }
}
