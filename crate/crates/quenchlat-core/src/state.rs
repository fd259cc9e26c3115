//! Cell-periodic initial states and their one-body data.
//!
//! A state is specified on a single unit cell of `nu_1 x ... x nu_d` sites
//! and repeated periodically over the lattice. Within the cell, sites are
//! flattened **first axis fastest**: in a `2 x 2` cell, flat indices 0..3 map
//! to coordinates (0,0), (1,0), (0,1), (1,1).
//!
//! From the cell state we build:
//! * the cell Green's function `G[n][m] = <c†_n c_m>` via an exact
//!   Fock-space computation (the cell is small, so this is cheap and serves
//!   as the ground truth for everything downstream), and
//! * the multiplet correlation matrix `C(p)[k][k']` coupling the `|nu|`
//!   momenta `p + k` that mix under cell-periodic translations.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{kshifts, Momentum, QuenchConfig};

/// Largest cell (in sites) for which we build the Fock space.
const MAX_CELL_SITES: usize = 16;

/// One Slater determinant in a cell superposition: `amp * c†_{s1} ... c†_{sN} |0>`
/// with the flat site indices strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct CellTerm {
    pub amp: Complex64,
    pub sites: Vec<usize>,
}

/// A normalized superposition of same-particle-number determinants on one
/// unit cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellState {
    nu: Vec<usize>,
    terms: Vec<CellTerm>,
}

impl CellState {
    /// Build and validate a cell state. Amplitudes are normalized so the
    /// state has unit norm; terms must share one particle number and have
    /// pairwise distinct site sets.
    pub fn new(nu: Vec<usize>, terms: Vec<CellTerm>) -> Result<Self> {
        if nu.is_empty() || nu.iter().any(|&v| v == 0) {
            return Err(Error::InvalidState(format!(
                "cell dimensions {nu:?} must be non-empty and positive"
            )));
        }
        let total: usize = nu.iter().product();
        if terms.is_empty() {
            return Err(Error::InvalidState("state needs at least one term".into()));
        }
        let n_particles = terms[0].sites.len();
        if n_particles == 0 {
            return Err(Error::InvalidState("terms must create at least one particle".into()));
        }
        for term in &terms {
            if term.sites.len() != n_particles {
                return Err(Error::InvalidState(format!(
                    "terms mix particle numbers: {} vs {}",
                    term.sites.len(),
                    n_particles
                )));
            }
            if !term.sites.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidState(format!(
                    "term sites {:?} must be strictly increasing",
                    term.sites
                )));
            }
            if let Some(&s) = term.sites.iter().find(|&&s| s >= total) {
                return Err(Error::InvalidState(format!(
                    "site index {s} outside cell of {total} sites"
                )));
            }
        }
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                if terms[i].sites == terms[j].sites {
                    return Err(Error::InvalidState(format!(
                        "duplicate term for sites {:?}",
                        terms[i].sites
                    )));
                }
            }
        }
        let norm2: f64 = terms.iter().map(|t| t.amp.norm_sqr()).sum();
        if norm2 <= 1e-24 {
            return Err(Error::ZeroNorm);
        }
        let scale = norm2.sqrt().recip();
        let terms = terms
            .into_iter()
            .map(|t| CellTerm { amp: t.amp * scale, sites: t.sites })
            .collect();
        Ok(CellState { nu, terms })
    }

    /// Single-determinant ("classical") state occupying the listed sites.
    pub fn classical(nu: Vec<usize>, sites: Vec<usize>) -> Result<Self> {
        Self::new(nu, vec![CellTerm { amp: Complex64::new(1.0, 0.0), sites }])
    }

    pub fn nu(&self) -> &[usize] {
        &self.nu
    }

    pub fn nu_total(&self) -> usize {
        self.nu.iter().product()
    }

    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    pub fn terms(&self) -> &[CellTerm] {
        &self.terms
    }

    /// Whether the state is a single determinant.
    pub fn is_classical(&self) -> bool {
        self.terms.len() == 1
    }

    /// Particles per unit cell.
    pub fn particle_count(&self) -> usize {
        self.terms[0].sites.len()
    }

    /// Coordinates of a flat site index (first axis fastest).
    pub fn site_coords(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        self.nu
            .iter()
            .map(|&v| {
                let c = rem % v;
                rem /= v;
                c
            })
            .collect()
    }
}

/// Cell Green's function `G[n][m] = <psi| c†_n c_m |psi>`.
#[derive(Clone, Debug)]
pub struct CellGreen {
    nu: Vec<usize>,
    n_particles: usize,
    g: DMatrix<Complex64>,
}

impl CellGreen {
    pub fn nu(&self) -> &[usize] {
        &self.nu
    }

    pub fn particle_count(&self) -> usize {
        self.n_particles
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.g
    }

    pub fn entry(&self, n: usize, m: usize) -> Complex64 {
        self.g[(n, m)]
    }
}

/// Compute the cell Green's function exactly in the many-body Fock space.
///
/// Basis states are bitmasks over flat site indices with the convention
/// `|mask> = c†_{i1} ... c†_{iN} |0>`, indices ascending. Annihilation picks
/// up `(-1)^(number of occupied sites below the target)`.
pub fn cell_green(state: &CellState) -> Result<CellGreen> {
    let total = state.nu_total();
    if total > MAX_CELL_SITES {
        return Err(Error::CellTooLarge(total, MAX_CELL_SITES));
    }
    // Sparse Fock vector of the (already normalized) state.
    let mut psi: BTreeMap<u32, Complex64> = BTreeMap::new();
    for term in state.terms() {
        let mut mask = 0u32;
        for &s in &term.sites {
            mask |= 1 << s;
        }
        *psi.entry(mask).or_insert(Complex64::new(0.0, 0.0)) += term.amp;
    }
    // vec_s = c_s |psi>, one sparse vector per site.
    let annihilated: Vec<BTreeMap<u32, Complex64>> = (0..total)
        .map(|s| {
            let bit = 1u32 << s;
            let below = bit - 1;
            psi.iter()
                .filter(|(mask, _)| *mask & bit != 0)
                .map(|(&mask, &a)| {
                    let sign = if (mask & below).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    (mask & !bit, a * sign)
                })
                .collect()
        })
        .collect();
    // G[n][m] = <c_n psi | c_m psi>.
    let mut g = DMatrix::<Complex64>::zeros(total, total);
    for n in 0..total {
        for m in 0..total {
            let mut acc = Complex64::new(0.0, 0.0);
            for (mask, a) in &annihilated[n] {
                if let Some(b) = annihilated[m].get(mask) {
                    acc += a.conj() * b;
                }
            }
            g[(n, m)] = acc;
        }
    }
    Ok(CellGreen { nu: state.nu().to_vec(), n_particles: state.particle_count(), g })
}

/// The `|nu| x |nu|` correlation matrix of the momenta `p + k` mixed by the
/// cell-periodic initial state, at reduced momentum `p`.
#[derive(Clone, Debug)]
pub struct MultipletCorrelation {
    p: Momentum,
    n_particles: usize,
    c: DMatrix<Complex64>,
}

impl MultipletCorrelation {
    pub fn reduced_momentum(&self) -> &Momentum {
        &self.p
    }

    pub fn particle_count(&self) -> usize {
        self.n_particles
    }

    pub fn len(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.c
    }

    pub fn entry(&self, k: usize, kp: usize) -> Complex64 {
        self.c[(k, kp)]
    }

    /// Submatrix over the listed mode indices (rows and columns alike).
    pub fn submatrix(&self, mask: &[usize]) -> DMatrix<Complex64> {
        let m = mask.len();
        DMatrix::from_fn(m, m, |i, j| self.c[(mask[i], mask[j])])
    }

    /// Check hermiticity and the particle-number trace.
    pub fn validate(&self) -> Result<()> {
        let n = self.c.nrows();
        for i in 0..n {
            for j in 0..n {
                let d = (self.c[(i, j)] - self.c[(j, i)].conj()).norm();
                if d > 1e-12 {
                    return Err(Error::NotACorrelationMatrix {
                        eigenvalue: d,
                        lo: 0.0,
                        hi: 0.0,
                    });
                }
            }
        }
        let trace: Complex64 = (0..n).map(|i| self.c[(i, i)]).sum();
        if (trace.re - self.n_particles as f64).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "correlation trace {trace} != particle count {}",
                self.n_particles
            )));
        }
        Ok(())
    }
}

/// Build the multiplet correlation matrix
/// `C(p)[k][k'] = (1/|nu|) sum_{n,m} e^{-i(p+k).n} G[n][m] e^{+i(p+k').m}`
/// with `k, k'` running over [`kshifts`] in their flat order.
pub fn multiplet_correlation(
    cfg: &QuenchConfig,
    green: &CellGreen,
    p: &Momentum,
) -> Result<MultipletCorrelation> {
    if green.nu() != cfg.nu() {
        return Err(Error::InvalidState(format!(
            "Green's function cell {:?} does not match configuration cell {:?}",
            green.nu(),
            cfg.nu()
        )));
    }
    if p.dim() != cfg.dim() {
        return Err(Error::InvalidState(format!(
            "momentum dimension {} != lattice dimension {}",
            p.dim(),
            cfg.dim()
        )));
    }
    let total = cfg.nu_total();
    let shifts = kshifts(cfg);
    // phase[s][site] = e^{-i (p + k_s) . coords(site)}
    let coords: Vec<Vec<f64>> = (0..total)
        .map(|flat| {
            let mut rem = flat;
            cfg.nu()
                .iter()
                .map(|&v| {
                    let c = (rem % v) as f64;
                    rem /= v;
                    c
                })
                .collect()
        })
        .collect();
    let phase: Vec<Vec<Complex64>> = shifts
        .iter()
        .map(|k| {
            let full: Vec<f64> = p
                .components()
                .iter()
                .zip(k.components())
                .map(|(a, b)| a + b)
                .collect();
            coords
                .iter()
                .map(|x| {
                    let dot: f64 = full.iter().zip(x).map(|(q, c)| q * c).sum();
                    Complex64::from_polar(1.0, -dot)
                })
                .collect()
        })
        .collect();
    let g = green.matrix();
    let inv = 1.0 / total as f64;
    let c = DMatrix::from_fn(total, total, |s, sp| {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..total {
            for m in 0..total {
                acc += phase[s][n] * g[(n, m)] * phase[sp][m].conj();
            }
        }
        acc * inv
    });
    Ok(MultipletCorrelation { p: p.clone(), n_particles: green.particle_count(), c })
}

/// Momentum-space occupation `n(q) = (1/|nu|) sum_{n,m} e^{-i q.(n-m)} G[n][m]`
/// at a full (unreduced) momentum `q`.
pub fn occupation(cfg: &QuenchConfig, green: &CellGreen, q: &Momentum) -> Result<f64> {
    let total = cfg.nu_total();
    let g = green.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..total {
        let cn = site_coords_f64(cfg.nu(), n);
        for m in 0..total {
            let cm = site_coords_f64(cfg.nu(), m);
            let dot: f64 = q
                .components()
                .iter()
                .enumerate()
                .map(|(a, &qa)| qa * (cn[a] - cm[a]))
                .sum();
            acc += Complex64::from_polar(1.0, -dot) * g[(n, m)];
        }
    }
    let _ = multiplet_keep_real(acc.im)?;
    Ok(acc.re / total as f64)
}

/// Diagonal of the multiplet correlation matrix: occupations of the `|nu|`
/// modes `p + k_s`, without building the full matrix.
pub fn multiplet_occupations(
    cfg: &QuenchConfig,
    green: &CellGreen,
    p: &Momentum,
) -> Result<Vec<f64>> {
    kshifts(cfg)
        .iter()
        .map(|k| occupation(cfg, green, &p.add(k)))
        .collect()
}

fn site_coords_f64(nu: &[usize], flat: usize) -> Vec<f64> {
    let mut rem = flat;
    nu.iter()
        .map(|&v| {
            let c = (rem % v) as f64;
            rem /= v;
            c
        })
        .collect()
}

fn multiplet_keep_real(im: f64) -> Result<f64> {
    if im.abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "occupation has non-negligible imaginary part {im}"
        )));
    }
    Ok(im)
}

// ---------------------------------------------------------------------------
// JSON-facing description
// ---------------------------------------------------------------------------

/// Serializable cell-state description, e.g.
/// `{"nu":[4],"terms":[{"amp":[1.0,0.0],"sites":[0,1]}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellStateSpec {
    pub nu: Vec<usize>,
    pub terms: Vec<CellTermSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellTermSpec {
    /// `[re, im]`
    pub amp: [f64; 2],
    pub sites: Vec<usize>,
}

impl TryFrom<CellStateSpec> for CellState {
    type Error = Error;

    fn try_from(spec: CellStateSpec) -> Result<CellState> {
        CellState::new(
            spec.nu,
            spec.terms
                .into_iter()
                .map(|t| CellTerm { amp: Complex64::new(t.amp[0], t.amp[1]), sites: t.sites })
                .collect(),
        )
    }
}

impl From<&CellState> for CellStateSpec {
    fn from(state: &CellState) -> CellStateSpec {
        CellStateSpec {
            nu: state.nu().to_vec(),
            terms: state
                .terms()
                .iter()
                .map(|t| CellTermSpec { amp: [t.amp.re, t.amp.im], sites: t.sites.clone() })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_particle_superposition(alpha: f64) -> CellState {
        CellState::new(
            vec![4],
            vec![
                CellTerm { amp: Complex64::new(1.0, 0.0), sites: vec![0, 1] },
                CellTerm { amp: Complex64::new(alpha, 0.0), sites: vec![0, 2] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn classical_green_is_occupation_projector() {
        let s = CellState::classical(vec![4], vec![0, 1]).unwrap();
        let g = cell_green(&s).unwrap();
        for n in 0..4 {
            for m in 0..4 {
                let expect = if n == m && n < 2 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(g.entry(n, m).re, expect, epsilon = 1e-14);
                assert_abs_diff_eq!(g.entry(n, m).im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn superposition_green_off_diagonal() {
        // (|110 0> + a |101 0>)/sqrt(1+a^2): only site 0 is surely occupied;
        // the 1<->2 coherence is a/(1+a^2).
        let a = 0.5;
        let g = cell_green(&two_particle_superposition(a)).unwrap();
        let w = 1.0 + a * a;
        assert_abs_diff_eq!(g.entry(0, 0).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.entry(1, 1).re, 1.0 / w, epsilon = 1e-14);
        assert_abs_diff_eq!(g.entry(2, 2).re, a * a / w, epsilon = 1e-14);
        assert_abs_diff_eq!(g.entry(3, 3).re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.entry(1, 2).re, a / w, epsilon = 1e-14);
        assert_abs_diff_eq!(g.entry(2, 1).re, a / w, epsilon = 1e-14);
    }

    #[test]
    fn green_trace_is_particle_number() {
        let g = cell_green(&two_particle_superposition(1.3)).unwrap();
        let tr: Complex64 = (0..4).map(|i| g.entry(i, i)).sum();
        assert_abs_diff_eq!(tr.re, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn classical_correlation_is_projector() {
        let cfg = QuenchConfig::with_unit_hopping(vec![2, 2]).unwrap();
        let s = CellState::classical(vec![2, 2], vec![0, 3]).unwrap();
        let g = cell_green(&s).unwrap();
        let p = Momentum::new(vec![0.37, 1.1]);
        let c = multiplet_correlation(&cfg, &g, &p).unwrap();
        c.validate().unwrap();
        let m = c.matrix();
        let sq = m * m;
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!((sq[(i, j)] - m[(i, j)]).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn correlation_of_classical_state_matches_plane_wave_sum() {
        // C[k][k'] = (1/|nu|) sum_q e^{-i(k-k').a_q} for occupied sites a_q,
        // independent of p.
        let cfg = QuenchConfig::with_unit_hopping(vec![4]).unwrap();
        let s = CellState::classical(vec![4], vec![0, 2]).unwrap();
        let g = cell_green(&s).unwrap();
        let c = multiplet_correlation(&cfg, &g, &Momentum::new(vec![0.7])).unwrap();
        let shifts = kshifts(&cfg);
        for i in 0..4 {
            for j in 0..4 {
                let dk = shifts[i].components()[0] - shifts[j].components()[0];
                let expect = (Complex64::from_polar(1.0, -dk * 0.0)
                    + Complex64::from_polar(1.0, -dk * 2.0))
                    / 4.0;
                assert_abs_diff_eq!((c.entry(i, j) - expect).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn occupations_match_matrix_diagonal() {
        let cfg = QuenchConfig::with_unit_hopping(vec![4]).unwrap();
        let g = cell_green(&two_particle_superposition(0.8)).unwrap();
        let p = Momentum::new(vec![0.3]);
        let c = multiplet_correlation(&cfg, &g, &p).unwrap();
        let occ = multiplet_occupations(&cfg, &g, &p).unwrap();
        for s in 0..4 {
            assert_abs_diff_eq!(occ[s], c.entry(s, s).re, epsilon = 1e-12);
        }
        let total: f64 = occ.iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn validation_rejects_bad_states() {
        assert!(CellState::new(vec![4], vec![]).is_err());
        assert!(CellState::classical(vec![4], vec![0, 4]).is_err());
        assert!(CellState::classical(vec![4], vec![1, 0]).is_err());
        assert!(CellState::new(
            vec![4],
            vec![
                CellTerm { amp: Complex64::new(1.0, 0.0), sites: vec![0] },
                CellTerm { amp: Complex64::new(1.0, 0.0), sites: vec![0, 1] },
            ],
        )
        .is_err());
        assert!(matches!(
            CellState::new(
                vec![4],
                vec![CellTerm { amp: Complex64::new(0.0, 0.0), sites: vec![0] }]
            ),
            Err(Error::ZeroNorm)
        ));
        assert!(matches!(
            cell_green(&CellState::classical(vec![32], vec![0]).unwrap()),
            Err(Error::CellTooLarge(32, 16))
        ));
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"nu":[4],"terms":[{"amp":[1.0,0.0],"sites":[0,1]}]}"#;
        let spec: CellStateSpec = serde_json::from_str(json).unwrap();
        let state = CellState::try_from(spec).unwrap();
        assert!(state.is_classical());
        assert_eq!(state.particle_count(), 2);
        let back = CellStateSpec::from(&state);
        assert_eq!(back.nu, vec![4]);
        assert_eq!(back.terms[0].sites, vec![0, 1]);
    }

    #[test]
    fn site_coords_first_axis_fastest() {
        let s = CellState::classical(vec![2, 2], vec![0]).unwrap();
        assert_eq!(s.site_coords(0), vec![0, 0]);
        assert_eq!(s.site_coords(1), vec![1, 0]);
        assert_eq!(s.site_coords(2), vec![0, 1]);
        assert_eq!(s.site_coords(3), vec![1, 1]);
    }
}
