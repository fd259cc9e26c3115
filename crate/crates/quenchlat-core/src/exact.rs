//! Exact Gaussian benchmark engines: real-space correlation matrices of the
//! evolved state, restricted to a subsystem, fed through the spectral
//! entropy kernel. These curves are what the ballistic-mode predictions
//! converge to in the scaling limit.
//!
//! Both backends evaluate the same momentum-space object. A cell state is
//! invariant under cell-size shifts, so momentum is conserved modulo the
//! reduced shift lattice and the evolved two-point function is
//!
//! ```text
//! C_{n,m}(t) = avg_p sum_{k,k'} e^{i p.(n-m)} e^{i k.n - i k'.m}
//!              e^{i t (eps(p+k) - eps(p+k'))} Chat(p)[k][k']
//! ```
//!
//! with `p` running over the reduced zone, `k, k'` the multiplet shifts and
//! `Chat(p)` the multiplet correlation matrix. The thermodynamic backend
//! replaces the average by midpoint quadrature on a [`ReducedGrid`]; the
//! finite backend uses the exact discrete momenta of an `L`-periodic
//! lattice, which makes it exact to round-off (momentum-space evolution is
//! diagonal — the `L^d x L^d` hopping matrix is never exponentiated).
//!
//! For classical configurations `Chat` is momentum independent and the
//! cosine dispersion separates per axis, so the thermodynamic quadrature
//! factorizes into per-axis tables: an `O(diameter)` family of 1D sums
//! instead of one `d`-dimensional integral per site pair. The finite
//! backend accepts any cell state and caches one momentum sum per distinct
//! `(n - m, m mod nu)` pair.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::curve::{zeta_for, CurvePoint, EngineTag, EntropyCurve};
use crate::entropy::fermi_entropy;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::lattice::{dispersion, kshifts, shift_integers, Momentum, QuenchConfig, ReducedGrid};
use crate::region::Region;
use crate::state::{cell_green, multiplet_correlation, CellState};

const TAU: f64 = std::f64::consts::TAU;

/// Minimum total quadrature points accepted by the thermodynamic backend,
/// per dimension count: coarser grids visibly ripple the curves.
pub fn thermo_min_points(dim: usize) -> usize {
    match dim {
        1 => 10_000,
        2 => 62_500,
        d => 64usize.pow(d as u32),
    }
}

/// Correlation matrix of the evolved state restricted to a site set.
#[derive(Clone, Debug)]
pub struct SubsystemCorrelation {
    /// Sites in the order used by the matrix rows/columns.
    pub sites: Vec<Vec<i64>>,
    /// `|sites| x |sites|` Hermitian matrix, `C[i][j] = <c+_{site i} c_{site j}>`.
    pub matrix: DMatrix<Complex64>,
}

impl SubsystemCorrelation {
    /// Largest `|C - C+|` entry (zero for mirror-filled matrices; useful on
    /// matrices assembled entry by entry).
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// `site mod nu` per axis, in `0..nu_a`.
fn site_rem(site: &[i64], nu: &[usize]) -> Vec<usize> {
    site.iter().zip(nu).map(|(&x, &n)| x.rem_euclid(n as i64) as usize).collect()
}

/// Phase vector `e^{i k . nhat}` over the multiplet shifts.
fn shift_phases(shift_ints: &[Vec<usize>], nu: &[usize], nhat: &[usize]) -> Vec<Complex64> {
    shift_ints
        .iter()
        .map(|s| {
            let arg: f64 = s
                .iter()
                .zip(nu)
                .zip(nhat)
                .map(|((&si, &nui), &ni)| TAU * si as f64 * ni as f64 / nui as f64)
                .sum();
            Complex64::from_polar(1.0, arg)
        })
        .collect()
}

/// Distinct `(n - m, m mod nu)` keys over the `i <= j` site pairs, plus the
/// slot of each pair in scan order.
struct PairKeys {
    /// `(delta, mhat)` per slot.
    keys: Vec<(Vec<i64>, Vec<usize>)>,
    /// key slot of pair `(i, j)`, `i <= j`, scanned `i`-major.
    slots: Vec<usize>,
}

fn build_pair_keys(sites: &[Vec<i64>], nu: &[usize]) -> PairKeys {
    let n = sites.len();
    let mut index: HashMap<(Vec<i64>, Vec<usize>), usize> = HashMap::new();
    let mut keys = Vec::new();
    let mut slots = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let delta: Vec<i64> =
                sites[i].iter().zip(&sites[j]).map(|(&a, &b)| a - b).collect();
            let mhat = site_rem(&sites[j], nu);
            let slot = *index.entry((delta.clone(), mhat.clone())).or_insert_with(|| {
                keys.push((delta, mhat));
                keys.len() - 1
            });
            slots.push(slot);
        }
    }
    PairKeys { keys, slots }
}

/// Mirror per-key values into the Hermitian subsystem matrix.
fn fill_matrix(sites: &[Vec<i64>], pk: &PairKeys, values: &[Complex64]) -> DMatrix<Complex64> {
    let n = sites.len();
    let mut m = DMatrix::zeros(n, n);
    let mut scan = 0;
    for i in 0..n {
        for j in i..n {
            let v = values[pk.slots[scan]];
            scan += 1;
            if i == j {
                // <c+ c> diagonals are real; drop the round-off imaginary part
                m[(i, i)] = Complex64::new(v.re, 0.0);
            } else {
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Thermodynamic-limit backend
// ---------------------------------------------------------------------------

/// Per-axis factor table `F[s, s', delta] = sum_j e^{i p_j delta}
/// e^{i 2Jt (cos(p_j + k_s) - cos(p_j + k_s'))}` on the axis midpoint grid.
struct AxisTable {
    nu: usize,
    d_max: i64,
    span: usize,
    data: Vec<Complex64>,
}

impl AxisTable {
    fn build(nu_a: usize, m_a: usize, width: f64, two_jt: f64, d_max: i64) -> AxisTable {
        let span = (2 * d_max + 1) as usize;
        let mut data = vec![Complex64::default(); nu_a * nu_a * span];
        let step = width / m_a as f64;
        let mut cosines = vec![0.0; nu_a];
        let mut eip = vec![Complex64::default(); span];
        for j in 0..m_a {
            let p = (j as f64 + 0.5) * step;
            for (s, c) in cosines.iter_mut().enumerate() {
                *c = (p + TAU * s as f64 / nu_a as f64).cos();
            }
            for (idx, e) in eip.iter_mut().enumerate() {
                *e = Complex64::from_polar(1.0, p * (idx as i64 - d_max) as f64);
            }
            for s in 0..nu_a {
                for sp in 0..nu_a {
                    let ph = Complex64::from_polar(1.0, two_jt * (cosines[s] - cosines[sp]));
                    let row = &mut data[(s * nu_a + sp) * span..(s * nu_a + sp + 1) * span];
                    for (slot, e) in row.iter_mut().zip(&eip) {
                        *slot += ph * e;
                    }
                }
            }
        }
        AxisTable { nu: nu_a, d_max, span, data }
    }

    fn get(&self, s: usize, sp: usize, delta: i64) -> Complex64 {
        self.data[(s * self.nu + sp) * self.span + (delta + self.d_max) as usize]
    }
}

/// Thermodynamic-limit correlator for classical configurations: site-pair
/// correlations as reduced-zone quadrature, factorized per axis.
pub struct ThermoCorrelator {
    cfg: QuenchConfig,
    /// momentum-independent multiplet matrix of the classical state
    c0: DMatrix<Complex64>,
    shift_ints: Vec<Vec<usize>>,
    subdivisions: Vec<usize>,
    /// uniform quadrature weight `1 / (|nu| . points)`
    weight: f64,
}

impl ThermoCorrelator {
    /// Errors with [`Error::NotClassical`] for superposition states (their
    /// momentum-dependent multiplet matrix does not factorize; use the
    /// finite backend) and with [`Error::InvalidConfig`] for grids below
    /// [`thermo_min_points`].
    pub fn new(cfg: &QuenchConfig, state: &CellState, grid: &ReducedGrid) -> Result<Self> {
        if !state.is_classical() {
            return Err(Error::NotClassical);
        }
        if state.nu() != cfg.nu() {
            return Err(Error::InvalidState(format!(
                "state cell {:?} does not match configuration cell {:?}",
                state.nu(),
                cfg.nu()
            )));
        }
        if grid.dim() != cfg.dim() {
            return Err(Error::InvalidConfig(format!(
                "{}D grid does not match {}D configuration",
                grid.dim(),
                cfg.dim()
            )));
        }
        let min = thermo_min_points(cfg.dim());
        if grid.len() < min {
            return Err(Error::InvalidConfig(format!(
                "thermodynamic quadrature needs >= {min} grid points in {}D, got {}",
                cfg.dim(),
                grid.len()
            )));
        }
        let green = cell_green(state)?;
        // classical multiplet matrices are momentum independent
        let probe = Momentum::new(vec![0.1; cfg.dim()]);
        let c0 = multiplet_correlation(cfg, &green, &probe)?.matrix().clone();
        Ok(ThermoCorrelator {
            cfg: cfg.clone(),
            c0,
            shift_ints: shift_integers(cfg.nu()),
            subdivisions: grid.subdivisions().to_vec(),
            weight: 1.0 / (cfg.nu_total() * grid.len()) as f64,
        })
    }

    fn axis_tables(&self, t: f64, d_max: &[i64]) -> Vec<AxisTable> {
        let widths = self.cfg.reduced_widths();
        let two_jt = 2.0 * self.cfg.hopping() * t;
        (0..self.cfg.dim())
            .map(|a| {
                AxisTable::build(
                    self.cfg.nu()[a],
                    self.subdivisions[a],
                    widths[a],
                    two_jt,
                    d_max[a],
                )
            })
            .collect()
    }

    fn value(&self, tables: &[AxisTable], delta: &[i64], nhat: &[usize], mhat: &[usize]) -> Complex64 {
        let nu = self.cfg.nu();
        let total = self.cfg.nu_total();
        let phase_n = shift_phases(&self.shift_ints, nu, nhat);
        let phase_m = shift_phases(&self.shift_ints, nu, mhat);
        let mut acc = Complex64::default();
        for k in 0..total {
            for kp in 0..total {
                let mut prod = Complex64::new(1.0, 0.0);
                for (a, table) in tables.iter().enumerate() {
                    prod *= table.get(self.shift_ints[k][a], self.shift_ints[kp][a], delta[a]);
                }
                acc += phase_n[k] * phase_m[kp].conj() * self.c0[(k, kp)] * prod;
            }
        }
        acc * self.weight
    }

    /// Single correlation entry `C_{n,m}(t)` for integer sites `n`, `m`.
    pub fn entry(&self, n: &[i64], m: &[i64], t: f64) -> Result<Complex64> {
        check_site_dims(&self.cfg, n, m)?;
        let delta: Vec<i64> = n.iter().zip(m).map(|(&a, &b)| a - b).collect();
        let d_max: Vec<i64> = delta.iter().map(|&d| d.abs()).collect();
        let tables = self.axis_tables(t, &d_max);
        Ok(self.value(&tables, &delta, &site_rem(n, self.cfg.nu()), &site_rem(m, self.cfg.nu())))
    }

    /// Subsystem correlation matrix over `sites` at time `t`.
    pub fn subsystem(
        &self,
        sites: &[Vec<i64>],
        t: f64,
        mode: ExecMode,
    ) -> Result<SubsystemCorrelation> {
        for s in sites {
            check_site_dims(&self.cfg, s, s)?;
        }
        let nu = self.cfg.nu().to_vec();
        let pk = build_pair_keys(sites, &nu);
        let mut d_max = vec![0i64; self.cfg.dim()];
        for (delta, _) in &pk.keys {
            for (dm, &d) in d_max.iter_mut().zip(delta) {
                *dm = (*dm).max(d.abs());
            }
        }
        let tables = self.axis_tables(t, &d_max);
        let values = exec::indexed_map(mode, pk.keys.len(), 64, |slot| {
            let (delta, mhat) = &pk.keys[slot];
            let nhat: Vec<usize> = mhat
                .iter()
                .zip(delta)
                .zip(&nu)
                .map(|((&m, &d), &n)| (m as i64 + d).rem_euclid(n as i64) as usize)
                .collect();
            self.value(&tables, delta, &nhat, mhat)
        });
        Ok(SubsystemCorrelation { sites: sites.to_vec(), matrix: fill_matrix(sites, &pk, &values) })
    }
}

/// One-shot thermodynamic-limit correlation entry (classical states).
pub fn correlation_thermo(
    cfg: &QuenchConfig,
    state: &CellState,
    n: &[i64],
    m: &[i64],
    t: f64,
    grid: &ReducedGrid,
) -> Result<Complex64> {
    ThermoCorrelator::new(cfg, state, grid)?.entry(n, m, t)
}

// ---------------------------------------------------------------------------
// Finite periodic-lattice backend
// ---------------------------------------------------------------------------

/// Multiplet matrices over the discrete reduced momenta: one shared matrix
/// for classical states, one per momentum otherwise.
enum Chat {
    Shared(DMatrix<Complex64>),
    PerPoint(Vec<DMatrix<Complex64>>),
}

impl Chat {
    fn at(&self, j: usize) -> &DMatrix<Complex64> {
        match self {
            Chat::Shared(m) => m,
            Chat::PerPoint(v) => &v[j],
        }
    }
}

/// Exact correlator of an `L`-periodic lattice (any cell state): evolution
/// is applied as diagonal phases on the discrete momentum blocks.
pub struct FiniteCorrelator {
    cfg: QuenchConfig,
    lattice: Vec<usize>,
    /// reduced-zone lattice momenta (components), last axis fastest
    momenta: Vec<Vec<f64>>,
    /// `eps(p_j + k)` flattened as `[j * total + k]`
    eps: Vec<f64>,
    chat: Chat,
    shift_ints: Vec<Vec<usize>>,
    volume: usize,
}

impl FiniteCorrelator {
    /// Errors with [`Error::IncommensurateCell`] unless every `L_a` is a
    /// positive multiple of `nu_a`.
    pub fn new(cfg: &QuenchConfig, state: &CellState, lattice: &[usize]) -> Result<Self> {
        if state.nu() != cfg.nu() {
            return Err(Error::InvalidState(format!(
                "state cell {:?} does not match configuration cell {:?}",
                state.nu(),
                cfg.nu()
            )));
        }
        if lattice.len() != cfg.dim() {
            return Err(Error::InvalidConfig(format!(
                "lattice {lattice:?} does not match dimension {}",
                cfg.dim()
            )));
        }
        if lattice.iter().zip(cfg.nu()).any(|(&l, &n)| l == 0 || l % n != 0) {
            return Err(Error::IncommensurateCell {
                l: lattice.to_vec(),
                nu: cfg.nu().to_vec(),
            });
        }
        let green = cell_green(state)?;
        let counts: Vec<usize> = lattice.iter().zip(cfg.nu()).map(|(&l, &n)| l / n).collect();
        let red_count: usize = counts.iter().product();
        let mut momenta = Vec::with_capacity(red_count);
        let mut idx = vec![0usize; cfg.dim()];
        for _ in 0..red_count {
            momenta.push(
                idx.iter()
                    .zip(lattice)
                    .map(|(&j, &l)| TAU * j as f64 / l as f64)
                    .collect::<Vec<f64>>(),
            );
            for a in (0..cfg.dim()).rev() {
                idx[a] += 1;
                if idx[a] < counts[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        let shifts = kshifts(cfg);
        let total = cfg.nu_total();
        let mut eps = Vec::with_capacity(red_count * total);
        for p in &momenta {
            for k in &shifts {
                let q = Momentum::new(
                    p.iter().zip(k.components()).map(|(&pa, &ka)| pa + ka).collect::<Vec<_>>(),
                );
                eps.push(dispersion(cfg, &q));
            }
        }
        let chat = if state.is_classical() {
            let p = Momentum::from_reduced(momenta[0].clone());
            Chat::Shared(multiplet_correlation(cfg, &green, &p)?.matrix().clone())
        } else {
            Chat::PerPoint(
                momenta
                    .iter()
                    .map(|p| {
                        let p = Momentum::from_reduced(p.clone());
                        Ok(multiplet_correlation(cfg, &green, &p)?.matrix().clone())
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        Ok(FiniteCorrelator {
            cfg: cfg.clone(),
            lattice: lattice.to_vec(),
            momenta,
            eps,
            chat,
            shift_ints: shift_integers(cfg.nu()),
            volume: lattice.iter().product(),
        })
    }

    pub fn lattice(&self) -> &[usize] {
        &self.lattice
    }

    /// `e^{i t eps(p_j + k)}` flattened as `[j * total + k]`.
    fn time_phases(&self, t: f64) -> Vec<Complex64> {
        self.eps.iter().map(|&e| Complex64::from_polar(1.0, t * e)).collect()
    }

    fn value(&self, zt: &[Complex64], delta: &[i64], nhat: &[usize], mhat: &[usize]) -> Complex64 {
        let nu = self.cfg.nu();
        let total = self.cfg.nu_total();
        let phase_n = shift_phases(&self.shift_ints, nu, nhat);
        let phase_m = shift_phases(&self.shift_ints, nu, mhat);
        let mut acc = Complex64::default();
        for (j, p) in self.momenta.iter().enumerate() {
            let arg: f64 = p.iter().zip(delta).map(|(&pa, &da)| pa * da as f64).sum();
            let eip = Complex64::from_polar(1.0, arg);
            let chat = self.chat.at(j);
            let z = &zt[j * total..(j + 1) * total];
            let mut inner = Complex64::default();
            for k in 0..total {
                let u = phase_n[k] * z[k];
                for kp in 0..total {
                    inner += u * (phase_m[kp] * z[kp]).conj() * chat[(k, kp)];
                }
            }
            acc += eip * inner;
        }
        acc / self.volume as f64
    }

    /// Single correlation entry `C_{n,m}(t)`; site coordinates may be any
    /// integers (the periodic images coincide by construction).
    pub fn entry(&self, n: &[i64], m: &[i64], t: f64) -> Result<Complex64> {
        check_site_dims(&self.cfg, n, m)?;
        let delta: Vec<i64> = n.iter().zip(m).map(|(&a, &b)| a - b).collect();
        let zt = self.time_phases(t);
        Ok(self.value(&zt, &delta, &site_rem(n, self.cfg.nu()), &site_rem(m, self.cfg.nu())))
    }

    /// Subsystem correlation matrix over `sites` at time `t`.
    pub fn subsystem(
        &self,
        sites: &[Vec<i64>],
        t: f64,
        mode: ExecMode,
    ) -> Result<SubsystemCorrelation> {
        for s in sites {
            check_site_dims(&self.cfg, s, s)?;
        }
        let nu = self.cfg.nu().to_vec();
        let pk = build_pair_keys(sites, &nu);
        let zt = self.time_phases(t);
        let values = exec::indexed_map(mode, pk.keys.len(), 8, |slot| {
            let (delta, mhat) = &pk.keys[slot];
            let nhat: Vec<usize> = mhat
                .iter()
                .zip(delta)
                .zip(&nu)
                .map(|((&m, &d), &n)| (m as i64 + d).rem_euclid(n as i64) as usize)
                .collect();
            self.value(&zt, delta, &nhat, mhat)
        });
        Ok(SubsystemCorrelation { sites: sites.to_vec(), matrix: fill_matrix(sites, &pk, &values) })
    }
}

/// One-shot finite-lattice correlation entry (any cell state).
pub fn correlation_finite(
    cfg: &QuenchConfig,
    state: &CellState,
    lattice: &[usize],
    n: &[i64],
    m: &[i64],
    t: f64,
) -> Result<Complex64> {
    FiniteCorrelator::new(cfg, state, lattice)?.entry(n, m, t)
}

fn check_site_dims(cfg: &QuenchConfig, n: &[i64], m: &[i64]) -> Result<()> {
    if n.len() != cfg.dim() || m.len() != cfg.dim() {
        return Err(Error::InvalidParameter(format!(
            "site coordinates {n:?}, {m:?} do not match dimension {}",
            cfg.dim()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Entropy curves
// ---------------------------------------------------------------------------

/// Which exact backend evaluates the correlation matrix.
#[derive(Clone, Debug)]
pub enum ExactBackend {
    /// Thermodynamic-limit quadrature (classical states only).
    Thermo { grid: ReducedGrid },
    /// `L`-periodic lattice (any cell state), exact to round-off.
    Finite { lattice: Vec<usize> },
}

enum Correlator {
    Thermo(ThermoCorrelator),
    Finite(FiniteCorrelator),
}

impl Correlator {
    fn subsystem(&self, sites: &[Vec<i64>], t: f64, mode: ExecMode) -> Result<SubsystemCorrelation> {
        match self {
            Correlator::Thermo(c) => c.subsystem(sites, t, mode),
            Correlator::Finite(c) => c.subsystem(sites, t, mode),
        }
    }
}

/// Exact entropy-density curve of the sites enclosed by `region`.
///
/// Per time: assemble the subsystem correlation matrix, take the spectral
/// entropy, and report densities under both normalizations — per lattice
/// site in `density`/`site_density`, per continuum area in `area_density`
/// (they differ only for regions whose site count is not their area, e.g.
/// rotated boxes).
pub fn exact_entropy_curve(
    cfg: &QuenchConfig,
    state: &CellState,
    region: &Region,
    times: &[f64],
    backend: &ExactBackend,
    mode: ExecMode,
) -> Result<EntropyCurve> {
    if region.dim() != cfg.dim() {
        return Err(Error::GeometryStateMismatch(format!(
            "{}D region does not match {}D configuration",
            region.dim(),
            cfg.dim()
        )));
    }
    for &t in times {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "time must be finite and >= 0, got {t}"
            )));
        }
    }
    let sites = region.lattice_sites();
    if sites.is_empty() {
        return Err(Error::InvalidRegion("region encloses no lattice sites".into()));
    }
    let (correlator, engine) = match backend {
        ExactBackend::Thermo { grid } => (
            Correlator::Thermo(ThermoCorrelator::new(cfg, state, grid)?),
            EngineTag::ExactThermo,
        ),
        ExactBackend::Finite { lattice } => (
            Correlator::Finite(FiniteCorrelator::new(cfg, state, lattice)?),
            EngineTag::ExactFinite,
        ),
    };
    let n_sites = sites.len() as f64;
    let points = times
        .iter()
        .map(|&t| {
            let sub = correlator.subsystem(&sites, t, mode)?;
            let s = fermi_entropy(&sub.matrix)?;
            Ok(CurvePoint {
                t,
                zeta: zeta_for(cfg, region, t),
                density: s / n_sites,
                stderr: None,
                site_density: Some(s / n_sites),
                area_density: Some(s / region.area()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyCurve { engine, points })
}
