use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid lattice/quench parameters (dimension, hopping, cell extents).
    #[error("invalid quench configuration: {0}")]
    InvalidConfig(String),

    /// Structurally invalid cell state (mismatched particle numbers,
    /// repeated or out-of-range sites, empty term list, ...).
    #[error("invalid cell state: {0}")]
    InvalidState(String),

    /// The unit cell has more sites than the Fock-space oracle supports.
    #[error("unit cell with {0} sites exceeds the Fock oracle limit of {1}")]
    CellTooLarge(usize, usize),

    /// The antisymmetrized superposition of the listed terms vanishes.
    #[error("cell state has zero norm after antisymmetrization")]
    ZeroNorm,

    /// A matrix handed to the spectral entropy kernel has an eigenvalue
    /// outside [-tol, 1+tol].
    #[error("not a correlation matrix: eigenvalue {eigenvalue} outside [{lo}, {hi}]")]
    NotACorrelationMatrix { eigenvalue: f64, lo: f64, hi: f64 },

    /// A bipartition mask refers to mode indices outside the multiplet.
    #[error("invalid bipartition mask: {0}")]
    InvalidMask(String),

    /// Invalid region description (self-intersecting polygon, non-positive
    /// measure, too few vertices, ...).
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    /// Rejection sampling failed to hit the region within the trial cap;
    /// the region measure is (numerically) degenerate w.r.t. its bounding box.
    #[error("degenerate region: no hit in {0} rejection-sampling trials")]
    DegenerateRegion(u64),

    /// Two velocity-sorted modes coincide, so the closed-form area
    /// expressions (which divide by velocity differences) are singular.
    #[error("degenerate velocities at momentum {0:?}")]
    DegenerateVelocities(Vec<f64>),

    /// The state's unit cell does not match the requested analytic geometry.
    #[error("geometry/state mismatch: {0}")]
    GeometryStateMismatch(String),

    /// Parameter outside the validity domain of a closed-form expression.
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    /// Monte Carlo configuration violates its invariants.
    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidMcConfig(String),

    /// The thermodynamic-limit correlation integral is only implemented for
    /// classical (single-term) configurations.
    #[error("state is not a classical configuration; use the finite-lattice backend")]
    NotClassical,

    /// Finite-lattice linear sizes must be multiples of the cell extents.
    #[error("lattice size {l:?} is not commensurate with cell {nu:?}")]
    IncommensurateCell { l: Vec<usize>, nu: Vec<usize> },

    /// A region contains no lattice sites, so no subsystem matrix exists.
    #[error("region contains no lattice sites")]
    EmptyRegionSites,
}

pub type Result<T> = std::result::Result<T, Error>;
