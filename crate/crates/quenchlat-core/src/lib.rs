//! Entanglement-entropy dynamics of free fermions on `d`-dimensional lattices
//! after a quantum quench.
//!
//! The crate models a nearest-neighbour hopping Hamiltonian quenched from an
//! initial state that is a product over unit cells of `nu` sites (a "cell
//! state": either a classical particle configuration or a fixed-number
//! superposition). Three engines compute the entropy density `S_A(t)/|A|` of
//! a spatial region `A`:
//!
//! * [`qp::qp_entropy_analytic`] — ballistic-mode (quasiparticle) prediction
//!   assembled from exact overlap areas of displaced copies of `A`, for 1D
//!   intervals and 2D aligned/rotated rectangles;
//! * [`mc::qp_entropy_mc`] — Monte Carlo evaluation of the same prediction
//!   for arbitrary polygonal regions, with seeded reproducible streams;
//! * [`exact::exact_entropy_curve`] — exact Gaussian correlation-matrix
//!   numerics (thermodynamic-limit integral or finite periodic lattice),
//!   the benchmark the ballistic prediction converges to.
//!
//! Supporting modules: [`lattice`] (dispersion, group velocities, momentum
//! grids), [`state`] (cell states, within-cell Green function, multiplet
//! correlation matrices), [`entropy`] (spectral entropy kernels),
//! [`region`] (polygon geometry), [`curve`] (result records) and [`exec`]
//! (deterministic sequential/parallel execution).
//!
//! With the default `parallel` feature the heavy loops run on rayon;
//! the sequential fallback is always compiled and produces bit-identical
//! results thanks to a fixed chunked reduction order.

pub mod curve;
pub mod entropy;
mod error;
pub mod exact;
pub mod exec;
pub mod lattice;
pub mod mc;
pub mod qp;
pub mod region;
pub mod state;

pub use error::{Error, Result};
