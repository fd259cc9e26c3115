//! Result records: sampled entropy-density curves with provenance.

use serde::Serialize;

use crate::lattice::QuenchConfig;
use crate::region::Region;

/// Which engine produced a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineTag {
    Analytic,
    Mc,
    ExactThermo,
    ExactFinite,
    Stationary,
}

impl EngineTag {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineTag::Analytic => "analytic",
            EngineTag::Mc => "mc",
            EngineTag::ExactThermo => "exact-thermo",
            EngineTag::ExactFinite => "exact-finite",
            EngineTag::Stationary => "stationary",
        }
    }
}

/// One sampled point of `S_A(t) / |A|`.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    /// Raw time.
    pub t: f64,
    /// Rescaled time `zeta = 2 v_max t / |A|^(1/d)`.
    pub zeta: f64,
    /// Entropy density in nats (per site for aligned lattice regions, per
    /// continuum area otherwise; see the engine that produced the curve).
    pub density: f64,
    /// Standard error of the mean (Monte Carlo curves only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    /// Entropy per lattice site (exact-numerics curves report both
    /// normalizations).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site_density: Option<f64>,
    /// Entropy per continuum area (exact-numerics curves report both
    /// normalizations).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area_density: Option<f64>,
}

impl CurvePoint {
    pub fn simple(t: f64, zeta: f64, density: f64) -> Self {
        CurvePoint {
            t,
            zeta,
            density,
            stderr: None,
            site_density: None,
            area_density: None,
        }
    }
}

/// A sampled time series of entropy density with provenance.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyCurve {
    pub engine: EngineTag,
    pub points: Vec<CurvePoint>,
}

/// Rescaled time `zeta = 2 v_max t / |A|^(1/d)` for a region of dimension
/// `d` (linear size for intervals, sqrt of the area for 2D regions).
pub fn zeta_for(cfg: &QuenchConfig, region: &Region, t: f64) -> f64 {
    2.0 * cfg.v_max() * t / region.linear_scale()
}

/// Inverse of [`zeta_for`].
pub fn t_for_zeta(cfg: &QuenchConfig, region: &Region, zeta: f64) -> f64 {
    zeta * region.linear_scale() / (2.0 * cfg.v_max())
}
