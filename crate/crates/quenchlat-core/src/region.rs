//! Subsystem regions: 1D intervals and 2D simple polygons with rotation and
//! translation, plus membership tests, exact areas, uniform sampling and
//! lattice-site enumeration.
//!
//! Continuum-vs-lattice convention: a lattice site sits at its integer
//! coordinates and a length-`l` interval anchored at site `s` covers sites
//! `s ... s+l-1` through the half-open window `[s - 1/2, s + l - 1/2)`. The
//! [`Region::interval`] and [`Region::rectangle`] constructors use that
//! anchoring, so `|lattice_sites|` equals `l` (resp. `lx * ly`) exactly and
//! no site ever falls on a box boundary. Polygon boundaries count as inside
//! (closed region) — a measure-zero choice fixed for determinism.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inner/outer radius ratio of a regular pentagram outline, `(3 - sqrt 5)/2`.
pub fn pentagram_ratio() -> f64 {
    (3.0 - 5.0_f64.sqrt()) / 2.0
}

/// Absolute tolerance for "point on polygon boundary" tests.
const BOUNDARY_EPS: f64 = 1e-12;

/// Rejection-sampling trial cap before declaring the region degenerate.
const SAMPLE_TRIAL_CAP: u64 = 1_000_000;

/// Geometric kind of a region, in its own (untransformed) frame.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// 1D window `[-1/2, l - 1/2)`, half-open.
    Interval { l: f64 },
    /// Simple polygon given by its ordered vertices (lattice units).
    Polygon { vertices: Vec<[f64; 2]> },
}

/// A connected subsystem region: a [`Shape`] rotated counterclockwise by
/// `theta` about its centroid and translated by `offset`.
#[derive(Clone, Debug)]
pub struct Region {
    shape: Shape,
    theta: f64,
    offset: Vec<f64>,
    /// Area centroid of the raw polygon (2D only).
    centroid: [f64; 2],
    /// Measure |A| (length in 1D, shoelace area in 2D), from the raw shape.
    area: f64,
    /// Transformed vertices (2D only).
    world_vertices: Vec<[f64; 2]>,
    /// World-frame axis-aligned bounding box (lo, hi).
    bbox_lo: Vec<f64>,
    bbox_hi: Vec<f64>,
}

/// A point drawn uniformly from a region.
#[derive(Clone, Debug)]
pub struct RegionSample {
    pub point: Vec<f64>,
}

impl Region {
    /// 1D interval of length `l`, anchored so it covers sites `0..l-1`.
    pub fn interval(l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidRegion(format!("interval length {l} must be positive")));
        }
        Self::build(Shape::Interval { l }, 0.0, vec![0.0])
    }

    /// Axis-aligned `lx x ly` rectangle anchored so it covers the sites
    /// `(0..lx-1) x (0..ly-1)`, i.e. spanning `[-1/2, lx-1/2] x [-1/2, ly-1/2]`.
    pub fn rectangle(lx: f64, ly: f64) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
            return Err(Error::InvalidRegion(format!(
                "rectangle sides ({lx}, {ly}) must be positive"
            )));
        }
        Self::polygon(vec![
            [-0.5, -0.5],
            [lx - 0.5, -0.5],
            [lx - 0.5, ly - 0.5],
            [-0.5, ly - 0.5],
        ])
    }

    /// Regular `q`-gon with the given circumradius, centred at the origin,
    /// first vertex pointing up (+y).
    pub fn regular_polygon(q: usize, circumradius: f64) -> Result<Self> {
        if q < 3 {
            return Err(Error::InvalidRegion(format!("regular polygon needs q >= 3, got {q}")));
        }
        if !(circumradius > 0.0) {
            return Err(Error::InvalidRegion("circumradius must be positive".into()));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        let step = std::f64::consts::TAU / q as f64;
        Self::polygon(
            (0..q)
                .map(|i| {
                    let a = half_pi + i as f64 * step;
                    [circumradius * a.cos(), circumradius * a.sin()]
                })
                .collect(),
        )
    }

    /// Star outline with `points` spikes: `2 * points` vertices alternating
    /// between the outer and inner radius, centred at the origin, first outer
    /// vertex pointing up. `r_inner` defaults to the regular-pentagram ratio
    /// when callers pass [`pentagram_ratio`]`() * r_outer`.
    pub fn star(points: usize, r_outer: f64, r_inner: f64) -> Result<Self> {
        if points < 3 {
            return Err(Error::InvalidRegion(format!("star needs >= 3 points, got {points}")));
        }
        if !(r_outer > 0.0 && r_inner > 0.0 && r_inner < r_outer) {
            return Err(Error::InvalidRegion(format!(
                "star radii must satisfy 0 < inner ({r_inner}) < outer ({r_outer})"
            )));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        let step = std::f64::consts::PI / points as f64;
        Self::polygon(
            (0..2 * points)
                .map(|i| {
                    let r = if i % 2 == 0 { r_outer } else { r_inner };
                    let a = half_pi + i as f64 * step;
                    [r * a.cos(), r * a.sin()]
                })
                .collect(),
        )
    }

    /// Simple polygon from explicit vertices.
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        validate_polygon(&vertices)?;
        Self::build(Shape::Polygon { vertices }, 0.0, vec![0.0, 0.0])
    }

    /// Rotate counterclockwise by `theta` (radians) about the centroid.
    pub fn with_rotation(mut self, theta: f64) -> Self {
        self.theta = theta;
        self.refresh();
        self
    }

    /// Translate by `offset` (must match the region dimension).
    pub fn with_offset(mut self, offset: Vec<f64>) -> Result<Self> {
        if offset.len() != self.dim() {
            return Err(Error::InvalidRegion(format!(
                "offset {offset:?} does not match region dimension {}",
                self.dim()
            )));
        }
        self.offset = offset;
        self.refresh();
        Ok(self)
    }

    fn build(shape: Shape, theta: f64, offset: Vec<f64>) -> Result<Self> {
        let mut r = Region {
            shape,
            theta,
            offset,
            centroid: [0.0, 0.0],
            area: 0.0,
            world_vertices: Vec::new(),
            bbox_lo: Vec::new(),
            bbox_hi: Vec::new(),
        };
        match &r.shape {
            Shape::Interval { l } => {
                r.area = *l;
            }
            Shape::Polygon { vertices } => {
                r.area = shoelace_area(vertices).abs();
                if r.area <= 1e-12 {
                    return Err(Error::InvalidRegion("polygon has (near-)zero area".into()));
                }
                r.centroid = polygon_centroid(vertices);
            }
        }
        r.refresh();
        Ok(r)
    }

    /// Recompute transformed vertices and the bounding box.
    fn refresh(&mut self) {
        match &self.shape {
            Shape::Interval { l } => {
                let s = self.offset[0];
                self.bbox_lo = vec![s - 0.5];
                self.bbox_hi = vec![s + l - 0.5];
                self.world_vertices.clear();
            }
            Shape::Polygon { vertices } => {
                let (sin, cos) = self.theta.sin_cos();
                let c = self.centroid;
                self.world_vertices = vertices
                    .iter()
                    .map(|v| {
                        let dx = v[0] - c[0];
                        let dy = v[1] - c[1];
                        [
                            c[0] + cos * dx - sin * dy + self.offset[0],
                            c[1] + sin * dx + cos * dy + self.offset[1],
                        ]
                    })
                    .collect();
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in &self.world_vertices {
                    for a in 0..2 {
                        lo[a] = lo[a].min(v[a]);
                        hi[a] = hi[a].max(v[a]);
                    }
                }
                self.bbox_lo = lo.to_vec();
                self.bbox_hi = hi.to_vec();
            }
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Spatial dimension: 1 for intervals, 2 for polygons.
    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Interval { .. } => 1,
            Shape::Polygon { .. } => 2,
        }
    }

    /// Measure `|A|`: length in 1D, shoelace area in 2D. Invariant under
    /// rotation and translation by construction (computed from the raw shape).
    pub fn area(&self) -> f64 {
        self.area
    }

    /// `|A|^(1/d)`: the linear scale entering the rescaled time.
    pub fn linear_scale(&self) -> f64 {
        match self.shape {
            Shape::Interval { .. } => self.area,
            Shape::Polygon { .. } => self.area.sqrt(),
        }
    }

    /// World-frame axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox_lo, &self.bbox_hi)
    }

    /// Transformed polygon vertices (empty for intervals).
    pub fn world_vertices(&self) -> &[[f64; 2]] {
        &self.world_vertices
    }

    /// Whether the polygon is convex (intervals count as convex).
    pub fn is_convex(&self) -> bool {
        match &self.shape {
            Shape::Interval { .. } => true,
            Shape::Polygon { vertices } => polygon_is_convex(vertices),
        }
    }

    /// Membership test (characteristic function of `A`). Polygon boundaries
    /// count as inside; the interval window is half-open.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Interval { l } => {
                debug_assert_eq!(x.len(), 1);
                let local = x[0] - self.offset[0];
                (-0.5..*l - 0.5).contains(&local)
            }
            Shape::Polygon { vertices } => {
                debug_assert_eq!(x.len(), 2);
                // Inverse transform into the raw-polygon frame; rotation is an
                // isometry, so the boundary tolerance is unchanged.
                let (sin, cos) = self.theta.sin_cos();
                let c = self.centroid;
                let dx = x[0] - self.offset[0] - c[0];
                let dy = x[1] - self.offset[1] - c[1];
                let local = [c[0] + cos * dx + sin * dy, c[1] - sin * dx + cos * dy];
                point_in_polygon(local, vertices)
            }
        }
    }

    /// Draw a point uniformly from the region by rejection from the bounding
    /// box. Errors with [`Error::DegenerateRegion`] after 10^6 trials.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RegionSample> {
        let d = self.dim();
        let mut point = vec![0.0; d];
        for _ in 0..SAMPLE_TRIAL_CAP {
            for a in 0..d {
                point[a] = rng.gen_range(self.bbox_lo[a]..self.bbox_hi[a]);
            }
            if self.contains(&point) {
                return Ok(RegionSample { point });
            }
        }
        Err(Error::DegenerateRegion(SAMPLE_TRIAL_CAP))
    }

    /// All lattice sites (integer coordinate vectors) inside the region, in
    /// lexicographic order.
    pub fn lattice_sites(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        let lo: Vec<i64> = (0..d).map(|a| (self.bbox_lo[a] - 0.5).floor() as i64).collect();
        let hi: Vec<i64> = (0..d).map(|a| (self.bbox_hi[a] + 0.5).ceil() as i64).collect();
        let mut out = Vec::new();
        let mut x = vec![0.0; d];
        match d {
            1 => {
                for i in lo[0]..=hi[0] {
                    x[0] = i as f64;
                    if self.contains(&x) {
                        out.push(vec![i]);
                    }
                }
            }
            2 => {
                for i in lo[0]..=hi[0] {
                    for j in lo[1]..=hi[1] {
                        x[0] = i as f64;
                        x[1] = j as f64;
                        if self.contains(&x) {
                            out.push(vec![i, j]);
                        }
                    }
                }
            }
            _ => unreachable!("regions are 1D or 2D"),
        }
        out
    }
}

/// Signed shoelace area (positive for counterclockwise vertex order).
pub(crate) fn shoelace_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

/// Area centroid of a simple polygon.
fn polygon_centroid(vertices: &[[f64; 2]]) -> [f64; 2] {
    let n = vertices.len();
    let signed = shoelace_area(vertices);
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let w = a[0] * b[1] - b[0] * a[1];
        cx += (a[0] + b[0]) * w;
        cy += (a[1] + b[1]) * w;
    }
    [cx / (6.0 * signed), cy / (6.0 * signed)]
}

fn polygon_is_convex(vertices: &[[f64; 2]]) -> bool {
    let n = vertices.len();
    let mut sign = 0.0f64;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross.abs() < 1e-14 {
            continue;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

/// Closed-region membership: boundary points (within `BOUNDARY_EPS`) are in;
/// the interior is decided by the even-odd ray-cast rule.
fn point_in_polygon(p: [f64; 2], vertices: &[[f64; 2]]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        if point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= BOUNDARY_EPS {
            return true;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x_int = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x_int {
                inside = !inside;
            }
        }
    }
    inside
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let dx = ap[0] - t * ab[0];
    let dy = ap[1] - t * ab[1];
    (dx * dx + dy * dy).sqrt()
}

/// Reject self-intersecting or degenerate vertex lists.
fn validate_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidRegion(format!("polygon needs >= 3 vertices, got {n}")));
    }
    for v in vertices {
        if !v[0].is_finite() || !v[1].is_finite() {
            return Err(Error::InvalidRegion("polygon vertex is not finite".into()));
        }
    }
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14 {
            return Err(Error::InvalidRegion("polygon has a zero-length edge".into()));
        }
    }
    // Non-adjacent edges must not properly cross.
    for i in 0..n {
        for j in (i + 1)..n {
            // skip adjacent edges (they share exactly one endpoint)
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_properly_intersect(a, b, c, d) {
                return Err(Error::InvalidRegion("polygon is self-intersecting".into()));
            }
        }
    }
    Ok(())
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_properly_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

// ---------------------------------------------------------------------------
// JSON-facing description
// ---------------------------------------------------------------------------

fn default_star_points() -> usize {
    5
}

/// Serializable region description, e.g.
/// `{"shape":"rectangle","lx":5,"ly":1,"theta":0.314}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionSpec {
    #[serde(flatten)]
    pub shape: ShapeSpec,
    #[serde(default)]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ShapeSpec {
    Interval {
        l: f64,
    },
    Rectangle {
        lx: f64,
        ly: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    RegularPolygon {
        q: usize,
        circumradius: f64,
    },
    /// `inner` defaults to the regular-pentagram ratio times `outer`.
    Star {
        #[serde(default = "default_star_points")]
        points: usize,
        outer: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner: Option<f64>,
    },
}

impl TryFrom<RegionSpec> for Region {
    type Error = Error;

    fn try_from(spec: RegionSpec) -> Result<Region> {
        let base = match spec.shape {
            ShapeSpec::Interval { l } => Region::interval(l)?,
            ShapeSpec::Rectangle { lx, ly } => Region::rectangle(lx, ly)?,
            ShapeSpec::Polygon { vertices } => Region::polygon(vertices)?,
            ShapeSpec::RegularPolygon { q, circumradius } => Region::regular_polygon(q, circumradius)?,
            ShapeSpec::Star { points, outer, inner } => {
                let inner = inner.unwrap_or(pentagram_ratio() * outer);
                Region::star(points, outer, inner)?
            }
        };
        let rotated = base.with_rotation(spec.theta);
        match spec.offset {
            Some(off) => rotated.with_offset(off),
            None => Ok(rotated),
        }
    }
}
