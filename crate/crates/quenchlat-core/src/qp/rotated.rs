//! Exact coverage areas for translated copies of one rotated rectangle,
//! computed in the rectangle's own frame.
//!
//! All copies are translates of the *same* rectangle, so in the frame where
//! the rectangle is axis-aligned every intersection of copies is itself an
//! axis-aligned rectangle: for a subset `T` with frame-rotated displacements
//! `w_i`,
//!
//! `I_T = (lx - spanx(T))+ * (ly - spany(T))+`,
//!
//! where `spanx(T) = max_i w_i.x - min_i w_i.x` over `i` in `T` and `(..)+`
//! clamps at zero. Inclusion-exclusion over these products then yields the
//! exact area covered by *exactly* each subset, in closed form, for any
//! rotation angle and any displacement pattern. [`rect_mask_areas`] is the
//! production path for rotated rectangles; the independent polygon-clipping
//! evaluation ([`crate::qp::clip`]) serves as a cross-check.
//!
//! [`PairOverlapLengths`] exposes the eight conventional overlap factors of
//! the four-copy `(+-hx, +-hy)` pattern on the unit square — each pairwise
//! intersection is a product of two of them — for reference and tests.

use crate::entropy::ModeMask;

/// Step function with `H(0) = 0`.
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Positive part, `G(x) = x * H(x)`.
pub fn ramp(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Direction angle `atan(sin k1 / sin k2)` of a diagonal displacement.
pub fn psi(k1: f64, k2: f64) -> f64 {
    (k1.sin() / k2.sin()).atan()
}

/// Speed `sqrt(sin^2 k1 + sin^2 k2)` of a diagonal displacement (unit
/// per-axis velocity scale).
pub fn speed(k1: f64, k2: f64) -> f64 {
    k1.sin().hypot(k2.sin())
}

/// Exact per-mask coverage areas for translated copies of an `lx x ly`
/// rectangle rotated by `theta`.
///
/// `translations[i]` is the lab-frame displacement of copy `i`; the result
/// is indexed by mask bits over the same copy order (entry 0, the area
/// covered by no copy, is 0 by convention). Supports up to 16 copies.
pub fn rect_mask_areas(
    lx: f64,
    ly: f64,
    theta: f64,
    translations: &[[f64; 2]],
) -> Vec<f64> {
    let n = translations.len();
    assert!(n >= 1 && n <= 16, "rect_mask_areas supports 1..=16 copies, got {n}");
    let (sin, cos) = theta.sin_cos();
    // displacements rotated into the rectangle frame
    let w: Vec<[f64; 2]> = translations
        .iter()
        .map(|d| [cos * d[0] + sin * d[1], -sin * d[0] + cos * d[1]])
        .collect();

    let full = (1usize << n) - 1;
    let mut inter = vec![0.0f64; 1 << n];
    for t_mask in 1..=full {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (i, wi) in w.iter().enumerate() {
            if t_mask >> i & 1 == 1 {
                for axis in 0..2 {
                    lo[axis] = lo[axis].min(wi[axis]);
                    hi[axis] = hi[axis].max(wi[axis]);
                }
            }
        }
        inter[t_mask] = ramp(lx - (hi[0] - lo[0])) * ramp(ly - (hi[1] - lo[1]));
    }

    // Moebius inversion: exact(M) = sum_{T >= M} (-1)^{|T|-|M|} I_T
    let mut exact = vec![0.0f64; 1 << n];
    for m in 1..=full {
        let free = full & !m;
        let mut acc = 0.0;
        let mut extra = free;
        loop {
            let sign = if extra.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * inter[m | extra];
            if extra == 0 {
                break;
            }
            extra = (extra.wrapping_sub(1)) & free;
        }
        exact[m] = acc.max(0.0);
    }
    exact
}

/// The eight conventional overlap factors of the symmetric four-copy
/// pattern on the *unit* square: copies displaced by `(+-hx, +-hy)` (copy
/// order `(+,+), (+,-), (-,+), (-,-)`, matching the flat mode order of a
/// 2x2 cell), square rotated by `theta`.
///
/// Each factor is a clamped overlap length along one side of the square in
/// its own frame, and each *pairwise* copy intersection is an exact product
/// of two factors:
///
/// * `a * b` — the two pairs separated along lab-x (`{0,2}` and `{1,3}`);
/// * `c * d` — the two pairs separated along lab-y (`{0,1}` and `{2,3}`);
/// * `e * f` — the diagonal pair `{0,3}`;
/// * `g * h` — the antidiagonal pair `{1,2}`.
///
/// Higher-order intersections are *not* simple products of these factors;
/// use [`rect_mask_areas`] for exact full-mask areas.
#[derive(Clone, Copy, Debug)]
pub struct PairOverlapLengths {
    /// Side-x overlap of an x-separated pair: `G(1 - 2 hx cos theta)`.
    pub a: f64,
    /// Side-y overlap of an x-separated pair: `G(1 - 2 hx sin theta)`.
    pub b: f64,
    /// Side-y overlap of a y-separated pair: `G(1 - 2 hy cos theta)`.
    pub c: f64,
    /// Side-x overlap of a y-separated pair: `G(1 - 2 hy sin theta)`.
    pub d: f64,
    /// Side-x overlap of the diagonal pair: `G(1 - 2 rho cos(psi - theta))`.
    pub e: f64,
    /// Side-y overlap of the diagonal pair: `G(1 - 2 rho |sin(psi - theta)|)`.
    pub f: f64,
    /// Side-y overlap of the antidiagonal pair: `G(1 - 2 rho sin(psi + theta))`.
    pub g: f64,
    /// Side-x overlap of the antidiagonal pair: `G(1 - 2 rho |cos(psi + theta)|)`.
    pub h: f64,
}

impl PairOverlapLengths {
    /// Factors for half-displacements `(hx, hy)` (both `>= 0`) and rotation
    /// `theta`; `rho = hypot(hx, hy)` and `psi = atan2(hy, hx)`.
    pub fn new(theta: f64, hx: f64, hy: f64) -> Self {
        let rho = hx.hypot(hy);
        let psi = hy.atan2(hx);
        let (sin, cos) = theta.sin_cos();
        PairOverlapLengths {
            a: ramp(1.0 - 2.0 * hx * cos),
            b: ramp(1.0 - 2.0 * hx * sin),
            c: ramp(1.0 - 2.0 * hy * cos),
            d: ramp(1.0 - 2.0 * hy * sin),
            e: ramp(1.0 - 2.0 * rho * (psi - theta).cos()),
            f: ramp(1.0 - 2.0 * rho * (psi - theta).sin().abs()),
            g: ramp(1.0 - 2.0 * rho * (psi + theta).sin()),
            h: ramp(1.0 - 2.0 * rho * (psi + theta).cos().abs()),
        }
    }

    /// The six pairwise intersection areas, keyed by copy-pair mask.
    pub fn pair_intersections(&self) -> [(ModeMask, f64); 6] {
        [
            (ModeMask::from_indices(&[0, 2]), self.a * self.b),
            (ModeMask::from_indices(&[1, 3]), self.a * self.b),
            (ModeMask::from_indices(&[0, 1]), self.c * self.d),
            (ModeMask::from_indices(&[2, 3]), self.c * self.d),
            (ModeMask::from_indices(&[0, 3]), self.e * self.f),
            (ModeMask::from_indices(&[1, 2]), self.g * self.h),
        ]
    }

    /// The symmetric four-copy displacement pattern these factors describe.
    pub fn translations(hx: f64, hy: f64) -> [[f64; 2]; 4] {
        [[hx, hy], [hx, -hy], [-hx, hy], [-hx, -hy]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qp::clip::{clip_convex, exact_mask_areas, polygon_area};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rotated_rect(lx: f64, ly: f64, theta: f64) -> Vec<[f64; 2]> {
        let (s, c) = theta.sin_cos();
        [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
            .iter()
            .map(|v| {
                let (x, y) = (v[0] * lx, v[1] * ly);
                [c * x - s * y, s * x + c * y]
            })
            .collect()
    }

    #[test]
    fn matches_polygon_clipping() {
        // product-form and clipping are independent algorithms; they must
        // agree to machine precision on every mask
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let lx = rng.gen_range(0.5..3.0);
            let ly = rng.gen_range(0.5..3.0);
            let theta = rng.gen_range(-0.9..0.9);
            let translations: Vec<[f64; 2]> = (0..4)
                .map(|_| [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)])
                .collect();
            let product = rect_mask_areas(lx, ly, theta, &translations);
            let clipped = exact_mask_areas(&rotated_rect(lx, ly, theta), &translations);
            for bits in 1..16usize {
                assert_abs_diff_eq!(product[bits], clipped[bits], epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn conservation_and_zero_time() {
        let translations = PairOverlapLengths::translations(0.3, 0.7);
        let areas = rect_mask_areas(2.0, 1.0, 0.5, &translations);
        let coverage: f64 = areas
            .iter()
            .enumerate()
            .map(|(bits, &a)| bits.count_ones() as f64 * a)
            .sum();
        assert_abs_diff_eq!(coverage, 4.0 * 2.0, epsilon = 1e-12);

        let still = rect_mask_areas(2.0, 1.0, 0.5, &[[0.0; 2]; 4]);
        assert_abs_diff_eq!(still[0b1111], 2.0, epsilon = 1e-15);
        assert!(still[1..0b1111].iter().all(|&a| a == 0.0));
    }

    #[test]
    fn aligned_limit_is_separable() {
        // at theta = 0 the coverage factorizes per axis
        let (hx, hy) = (0.31, 0.18);
        let areas =
            rect_mask_areas(1.0, 1.0, 0.0, &PairOverlapLengths::translations(hx, hy));
        let (x_only, x_both) = ((2.0 * hx).min(1.0), (1.0 - 2.0 * hx).max(0.0));
        let (y_only, y_both) = ((2.0 * hy).min(1.0), (1.0 - 2.0 * hy).max(0.0));
        assert_abs_diff_eq!(areas[0b0001], x_only * y_only, epsilon = 1e-12);
        assert_abs_diff_eq!(areas[0b0101], x_both * y_only, epsilon = 1e-12);
        assert_abs_diff_eq!(areas[0b0011], x_only * y_both, epsilon = 1e-12);
        assert_abs_diff_eq!(areas[0b1111], x_both * y_both, epsilon = 1e-12);
        // diagonal pairs are impossible when aligned
        assert_eq!(areas[0b1001], 0.0);
        assert_eq!(areas[0b0110], 0.0);
    }

    #[test]
    fn pair_factors_match_direct_pair_intersections() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let theta = rng.gen_range(0.0..std::f64::consts::FRAC_PI_4);
            let hx = rng.gen_range(0.0..0.8);
            let hy = rng.gen_range(0.0..0.8);
            let factors = PairOverlapLengths::new(theta, hx, hy);
            let translations = PairOverlapLengths::translations(hx, hy);
            let base = rotated_rect(1.0, 1.0, theta);
            for (mask, expected) in factors.pair_intersections() {
                let idx = mask.indices();
                let copy_a: Vec<[f64; 2]> = base
                    .iter()
                    .map(|v| {
                        [v[0] + translations[idx[0]][0], v[1] + translations[idx[0]][1]]
                    })
                    .collect();
                let copy_b: Vec<[f64; 2]> = base
                    .iter()
                    .map(|v| {
                        [v[0] + translations[idx[1]][0], v[1] + translations[idx[1]][1]]
                    })
                    .collect();
                let direct = polygon_area(&clip_convex(&copy_a, &copy_b));
                assert_abs_diff_eq!(expected, direct, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn step_and_ramp_conventions() {
        assert_eq!(heaviside(0.0), 0.0);
        assert_eq!(heaviside(1e-300), 1.0);
        assert_eq!(ramp(-0.5), 0.0);
        assert_eq!(ramp(0.5), 0.5);
        // direction helpers
        assert_abs_diff_eq!(psi(0.4, 0.4), std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(
            speed(std::f64::consts::FRAC_PI_2, 0.0),
            1.0,
            epsilon = 1e-12
        );
    }
}
