//! Closed-form entropy density for axis-aligned rectangles with
//! momentum-independent contributions.
//!
//! For a rectangle, every per-momentum area factor reduces to clamped sine
//! lengths whose momentum average has an elementary antiderivative. The
//! whole quadrature collapses to the scalar function
//! `f(z) = (1/pi) ∫_0^{pi/2} min(z sin u, 1) du`,
//! evaluated at the two per-axis rescaled times.

use std::f64::consts::PI;

/// `f(z) = (1/pi) ∫_0^{pi/2} min(z sin u, 1) du`, the mean clamped-sine
/// coverage entering the rectangle closed form.
///
/// Piecewise: `z/pi` for `0 <= z <= 1`, and
/// `1/2 - asin(1/z)/pi + (z - sqrt(z^2-1))/pi` for `z > 1`. The two branches
/// meet at `f(1) = 1/pi` with a continuous first derivative; the second
/// derivative jumps, which is the origin of the kinks in the entropy curve.
pub fn f_cover(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z <= 1.0 {
        z / PI
    } else {
        0.5 - (1.0 / z).asin() / PI + (z - (z * z - 1.0).sqrt()) / PI
    }
}

/// Entropy density `S_A/|A|` of an axis-aligned rectangle with aspect ratio
/// `r = l_x / l_y`, at rescaled time `zeta = 2 v_max t / sqrt(l_x l_y)`, for
/// momentum-independent contributions:
/// `s1` for single-mode regions, `s2` for the mode pair differing along x,
/// `s3` for the pair differing along y.
///
/// Returns
/// `4 f(z√r) f(z/√r) s1 + f(z√r)(1 − 2 f(z/√r)) s2 + (1 − 2 f(z√r)) f(z/√r) s3`.
pub fn closed_form_rectangle(s1: f64, s2: f64, s3: f64, r: f64, zeta: f64) -> f64 {
    debug_assert!(r > 0.0);
    let fa = f_cover(zeta * r.sqrt());
    let fb = f_cover(zeta / r.sqrt());
    4.0 * fa * fb * s1 + fa * (1.0 - 2.0 * fb) * s2 + (1.0 - 2.0 * fa) * fb * s3
}

/// Numerical reference for `f_cover` (midpoint rule), used in tests.
#[cfg(test)]
fn f_cover_quadrature(z: f64, n: usize) -> f64 {
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) * h;
            (z * u.sin()).min(1.0)
        })
        .sum::<f64>()
        * h
        / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn f_cover_branches() {
        assert_eq!(f_cover(0.0), 0.0);
        assert_abs_diff_eq!(f_cover(1.0), 1.0 / PI, epsilon = 1e-15);
        // continuity across the branch point
        assert_abs_diff_eq!(f_cover(1.0 + 1e-12), 1.0 / PI, epsilon = 1e-9);
        // first derivative continuous at z=1 (both sides ~ 1/pi)
        let h = 1e-6;
        let left = (f_cover(1.0) - f_cover(1.0 - h)) / h;
        let right = (f_cover(1.0 + h) - f_cover(1.0)) / h;
        assert_abs_diff_eq!(left, 1.0 / PI, epsilon = 1e-6);
        assert_abs_diff_eq!(right, 1.0 / PI, epsilon = 1e-3);
        // large-z limit 1/2
        assert_abs_diff_eq!(f_cover(1e8), 0.5, epsilon = 1e-7);
    }

    #[test]
    fn f_cover_matches_quadrature() {
        for &z in &[0.1, 0.5, 0.99, 1.5, 3.0, 10.0] {
            assert_abs_diff_eq!(f_cover(z), f_cover_quadrature(z, 200_000), epsilon = 1e-9);
        }
    }

    #[test]
    fn closed_form_limits() {
        let ln2 = (2.0f64).ln();
        assert_eq!(closed_form_rectangle(ln2, 0.5, 0.7, 2.0, 0.0), 0.0);
        // zeta -> infinity: f -> 1/2, density -> s1
        assert_abs_diff_eq!(
            closed_form_rectangle(ln2, 0.5, 0.7, 2.0, 1e8),
            ln2,
            epsilon = 1e-6
        );
    }

    #[test]
    fn closed_form_aspect_symmetry() {
        // swapping the axes swaps the pair contributions and inverts r
        for &zeta in &[0.3, 0.9, 1.7, 4.0] {
            let a = closed_form_rectangle(0.6, 0.2, 0.9, 5.0, zeta);
            let b = closed_form_rectangle(0.6, 0.9, 0.2, 0.2, zeta);
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }
}
