//! Exact intersection areas of translated convex polygons, and per-mask
//! coverage areas via inclusion–exclusion.
//!
//! For a convex region `A` and mode translation vectors `u_i`, the measure
//! of the set covered by exactly the copies in a mask `M` is
//! `area(M) = Σ_{T ⊇ M} (−1)^{|T|−|M|} I_T`, where
//! `I_T = |∩_{i∈T} (A + u_i)|` is an intersection of convex translates,
//! computed by iterated half-plane clipping. This is exact up to floating
//! point, for any translation pattern — no case analysis.

use crate::region::shoelace_area;

/// Clip `subject` against the half-plane on the left of the directed edge
/// `a -> b` (Sutherland–Hodgman step).
fn clip_halfplane(subject: &[[f64; 2]], a: [f64; 2], b: [f64; 2]) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(subject.len() + 1);
    let n = subject.len();
    let side = |p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    for i in 0..n {
        let cur = subject[i];
        let nxt = subject[(i + 1) % n];
        let sc = side(cur);
        let sn = side(nxt);
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0) {
            let t = sc / (sc - sn);
            out.push([cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])]);
        }
    }
    out
}

/// Intersection of two convex polygons, both in counterclockwise order.
pub fn clip_convex(subject: &[[f64; 2]], clipper: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut poly = subject.to_vec();
    let n = clipper.len();
    for i in 0..n {
        if poly.len() < 3 {
            return Vec::new();
        }
        poly = clip_halfplane(&poly, clipper[i], clipper[(i + 1) % n]);
    }
    if poly.len() < 3 {
        Vec::new()
    } else {
        poly
    }
}

pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        0.0
    } else {
        shoelace_area(poly).abs()
    }
}

fn translate(poly: &[[f64; 2]], u: [f64; 2]) -> Vec<[f64; 2]> {
    poly.iter().map(|v| [v[0] + u[0], v[1] + u[1]]).collect()
}

/// Areas of exact-mask coverage for `n <= 8` translated copies of a convex
/// counterclockwise polygon. Entry `m` of the result is the area covered by
/// exactly the copies in mask `m`; entry 0 is zero.
pub fn exact_mask_areas(base: &[[f64; 2]], translations: &[[f64; 2]]) -> Vec<f64> {
    let n = translations.len();
    debug_assert!((1..=8).contains(&n));
    let full = 1usize << n;
    // I_T for every nonempty subset, building each intersection polygon from
    // the subset with its highest mode removed.
    let mut polys: Vec<Vec<[f64; 2]>> = vec![Vec::new(); full];
    let mut inter = vec![0.0; full];
    for t in 1..full {
        let hi = usize::BITS as usize - 1 - t.leading_zeros() as usize;
        let rest = t & !(1 << hi);
        let copy_hi = translate(base, translations[hi]);
        polys[t] = if rest == 0 {
            copy_hi
        } else if polys[rest].is_empty() {
            Vec::new()
        } else {
            clip_convex(&polys[rest], &copy_hi)
        };
        inter[t] = polygon_area(&polys[t]);
    }
    // Moebius inversion: area(M) = sum over supersets T of M of
    // (-1)^(|T|-|M|) I_T.
    let mut areas = vec![0.0; full];
    for m in 1..full {
        let free = !m & (full - 1);
        // enumerate subsets of the free bits
        let mut extra = free;
        let mut acc = 0.0;
        loop {
            let t = m | extra;
            let sign = if (extra as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * inter[t];
            if extra == 0 {
                break;
            }
            extra = (extra - 1) & free;
        }
        // tiny negative values are floating-point cancellation noise
        debug_assert!(acc > -1e-9 * (1.0 + inter[m]));
        areas[m] = acc.max(0.0);
    }
    areas
}
