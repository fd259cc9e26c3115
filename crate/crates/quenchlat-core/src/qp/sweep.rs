//! 1D coverage primitives: exact per-mask lengths for a set of translated
//! copies of an interval, and exact momentum-cell integrals of clamped sine
//! lengths.

/// Per-mask coverage lengths of `n` copies of the interval `[0, l)`
/// translated to start at `starts[i]`.
///
/// Returns a dense vector indexed by mask bits (`len 2^n`): entry `m` is the
/// measure of the set of points covered by exactly the copies in `m`. The
/// empty mask's entry stays zero (the uncovered region is unbounded and
/// never weighted).
pub(crate) fn interval_cover(starts: &[f64], l: f64) -> Vec<f64> {
    let n = starts.len();
    debug_assert!(n <= 16);
    let mut bounds: Vec<f64> = Vec::with_capacity(2 * n);
    for &s in starts {
        bounds.push(s);
        bounds.push(s + l);
    }
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut lens = vec![0.0; 1 << n];
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let mut mask = 0usize;
        for (i, &s) in starts.iter().enumerate() {
            if s <= mid && mid < s + l {
                mask |= 1 << i;
            }
        }
        lens[mask] += b - a;
    }
    lens
}

/// Exact `∫_{p0}^{p1} min(c sin p, l) dp` for `[p0, p1] ⊂ [0, pi]`,
/// `c >= 0`, `l > 0`: the clamped-sine antiderivative, split at the
/// crossings `sin p = l/c`.
pub(crate) fn int_min_csin(c: f64, l: f64, p0: f64, p1: f64) -> f64 {
    debug_assert!(p0 >= -1e-12 && p1 <= std::f64::consts::PI + 1e-12 && p1 >= p0);
    let mut cuts = [p0, p1, p1, p1];
    let mut ncuts = 2;
    if c > l {
        let s = (l / c).asin();
        for q in [s, std::f64::consts::PI - s] {
            if q > p0 && q < p1 {
                cuts[ncuts] = q;
                ncuts += 1;
            }
        }
        cuts[..ncuts].sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    let mut acc = 0.0;
    for w in cuts[..ncuts].windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        if c * mid.sin() < l {
            acc += c * (a.cos() - b.cos());
        } else {
            acc += l * (b - a);
        }
    }
    acc
}

/// Exact `∫_{p0}^{p1} (l − c sin p)_+ dp` (the companion of [`int_min_csin`]
/// via `(l − x)_+ = l − min(x, l)`).
pub(crate) fn int_pos_l_minus_csin(c: f64, l: f64, p0: f64, p1: f64) -> f64 {
    l * (p1 - p0) - int_min_csin(c, l, p0, p1)
}
