//! Shape-preserving piecewise-cubic Hermite interpolation on uniform grids.
//!
//! Node slopes come from fourth-order finite differences and are then passed
//! through Hyman's monotonicity filter: where the data are strictly monotone
//! over the two cells on each side of a node, its slope is clipped into the
//! Fritsch–Carlson region, so the interpolant is monotone there. Within two
//! cells of an extremum the high-order slope is kept; clipping against the
//! near-zero secants at a peak would otherwise cost two orders of accuracy.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Filtered node slopes for `values` sampled `step` apart (at least 5 nodes).
pub fn monotone_slopes(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least 5 nodes");
    let y = values;
    let inv = 1.0 / (12.0 * step);
    let mut slopes: Vec<f64> = (0..n)
        .map(|k| match k {
            0 => (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * inv,
            1 => (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * inv,
            k if k == n - 2 => {
                (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) * inv
            }
            k if k == n - 1 => {
                (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5])
                    * inv
            }
            k => (-y[k + 2] + 8.0 * y[k + 1] - 8.0 * y[k - 1] + y[k - 2]) * inv,
        })
        .collect();
    let secant = |k: usize| (y[k + 1] - y[k]) / step;
    let secants: Vec<f64> = (0..n - 1).map(secant).collect();
    for (k, m) in slopes.iter_mut().enumerate() {
        // Secants of the two cells on each side of node k.
        let lo = k.saturating_sub(2);
        let hi = (k + 2).min(n - 1);
        let window = &secants[lo..hi];
        let d = if k > 0 { secants[k - 1] } else { secants[0] };
        if window.iter().any(|s| s * d < 0.0) {
            // Extremum nearby: keep the high-order slope.
            continue;
        }
        let adjacent = &secants[k.saturating_sub(1)..(k + 1).min(n - 1)];
        let bound = adjacent.iter().fold(f64::INFINITY, |b, s| b.min(s.abs()));
        if *m * d <= 0.0 {
            *m = 0.0;
        } else if m.abs() > 3.0 * bound {
            *m = 3.0 * bound * d.signum();
        }
    }
    slopes
}

/// Cubic Hermite basis weights `(h00, h10, h01, h11)` at `t` in `[0, 1]`.
#[inline]
pub fn hermite_basis(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    ]
}

/// Hermite cubic through `(0, y0)`, `(1, y1)` with slopes already scaled by
/// the cell width.
#[inline]
pub fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let [h00, h10, h01, h11] = hermite_basis(t);
    h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
}
