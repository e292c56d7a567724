//! Nelder–Mead simplex minimization.

#[allow(unused_imports)]
use num_traits::Float;

/// Simplex settings. Coefficients follow the standard choice
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop once every vertex is within this distance (max-norm) of the best.
    pub x_tol: f64,
    /// ... and every vertex value is within this of the best value.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            x_tol: 1e-7,
            f_tol: 1e-9,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Max-norm distance from the best vertex to the farthest one.
    pub diameter: f64,
    /// Largest value difference across the simplex.
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<const N: usize> {
    pub point: [f64; N],
    pub value: f64,
    pub diagnostics: Diagnostics,
}

/// Default initial simplex edge along each axis: 5% of the coordinate, or
/// 0.00025 for zero coordinates.
pub fn default_steps<const N: usize>(start: &[f64; N]) -> [f64; N] {
    start.map(|x| if x == 0.0 { 0.00025 } else { 0.05 * x })
}

/// Minimizes `f` from `start` using an axis-aligned initial simplex with the
/// given edge lengths. Non-finite values are treated as `+inf`.
///
/// Vertices are kept ordered with a stable sort, so ties are resolved in
/// favour of the older vertex and the result is deterministic.
pub fn nelder_mead<const N: usize, F>(
    mut f: F,
    start: [f64; N],
    steps: [f64; N],
    options: &NelderMeadOptions,
) -> Minimum<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64; N]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: alloc::vec::Vec<([f64; N], f64)> = alloc::vec::Vec::with_capacity(N + 1);
    simplex.push((start, eval(&start)));
    for i in 0..N {
        let mut x = start;
        x[i] += steps[i];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0];
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let spread = simplex[1..]
            .iter()
            .map(|(_, v)| {
                if *v == best.1 {
                    0.0
                } else {
                    (v - best.1).abs()
                }
            })
            .fold(0.0, f64::max);
        if diameter < options.x_tol && spread < options.f_tol {
            converged = true;
        }
        if converged || iterations >= options.max_iterations {
            return Minimum {
                point: best.0,
                value: best.1,
                diagnostics: Diagnostics {
                    converged,
                    iterations,
                    evaluations,
                    diameter,
                    spread,
                },
            };
        }
        iterations += 1;

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / N as f64;
            }
        }
        let (worst, f_worst) = simplex[N];
        let f_second = simplex[N - 1].1;
        let along = |t: f64| -> [f64; N] {
            let mut p = centroid;
            for i in 0..N {
                p[i] = centroid[i] + t * (centroid[i] - worst[i]);
            }
            p
        };

        let xr = along(REFLECT);
        let fr = eval(&xr);
        if fr < best.1 {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(&xe);
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[N] = (xr, fr);
            continue;
        }
        let contracted = if fr < f_worst {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(&xc);
            (fc <= fr).then_some((xc, fc))
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(&xc);
            (fc < f_worst).then_some((xc, fc))
        };
        match contracted {
            Some(v) => simplex[N] = v,
            None => {
                for vertex in simplex.iter_mut().skip(1) {
                    let mut x = vertex.0;
                    for i in 0..N {
                        x[i] = best.0[i] + SHRINK * (x[i] - best.0[i]);
                    }
                    *vertex = (x, eval(&x));
                }
            }
        }
    }
}
