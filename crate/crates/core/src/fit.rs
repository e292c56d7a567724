//! Bounded multistart fitting of `(K, Delta, mu)` under any criterion.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gof::{Criterion, Statistics};
use crate::model::ParamSet;
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Axis-aligned search box for `(K, Delta, mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolutionBox {
    pub k: [f64; 2],
    pub delta: [f64; 2],
    pub mu: [f64; 2],
}

impl Default for SolutionBox {
    fn default() -> Self {
        Self {
            k: [0.1, 45.0],
            delta: [0.0, 1.0],
            mu: [0.1, 6.0],
        }
    }
}

impl SolutionBox {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !(ok(self.k) && ok(self.delta) && ok(self.mu)) {
            return Err(Error::InvalidParameter("box edges must be finite with lower < upper"));
        }
        if self.k[0] < 0.0 || self.delta[0] < 0.0 || self.delta[1] > 1.0 || self.mu[0] <= 0.0 {
            return Err(Error::InvalidParameter("box must lie inside the valid parameter region"));
        }
        Ok(())
    }

    fn ranges(&self) -> [[f64; 2]; 3] {
        [self.k, self.delta, self.mu]
    }

    pub fn lower(&self) -> [f64; 3] {
        self.ranges().map(|r| r[0])
    }

    pub fn upper(&self) -> [f64; 3] {
        self.ranges().map(|r| r[1])
    }

    pub fn width(&self) -> [f64; 3] {
        self.ranges().map(|r| r[1] - r[0])
    }

    pub fn contains(&self, x: &[f64; 3]) -> bool {
        self.ranges().iter().zip(x).all(|(r, v)| *v >= r[0] && *v <= r[1])
    }

    /// Squared Euclidean distance from `x` to the box.
    pub fn sq_distance(&self, x: &[f64; 3]) -> f64 {
        self.ranges()
            .iter()
            .zip(x)
            .map(|(r, v)| {
                let d = if *v < r[0] {
                    r[0] - v
                } else if *v > r[1] {
                    v - r[1]
                } else {
                    0.0
                };
                d * d
            })
            .sum()
    }
}

/// `n` Latin-hypercube points in the box: each axis is cut into `n` equal
/// strata and every stratum is used exactly once.
pub fn latin_hypercube(bx: &SolutionBox, n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = alloc::vec![[0.0; 3]; n];
    let (lower, width) = (bx.lower(), bx.width());
    for axis in 0..3 {
        let mut strata: Vec<usize> = (0..n).collect();
        // Fisher–Yates
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            strata.swap(i, j);
        }
        for (p, s) in points.iter_mut().zip(strata) {
            let u: f64 = rng.random();
            p[axis] = lower[axis] + width[axis] * (s as f64 + u) / n as f64;
        }
    }
    points
}

/// Value given to points outside the box, scaled by `1 + squared distance`.
pub const BOX_PENALTY: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    pub starts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
    /// Initial simplex edge as a fraction of the box width per axis.
    pub initial_step: f64,
    /// Maximum number of simplex restarts from the best point. Restarts stop
    /// early once one improves the value by less than `polish_tol` (relative).
    pub polish: usize,
    pub polish_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            seed: 0,
            nelder_mead: NelderMeadOptions::default(),
            initial_step: 0.05,
            polish: 50,
            polish_tol: 1e-9,
        }
    }
}

/// One simplex run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StartRecord {
    pub start: [f64; 3],
    pub terminal: [f64; 3],
    /// Criterion value at the terminal point (natural orientation).
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub criterion: Criterion,
    /// Best point, with `Omega = 1`.
    pub lambda_hat: ParamSet,
    /// Criterion value at `lambda_hat`, in its natural orientation.
    pub gof_value: f64,
    pub starts: usize,
    /// True if at least one simplex run met the tolerances.
    pub converged: bool,
    /// Objective evaluations across all runs.
    pub evaluations: usize,
    pub best_start_index: usize,
    pub runs: Vec<StartRecord>,
    /// Restarts from the best point, in order.
    pub polish: Vec<StartRecord>,
}

fn to_params(x: &[f64; 3]) -> ParamSet {
    ParamSet {
        k: x[0],
        delta: x[1],
        mu: x[2],
        omega: 1.0,
    }
}

/// Minimized form of the criterion with the box penalty.
///
/// Inside the box, values that cannot be computed (or are infinite, such as
/// the PDF error when the model density has a pole on the grid) score
/// [`BOX_PENALTY`], which is still below any out-of-box point.
fn penalized(stats: &Statistics, criterion: Criterion, bx: &SolutionBox, x: &[f64; 3]) -> f64 {
    if !bx.contains(x) {
        return BOX_PENALTY * (1.0 + bx.sq_distance(x));
    }
    match stats.evaluate(criterion, &to_params(x)) {
        Ok(v) if v.is_finite() => {
            if criterion.maximize() {
                -v
            } else {
                v
            }
        }
        _ => BOX_PENALTY,
    }
}

fn run(
    stats: &Statistics,
    criterion: Criterion,
    bx: &SolutionBox,
    start: [f64; 3],
    options: &FitOptions,
) -> StartRecord {
    let steps = bx.width().map(|w| options.initial_step * w);
    // Point the initial simplex into the box from starts on an upper edge.
    let mut steps_in = steps;
    let upper = bx.upper();
    for i in 0..3 {
        if start[i] + steps[i] > upper[i] {
            steps_in[i] = -steps[i];
        }
    }
    let m = nelder_mead(
        |x| penalized(stats, criterion, bx, x),
        start,
        steps_in,
        &options.nelder_mead,
    );
    let value = if criterion.maximize() { -m.value } else { m.value };
    StartRecord {
        start,
        terminal: m.point,
        value,
        converged: m.diagnostics.converged,
        iterations: m.diagnostics.iterations,
        evaluations: m.diagnostics.evaluations,
    }
}

/// Fits `criterion` from `options.starts` Latin-hypercube starts.
pub fn fit(
    stats: &Statistics,
    criterion: Criterion,
    bx: &SolutionBox,
    options: &FitOptions,
) -> Result<FitResult> {
    if options.starts == 0 {
        return Err(Error::InvalidParameter("at least one start is required"));
    }
    bx.validate()?;
    let starts = latin_hypercube(bx, options.starts, options.seed);
    fit_from(stats, criterion, bx, &starts, options)
}

/// Fits `criterion` from explicit starting points (each inside the box).
pub fn fit_from(
    stats: &Statistics,
    criterion: Criterion,
    bx: &SolutionBox,
    starts: &[[f64; 3]],
    options: &FitOptions,
) -> Result<FitResult> {
    bx.validate()?;
    if starts.is_empty() {
        return Err(Error::InvalidParameter("at least one start is required"));
    }
    if starts.iter().any(|s| !bx.contains(s)) {
        return Err(Error::InvalidParameter("start point outside the box"));
    }
    let runs = crate::numeric::map_slice(starts, |&s| run(stats, criterion, bx, s, options));

    // Best terminal point; ties go to the lowest start index.
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        if better(criterion, r.value, runs[best].value) {
            best = i;
        }
    }
    let mut point = runs[best].terminal;
    let mut value = runs[best].value;
    let mut evaluations: usize = runs.iter().map(|r| r.evaluations).sum();
    let mut converged = runs.iter().any(|r| r.converged);
    let mut polish = Vec::new();
    while polish.len() < options.polish && bx.contains(&point) && value.is_finite() {
        let p = run(stats, criterion, bx, point, options);
        evaluations += p.evaluations;
        converged |= p.converged;
        polish.push(p);
        if !better(criterion, p.value, value) {
            break;
        }
        let gain = (p.value - value).abs() / value.abs().max(f64::MIN_POSITIVE);
        point = p.terminal;
        value = p.value;
        if gain <= options.polish_tol {
            break;
        }
    }

    let lambda_hat = to_params(&point);
    let gof_value = stats.evaluate(criterion, &lambda_hat)?;
    debug_assert!(
        !value.is_finite() || (gof_value - value).abs() <= 1e-12 * value.abs().max(1.0),
        "re-evaluation drifted"
    );
    Ok(FitResult {
        criterion,
        lambda_hat,
        gof_value,
        starts: starts.len(),
        converged,
        evaluations,
        best_start_index: best,
        runs,
        polish,
    })
}

/// Strict improvement, with infeasible (non-finite) values always losing.
fn better(criterion: Criterion, a: f64, b: f64) -> bool {
    match (a.is_finite(), b.is_finite()) {
        (true, false) => true,
        (false, _) => false,
        (true, true) => criterion.better(a, b),
    }
}
