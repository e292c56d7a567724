//! Sample-side statistics: normalization, kernel density, ECDF and the
//! log-spaced grid used by the tail-aware KS criterion.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{SampleSet, NORMALIZED_TOL};
use crate::numeric::{linspace, map_slice, mean_square, neumaier_sum};

/// Scales samples to unit mean square.
///
/// Sets already within [`NORMALIZED_TOL`] of unit power are returned
/// unchanged, so normalizing twice is a no-op.
pub fn normalize(samples: &SampleSet) -> Result<SampleSet> {
    if samples.is_empty() {
        return Err(Error::InvalidSamples("sample set is empty"));
    }
    let ms = mean_square(&samples.values);
    if ms == 0.0 {
        return Err(Error::InvalidSamples("all samples are zero"));
    }
    let values = if (ms - 1.0).abs() <= NORMALIZED_TOL {
        samples.values.clone()
    } else {
        let scale = ms.sqrt();
        samples.values.iter().map(|v| v / scale).collect()
    };
    Ok(SampleSet {
        values,
        normalized: true,
        source: samples.source.clone(),
        seed: samples.seed,
    })
}

/// Kernel density settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KdeOptions {
    /// Number of evaluation points on `[0, 1.05 * max sample]`.
    pub grid_size: usize,
    /// Fixed bandwidth; the normal-reference rule is used when `None`.
    pub bandwidth: Option<f64>,
    /// Reflect the kernel at `r = 0`.
    pub reflect: bool,
}

impl Default for KdeOptions {
    fn default() -> Self {
        Self {
            grid_size: 500,
            bandwidth: None,
            reflect: false,
        }
    }
}

/// Sample density on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
    pub grid_size: usize,
}

impl DensityEstimate {
    /// Trapezoidal integral of the density over its grid.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    neumaier_sum(
        x.windows(2)
            .zip(y.windows(2))
            .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])),
    )
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let t = pos - lo as f64;
    sorted[lo] + t * (sorted[hi] - sorted[lo])
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Normal-reference bandwidth `sigma * (4 / (3 n))^(1/5)` with
/// `sigma = min(std, IQR / 1.349)`.
///
/// The IQR term is skipped when more than half the samples coincide (IQR = 0).
pub fn reference_bandwidth(sorted: &[f64]) -> Result<f64> {
    let n = sorted.len() as f64;
    let mean = neumaier_sum(sorted.iter().copied()) / n;
    let var = neumaier_sum(sorted.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    let std = var.sqrt();
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    let spread = if iqr > 0.0 { std.min(iqr / 1.349) } else { std };
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::InvalidSamples("samples have zero variance"));
    }
    Ok(spread * (4.0 / (3.0 * n)).powf(0.2))
}

/// Gaussian kernel beyond this many bandwidths contributes below 3e-16.
const KERNEL_CUTOFF: f64 = 8.5;

/// Gaussian kernel density estimate on `grid_size` points spanning
/// `[0, 1.05 * max sample]`.
pub fn kde(samples: &SampleSet, options: &KdeOptions) -> Result<DensityEstimate> {
    if samples.len() < 10 {
        return Err(Error::InvalidSamples("kernel density needs at least 10 samples"));
    }
    if options.grid_size < 2 {
        return Err(Error::InvalidParameter("density grid needs at least 2 points"));
    }
    let sorted = sorted_copy(&samples.values);
    let bandwidth = match options.bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(_) => return Err(Error::InvalidParameter("bandwidth must be positive")),
        None => reference_bandwidth(&sorted)?,
    };
    let max = *sorted.last().expect("non-empty");
    if max <= 0.0 {
        return Err(Error::InvalidSamples("samples have zero variance"));
    }
    let grid = linspace(0.0, 1.05 * max, options.grid_size);
    let norm = 1.0 / (sorted.len() as f64 * bandwidth * (2.0 * core::f64::consts::PI).sqrt());
    let reach = KERNEL_CUTOFF * bandwidth;
    let kernel_sum = |center: f64| -> f64 {
        let lo = sorted.partition_point(|&v| v < center - reach);
        let hi = sorted.partition_point(|&v| v <= center + reach);
        neumaier_sum(sorted[lo..hi].iter().map(|&v| {
            let u = (center - v) / bandwidth;
            (-0.5 * u * u).exp()
        }))
    };
    let density = map_slice(&grid, |&x| {
        let mut s = kernel_sum(x);
        if options.reflect {
            s += kernel_sum(-x);
        }
        s * norm
    });
    Ok(DensityEstimate {
        grid,
        density,
        bandwidth,
        grid_size: options.grid_size,
    })
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfEstimate {
    sorted: Vec<f64>,
}

impl CdfEstimate {
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Number of samples `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    /// Number of samples `< x`.
    pub fn count_lt(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.sorted.len() as f64
    }
}

/// Exact step ECDF of the samples.
pub fn ecdf(samples: &SampleSet) -> CdfEstimate {
    CdfEstimate {
        sorted: sorted_copy(&samples.values),
    }
}

/// Default density of the log-spaced KS grid.
pub const POINTS_PER_DECADE: usize = 200;

/// Log-spaced grid from the smallest positive sample to the largest sample,
/// with `round(decades * points_per_decade)` points (at least two unless the
/// range is degenerate). The ECDF is positive at every point.
pub fn log_cdf_grid(samples: &SampleSet, points_per_decade: usize) -> Result<Vec<f64>> {
    if points_per_decade == 0 {
        return Err(Error::InvalidParameter("points per decade must be >= 1"));
    }
    let min = samples
        .values
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::InvalidSamples("log grid needs positive samples"));
    }
    let max = samples.values.iter().copied().fold(0.0, f64::max);
    if max == min {
        return Ok(alloc::vec![min]);
    }
    let (lmin, lmax) = (min.log10(), max.log10());
    let count = (((lmax - lmin) * points_per_decade as f64).round() as usize).max(2);
    let mut grid: Vec<f64> = linspace(lmin, lmax, count)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect();
    grid[0] = min;
    grid[count - 1] = max;
    grid.dedup_by(|a, b| *a <= *b);
    Ok(grid)
}
