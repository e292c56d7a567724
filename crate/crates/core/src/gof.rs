//! Goodness-of-fit criteria: mean log-likelihood, PDF mean-square error,
//! resistor-average distance and the log-domain Kolmogorov–Smirnov distance.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::density::{LogPdfTable, Mtw, LOG_PDF_TABLE_NODES};
use crate::empirical::{self, CdfEstimate, DensityEstimate, KdeOptions};
use crate::error::{Error, Result};
use crate::interp::hermite_basis;
use crate::model::{ParamSet, SampleSet};
use crate::numeric::{map_slice, neumaier_sum};

/// The four fitting criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Criterion {
    Ml,
    Mse,
    Rad,
    Ks,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::Ml, Criterion::Mse, Criterion::Rad, Criterion::Ks];

    /// ML is maximized, the three distances are minimized.
    pub fn maximize(self) -> bool {
        self == Criterion::Ml
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Ml => "ML",
            Criterion::Mse => "MSE",
            Criterion::Rad => "RAD",
            Criterion::Ks => "KS",
        }
    }

    /// Column header of the metric this criterion optimizes.
    pub fn metric_name(self) -> &'static str {
        match self {
            Criterion::Ml => "L",
            Criterion::Mse => "eps_MSE",
            Criterion::Rad => "eps_RAD",
            Criterion::Ks => "eps_KS",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// True when `a` is a better value than `b` for this criterion.
    pub fn better(self, a: f64, b: f64) -> bool {
        if self.maximize() {
            a > b
        } else {
            a < b
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ml" | "llm" => Ok(Criterion::Ml),
            "mse" => Ok(Criterion::Mse),
            "rad" => Ok(Criterion::Rad),
            "ks" => Ok(Criterion::Ks),
            _ => Err(Error::InvalidParameter("unknown criterion (expected ML, MSE, RAD or KS)")),
        }
    }
}

/// Floor applied to model values before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-300;

/// `(1/K) sum (a_k - b_k)^2`.
pub fn mse_values(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    neumaier_sum(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y))) / a.len() as f64
}

/// Directed divergence `(1/K) sum p_k ln(p_k / q_k)` on a shared grid.
///
/// Terms with `p_k = 0` contribute nothing; `q_k` is floored at
/// [`PROB_FLOOR`].
pub fn kld(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    neumaier_sum(p.iter().zip(q).map(|(&pk, &qk)| {
        if pk == 0.0 {
            0.0
        } else {
            pk * (pk / qk.max(PROB_FLOOR)).ln()
        }
    })) / p.len() as f64
}

/// Resistor-average distance `(1/D(p||q) + 1/D(q||p))^-1`.
///
/// Zero when either directed divergence is zero. Grid densities need not sum
/// to one, so a directed divergence can come out negative; such pairs (and
/// non-finite ones) are reported as `+inf`, which keeps the fitter away from
/// them.
pub fn rad_values(p: &[f64], q: &[f64]) -> f64 {
    let d1 = kld(p, q);
    let d2 = kld(q, p);
    if d1 == 0.0 || d2 == 0.0 {
        return 0.0;
    }
    if !(d1 > 0.0 && d2 > 0.0 && d1.is_finite() && d2.is_finite()) {
        return f64::INFINITY;
    }
    d1 * d2 / (d1 + d2)
}

/// `max_k |log10 a_k - log10 max(b_k, floor)|`; `a` must be positive.
pub fn ks_log_values(empirical: &[f64], model: &[f64]) -> f64 {
    debug_assert_eq!(empirical.len(), model.len());
    empirical
        .iter()
        .zip(model)
        .map(|(&e, &m)| (e.log10() - m.max(PROB_FLOOR).log10()).abs())
        .fold(0.0, f64::max)
}

/// Mean log-likelihood of a fixed sample, reusable across parameter sets.
///
/// Large samples are scored through a [`LogPdfTable`] whose node positions
/// depend only on the sample maximum. The Hermite basis weights of every
/// sample are therefore accumulated per node once, and each evaluation costs
/// one table build plus a dot product instead of a pass over the data.
#[derive(Debug, Clone)]
pub struct LogLikelihood {
    values: Vec<f64>,
    table: Option<Aggregated>,
}

#[derive(Debug, Clone)]
struct Aggregated {
    upper: f64,
    nodes: usize,
    value_weights: Vec<f64>,
    slope_weights: Vec<f64>,
    /// Sum of `ln x` over the interpolated samples.
    sum_ln: f64,
    /// Smallest interpolated sample.
    min_x: f64,
    /// Samples at zero or beyond the table, evaluated directly.
    direct: Vec<f64>,
}

/// Interpolated log-densities below this value may hit the floor, which the
/// aggregated sum cannot represent; such candidates are scored per sample.
const AGGREGATE_SAFE_LOG_PDF: f64 = -700.0;

impl LogLikelihood {
    pub fn new(values: &[f64]) -> Result<Self> {
        Self::with_nodes(values, LOG_PDF_TABLE_NODES)
    }

    pub fn with_nodes(values: &[f64], nodes: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSamples("sample set is empty"));
        }
        if values.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidSamples("samples must be finite and non-negative"));
        }
        if values.len() < 2 * nodes || nodes < 5 {
            return Ok(Self {
                values: values.to_vec(),
                table: None,
            });
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        let upper = 1.05 * max.max(f64::MIN_POSITIVE);
        let step = upper / (nodes - 1) as f64;
        let mut value_weights = alloc::vec![0.0; nodes];
        let mut slope_weights = alloc::vec![0.0; nodes];
        let mut direct = Vec::new();
        let mut logs = Vec::with_capacity(values.len());
        let mut min_x = f64::INFINITY;
        // Mirrors LogPdfTable::eval.
        for &x in values {
            if x <= 0.0 || x >= upper {
                direct.push(x);
                continue;
            }
            let cell = x / step;
            let k = (cell.floor() as usize).min(nodes - 2);
            let [h00, h10, h01, h11] = hermite_basis(cell - k as f64);
            value_weights[k] += h00;
            value_weights[k + 1] += h01;
            slope_weights[k] += h10 * step;
            slope_weights[k + 1] += h11 * step;
            logs.push(x.ln());
            min_x = min_x.min(x);
        }
        Ok(Self {
            values: values.to_vec(),
            table: Some(Aggregated {
                upper,
                nodes,
                value_weights,
                slope_weights,
                sum_ln: neumaier_sum(logs),
                min_x,
                direct,
            }),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(1/n) sum ln f(r_i; params)` with densities floored per `log_pdf`.
    pub fn mean(&self, params: &ParamSet) -> Result<f64> {
        let model = Mtw::new(*params)?;
        let n = self.values.len() as f64;
        let Some(agg) = &self.table else {
            return Ok(neumaier_sum(map_slice(&self.values, |&x| model.ln_pdf(x))) / n);
        };
        let power = model.origin_power();
        let table = LogPdfTable::new(model, agg.upper, agg.nodes)?;
        let step = table.step();
        let used = |k: usize| agg.value_weights[k] != 0.0 || agg.slope_weights[k] != 0.0;
        let lowest = (0..agg.nodes)
            .filter(|&k| used(k))
            .map(|k| table.values()[k] + power * (k as f64 * step).max(agg.min_x).min(agg.upper).ln())
            .fold(f64::INFINITY, f64::min);
        if !(lowest > AGGREGATE_SAFE_LOG_PDF) {
            return Ok(neumaier_sum(self.values.iter().map(|&x| table.eval(x))) / n);
        }
        let interpolated = (0..agg.nodes)
            .filter(|&k| used(k))
            .map(|k| table.values()[k] * agg.value_weights[k] + table.slopes()[k] * agg.slope_weights[k]);
        let direct = agg.direct.iter().map(|&x| table.model().ln_pdf(x));
        let total = neumaier_sum(interpolated.chain(direct).chain(core::iter::once(power * agg.sum_ln)));
        Ok(total / n)
    }
}

/// Mean log-likelihood of `samples` under `params`.
pub fn llm(samples: &SampleSet, params: &ParamSet) -> Result<f64> {
    LogLikelihood::new(&samples.values)?.mean(params)
}

/// PDF mean-square error on the density estimate's grid.
pub fn mse(dens: &DensityEstimate, params: &ParamSet) -> Result<f64> {
    let model = crate::density::pdf(params, &dens.grid)?;
    Ok(mse_values(&dens.density, &model))
}

/// Resistor-average distance between the density estimate and the model.
pub fn rad(dens: &DensityEstimate, params: &ParamSet) -> Result<f64> {
    let model = crate::density::pdf(params, &dens.grid)?;
    Ok(rad_values(&model, &dens.density))
}

/// Log-domain KS distance on a grid where the ECDF is positive.
pub fn ks_log(cdf: &CdfEstimate, params: &ParamSet, grid: &[f64]) -> Result<f64> {
    let empirical: Vec<f64> = grid.iter().map(|&x| cdf.eval(x)).collect();
    if empirical.iter().any(|&f| f <= 0.0) {
        return Err(Error::InvalidGrid);
    }
    let model = crate::density::cdf(params, grid)?;
    Ok(ks_log_values(&empirical, &model))
}

/// Everything the criteria need from one sample, prepared once.
#[derive(Debug, Clone)]
pub struct Statistics {
    pub density: DensityEstimate,
    pub cdf: CdfEstimate,
    pub log_grid: Vec<f64>,
    grid_cdf: Vec<f64>,
    likelihood: LogLikelihood,
}

impl Statistics {
    pub fn new(samples: &SampleSet, kde: &KdeOptions, points_per_decade: usize) -> Result<Self> {
        let density = empirical::kde(samples, kde)?;
        let cdf = empirical::ecdf(samples);
        let log_grid = empirical::log_cdf_grid(samples, points_per_decade)?;
        let grid_cdf = log_grid.iter().map(|&x| cdf.eval(x)).collect();
        let likelihood = LogLikelihood::new(&samples.values)?;
        Ok(Self {
            density,
            cdf,
            log_grid,
            grid_cdf,
            likelihood,
        })
    }

    /// ECDF values on [`Self::log_grid`].
    pub fn grid_cdf(&self) -> &[f64] {
        &self.grid_cdf
    }

    pub fn sample_len(&self) -> usize {
        self.likelihood.len()
    }

    pub fn evaluate(&self, criterion: Criterion, params: &ParamSet) -> Result<f64> {
        match criterion {
            Criterion::Ml => self.likelihood.mean(params),
            Criterion::Mse => mse(&self.density, params),
            Criterion::Rad => rad(&self.density, params),
            Criterion::Ks => {
                let model = crate::density::cdf(params, &self.log_grid)?;
                Ok(ks_log_values(&self.grid_cdf, &model))
            }
        }
    }

    /// All four metrics, in [`Criterion::ALL`] order.
    pub fn metrics(&self, params: &ParamSet) -> Result<[f64; 4]> {
        let pdf = crate::density::pdf(params, &self.density.grid)?;
        let cdf = crate::density::cdf(params, &self.log_grid)?;
        Ok([
            self.likelihood.mean(params)?,
            mse_values(&self.density.density, &pdf),
            rad_values(&pdf, &self.density.density),
            ks_log_values(&self.grid_cdf, &cdf),
        ])
    }
}

/// One row of a [`GofTable`]: a criterion's optimum scored by every metric.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GofRow {
    pub criterion: Criterion,
    pub params: ParamSet,
    /// Metric values in [`Criterion::ALL`] order.
    pub values: [f64; 4],
}

/// Cross-criteria table: rows are optima, columns are metrics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GofTable {
    pub rows: Vec<GofRow>,
}

impl GofTable {
    pub fn row(&self, criterion: Criterion) -> Option<&GofRow> {
        self.rows.iter().find(|r| r.criterion == criterion)
    }

    /// Criteria whose own row is not the best in their own column by more
    /// than `tol` (relative to the column's magnitude).
    pub fn diagonal_violations(&self, tol: f64) -> Vec<Criterion> {
        let mut out = Vec::new();
        for row in &self.rows {
            let col = row.criterion.index();
            let own = row.values[col];
            let beaten = self.rows.iter().any(|other| {
                let v = other.values[col];
                let margin = tol * own.abs().max(v.abs()).max(1.0);
                if row.criterion.maximize() {
                    v > own + margin
                } else {
                    v < own - margin
                }
            });
            if beaten {
                out.push(row.criterion);
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("criterion,K,Delta,mu,Omega");
        for c in Criterion::ALL {
            let _ = write!(s, ",{}", c.metric_name());
        }
        s.push('\n');
        for row in &self.rows {
            let p = &row.params;
            let _ = write!(s, "{},{:e},{:e},{:e},{:e}", row.criterion, p.k, p.delta, p.mu, p.omega);
            for v in row.values {
                let _ = write!(s, ",{v:e}");
            }
            s.push('\n');
        }
        s
    }

    /// Fixed-width text rendering with the parameter vector and four metrics
    /// per row.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<6}{:>30}", "", "lambda = [K; Delta; mu]");
        for c in Criterion::ALL {
            let _ = write!(s, "{:>13}", c.metric_name());
        }
        s.push('\n');
        for row in &self.rows {
            let p = &row.params;
            let lambda = alloc::format!("[{:.4}; {:.4}; {:.4}]", p.k, p.delta, p.mu);
            let _ = write!(s, "{:<6}{:>30}", row.criterion.name(), lambda);
            for v in row.values {
                let _ = write!(s, "{v:>13.4e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Scores every fitted parameter set with every metric.
pub fn cross_table(stats: &Statistics, fits: &[(Criterion, ParamSet)]) -> Result<GofTable> {
    let rows = fits
        .iter()
        .map(|(criterion, params)| {
            Ok(GofRow {
                criterion: *criterion,
                params: *params,
                values: stats.metrics(params)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GofTable { rows })
}
