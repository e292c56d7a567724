//! Ergodic capacity and outage probability, from a model or from samples.
//!
//! The instantaneous SNR is `gamma = gamma_bar r^2 / Omega`; outage occurs
//! when `log2(1 + gamma) < R_th`, i.e. `gamma < gamma_th = 2^R_th - 1`.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::density::Mtw;
use crate::error::{Error, Result};
use crate::model::{ParamSet, SampleSet};
use crate::numeric::{map_slice, neumaier_sum};

/// Threshold rate and average-SNR grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerfConfig {
    /// Threshold rate in bits/s/Hz.
    pub r_th: f64,
    /// Average SNR grid in dB, increasing.
    pub gamma_bar_db: Vec<f64>,
}

impl Default for PerfConfig {
    fn default() -> Self {
        Self {
            r_th: 1.0,
            gamma_bar_db: default_snr_grid(),
        }
    }
}

/// 0 to 40 dB in 0.5 dB steps.
pub fn default_snr_grid() -> Vec<f64> {
    (0..=80).map(|i| 0.5 * i as f64).collect()
}

impl PerfConfig {
    /// Linear SNR threshold `2^R_th - 1`.
    pub fn gamma_th(&self) -> f64 {
        self.r_th.exp2() - 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_th > 0.0 && self.r_th.is_finite()) {
            return Err(Error::InvalidParameter("threshold rate must be positive"));
        }
        if self.gamma_bar_db.is_empty()
            || self.gamma_bar_db.iter().any(|g| !g.is_finite())
            || self.gamma_bar_db.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidGrid);
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn check_snr(gamma_bar: f64) -> Result<()> {
    if gamma_bar > 0.0 && gamma_bar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("average SNR must be positive"))
    }
}

const EC_ABS_TOL: f64 = 1e-10;
const EC_REL_TOL: f64 = 1e-10;

fn ec_of(model: &Mtw, gamma_bar: f64) -> f64 {
    let scale = gamma_bar / model.params().omega;
    model.expectation(|r| (scale * r * r).ln_1p() * core::f64::consts::LOG2_E, EC_ABS_TOL, EC_REL_TOL)
}

/// Ergodic capacity `E[log2(1 + gamma_bar r^2 / Omega)]` in bits/s/Hz.
pub fn ec_model(params: &ParamSet, gamma_bar: f64) -> Result<f64> {
    check_snr(gamma_bar)?;
    Ok(ec_of(&Mtw::new(*params)?, gamma_bar))
}

/// Sample mean of `log2(1 + gamma_bar r^2 / Omega_hat)` with `Omega_hat` the
/// sample mean square.
pub fn ec_empirical(samples: &SampleSet, gamma_bar: f64) -> Result<f64> {
    if !(gamma_bar >= 0.0 && gamma_bar.is_finite()) {
        return Err(Error::InvalidParameter("average SNR must be non-negative"));
    }
    let scale = gamma_bar / omega_hat(samples)?;
    Ok(mean_log2_1p(&samples.values, scale))
}

fn mean_log2_1p(values: &[f64], scale: f64) -> f64 {
    neumaier_sum(values.iter().map(|r| (scale * r * r).ln_1p())) * core::f64::consts::LOG2_E
        / values.len() as f64
}

fn omega_hat(samples: &SampleSet) -> Result<f64> {
    let ms = samples.mean_square();
    if ms > 0.0 && ms.is_finite() {
        Ok(ms)
    } else {
        Err(Error::InvalidSamples("samples have zero power"))
    }
}

/// Outage probability `F_r(sqrt(gamma_th Omega / gamma_bar))`.
pub fn op_model(params: &ParamSet, gamma_bar: f64, config: &PerfConfig) -> Result<f64> {
    check_snr(gamma_bar)?;
    let model = Mtw::new(*params)?;
    Ok(model.cdf_at(envelope_threshold(config.gamma_th(), params.omega, gamma_bar)))
}

fn envelope_threshold(gamma_th: f64, omega: f64, gamma_bar: f64) -> f64 {
    (gamma_th * omega / gamma_bar).sqrt()
}

/// Samples below threshold needed before an empirical outage probability is
/// reported.
pub const MIN_OUTAGE_COUNT: usize = 100;

/// Empirical outage probability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OutageEstimate {
    /// Reported probability; zero when `low_support` is set.
    pub probability: f64,
    /// Fraction of samples below threshold, reported or not.
    pub fraction: f64,
    pub count: usize,
    /// Fewer than [`MIN_OUTAGE_COUNT`] samples (and not all of them) fall
    /// below threshold.
    pub low_support: bool,
}

fn outage_from_count(count: usize, n: usize) -> OutageEstimate {
    let fraction = count as f64 / n as f64;
    let low_support = count < MIN_OUTAGE_COUNT && count < n;
    OutageEstimate {
        probability: if low_support { 0.0 } else { fraction },
        fraction,
        count,
        low_support,
    }
}

/// Fraction of samples with `r_i^2 < gamma_th Omega_hat / gamma_bar`.
pub fn op_empirical(samples: &SampleSet, gamma_bar: f64, config: &PerfConfig) -> Result<OutageEstimate> {
    check_snr(gamma_bar)?;
    let limit = config.gamma_th() * omega_hat(samples)? / gamma_bar;
    let count = samples.values.iter().filter(|r| *r * *r < limit).count();
    Ok(outage_from_count(count, samples.len()))
}

/// EC and OP along an average-SNR grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerfCurve {
    pub gamma_bar_db: Vec<f64>,
    pub ec: Vec<f64>,
    /// Outage probability. Empirical curves hold the raw sample fraction;
    /// unreliable entries are marked in `low_support`.
    pub op: Vec<f64>,
    pub low_support: Vec<bool>,
    pub source: String,
}

/// What a sweep is computed from.
#[derive(Debug, Clone, Copy)]
pub enum PerfSource<'a> {
    Model(&'a ParamSet),
    Empirical(&'a SampleSet),
}

pub fn sweep(source: PerfSource<'_>, config: &PerfConfig) -> Result<PerfCurve> {
    config.validate()?;
    let gamma_th = config.gamma_th();
    let grid = &config.gamma_bar_db;
    match source {
        PerfSource::Model(params) => {
            let model = Mtw::new(*params)?;
            let points = map_slice(grid, |&db| {
                let g = db_to_linear(db);
                let ec = ec_of(&model, g);
                let op = model.cdf_at(envelope_threshold(gamma_th, params.omega, g));
                (ec, op)
            });
            Ok(PerfCurve {
                gamma_bar_db: grid.clone(),
                ec: points.iter().map(|p| p.0).collect(),
                op: points.iter().map(|p| p.1).collect(),
                low_support: alloc::vec![false; grid.len()],
                source: alloc::format!(
                    "model:K={},Delta={},mu={},Omega={}",
                    params.k,
                    params.delta,
                    params.mu,
                    params.omega
                ),
            })
        }
        PerfSource::Empirical(samples) => {
            let omega = omega_hat(samples)?;
            let mut squares: Vec<f64> = samples.values.iter().map(|r| r * r).collect();
            squares.sort_by(|a, b| a.total_cmp(b));
            let n = squares.len();
            let ec = map_slice(grid, |&db| mean_log2_1p(&samples.values, db_to_linear(db) / omega));
            let outages: Vec<OutageEstimate> = grid
                .iter()
                .map(|&db| {
                    let limit = gamma_th * omega / db_to_linear(db);
                    outage_from_count(squares.partition_point(|&s| s < limit), n)
                })
                .collect();
            Ok(PerfCurve {
                gamma_bar_db: grid.clone(),
                ec,
                op: outages.iter().map(|o| o.fraction).collect(),
                low_support: outages.iter().map(|o| o.low_support).collect(),
                source: alloc::format!("empirical:{}", samples.source),
            })
        }
    }
}

/// Average SNR (dB) at which the outage curve crosses `target`, by linear
/// interpolation of `log10(OP)` against dB.
pub fn operational_snr(curve: &PerfCurve, target: f64) -> Result<f64> {
    let (x, op) = (&curve.gamma_bar_db, &curve.op);
    let positive_min = op.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min);
    let max = op.iter().copied().fold(0.0, f64::max);
    let out_of_range = Error::OutOfRange {
        target,
        min: if positive_min.is_finite() { positive_min } else { 0.0 },
        max,
    };
    if !(target > 0.0) || op.is_empty() {
        return Err(out_of_range);
    }
    if op[0] == target {
        return Ok(x[0]);
    }
    for i in 1..op.len() {
        let (hi, lo) = (op[i - 1], op[i]);
        if hi > target && lo <= target {
            if lo <= 0.0 {
                break;
            }
            if lo == target {
                return Ok(x[i]);
            }
            let (lh, ll, lt) = (hi.log10(), lo.log10(), target.log10());
            return Ok(x[i - 1] + (x[i] - x[i - 1]) * (lh - lt) / (lh - ll));
        }
    }
    Err(out_of_range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rayleigh() -> ParamSet {
        ParamSet::new(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    /// E1(x) for x in (0, 1] by its convergent series.
    fn e1(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum -= term / k as f64;
        }
        -0.577_215_664_901_532_9 - x.ln() + sum
    }

    #[test]
    fn gamma_th_exact() {
        assert_eq!(PerfConfig::default().gamma_th(), 1.0);
        let c = PerfConfig { r_th: 2.0, ..PerfConfig::default() };
        assert_eq!(c.gamma_th(), 3.0);
        assert_eq!(default_snr_grid().len(), 81);
    }

    #[test]
    fn rayleigh_ec_closed_form() {
        for g in [10.0, 3.0, 100.0] {
            let expected = core::f64::consts::LOG2_E * (1.0 / g as f64).exp() * e1(1.0 / g);
            assert_relative_eq!(ec_model(&rayleigh(), g).unwrap(), expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn ec_vanishes_at_low_snr() {
        let p = ParamSet::new(15.0, 0.9, 2.0, 1.0).unwrap();
        assert!(ec_model(&p, 1e-9).unwrap() < 1e-8);
        let s = SampleSet::new(alloc::vec![0.5, 1.5], "t", None).unwrap();
        assert_eq!(ec_empirical(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_channel_ec() {
        let s = SampleSet::new(alloc::vec![2.0; 10], "t", None).unwrap();
        assert_relative_eq!(ec_empirical(&s, 7.0).unwrap(), 8f64.log2(), epsilon = 1e-15);
    }

    #[test]
    fn rayleigh_op_closed_form() {
        let c = PerfConfig::default();
        assert_relative_eq!(op_model(&rayleigh(), 10.0, &c).unwrap(), 1.0 - (-0.1f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn op_strictly_decreasing() {
        let p = ParamSet::new(15.0, 0.9, 2.0, 1.0).unwrap();
        let curve = sweep(PerfSource::Model(&p), &PerfConfig::default()).unwrap();
        assert!(curve.op.windows(2).all(|w| w[1] < w[0]));
        assert!(curve.ec.windows(2).all(|w| w[1] > w[0]));
        for (db, op) in curve.gamma_bar_db.iter().zip(&curve.op) {
            assert_eq!(*op, op_model(&p, db_to_linear(*db), &PerfConfig::default()).unwrap());
        }
    }

    #[test]
    fn empirical_outage_edges() {
        let values: Vec<f64> = (1..=200).map(|i| i as f64 / 100.0).collect();
        let s = SampleSet::new(values, "t", None).unwrap();
        let c = PerfConfig::default();
        let omega = s.mean_square();
        // threshold below the smallest sample
        let below = op_empirical(&s, omega / 1e-5, &c).unwrap();
        assert_eq!(below.probability, 0.0);
        assert_eq!(below.count, 0);
        // threshold above the largest sample
        let above = op_empirical(&s, omega / 10.0, &c).unwrap();
        assert_eq!(above.probability, 1.0);
        // 50 samples below: flagged, raw fraction kept
        let limit = 0.505f64 * 0.505;
        let mid = op_empirical(&s, omega / limit, &c).unwrap();
        assert_eq!(mid.count, 50);
        assert!(mid.low_support);
        assert_eq!(mid.probability, 0.0);
        assert_eq!(mid.fraction, 0.25);
    }

    #[test]
    fn operational_snr_log_linear() {
        let db: Vec<f64> = (0..=40).map(|i| i as f64).collect();
        let curve = PerfCurve {
            op: db.iter().map(|d| 10f64.powf(-d / 10.0)).collect(),
            ec: alloc::vec![0.0; db.len()],
            low_support: alloc::vec![false; db.len()],
            gamma_bar_db: db,
            source: String::new(),
        };
        assert_relative_eq!(operational_snr(&curve, 1e-2).unwrap(), 20.0, epsilon = 1e-12);
        assert_relative_eq!(operational_snr(&curve, 0.0316).unwrap(), 10.0 * -(0.0316f64.log10()), epsilon = 1e-12);
        assert!(operational_snr(&curve, 1e-5).is_err());
        assert!(operational_snr(&curve, 2.0).is_err());
        assert!(operational_snr(&curve, 1e-3).unwrap() > operational_snr(&curve, 1e-2).unwrap());
    }
}
