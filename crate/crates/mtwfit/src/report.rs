//! Report types and plain-text rendering.

use mtwfit_core::fit::FitResult;
use mtwfit_core::gof::{Criterion, GofTable};
use mtwfit_core::perf::PerfCurve;
use mtwfit_core::ParamSet;
use serde::{Deserialize, Deserializer, Serialize};

use crate::config::RunConfig;

/// Where the analyzed samples came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub source: String,
    pub seed: Option<u64>,
    pub n: usize,
    /// Mean square before normalization.
    pub raw_mean_square: f64,
}

/// A parameter set scored against the samples: the truth of a synthetic run,
/// a user-supplied set, or a fitted optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub label: String,
    pub params: ParamSet,
    pub fit: Option<FitResult>,
    /// GoF metrics in [`Criterion::ALL`] order.
    pub metrics: [f64; 4],
    pub curve: PerfCurve,
    /// Operational SNR (dB) per configured target OP; `None` if the curve
    /// does not reach the target.
    pub operational_snr_db: Vec<Option<f64>>,
    /// Empirical minus model operational SNR (dB), per target OP.
    pub gap_db: Vec<Option<f64>>,
    /// `(EC_model - EC_empirical) / EC_empirical` at each configured SNR.
    pub ec_relative_error: Vec<f64>,
}

/// Curves for plotting, one column per source. Non-finite values are written
/// as JSON `null` and read back as NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub tag: String,
    pub pdf_r: Vec<f64>,
    pub pdf: Vec<Series>,
    /// Envelope abscissa of the log-CDF curves, `20 log10 r`.
    pub logcdf_r_db: Vec<f64>,
    /// `log10 F` per source.
    pub logcdf: Vec<Series>,
    pub gamma_bar_db: Vec<f64>,
    pub ec: Vec<Series>,
    pub op: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    #[serde(deserialize_with = "lenient_floats")]
    pub values: Vec<f64>,
}

fn lenient_floats<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    let v: Vec<Option<f64>> = Vec::deserialize(d)?;
    Ok(v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub samples: SampleSummary,
    pub kde_bandwidth: f64,
    pub empirical: PerfCurve,
    pub empirical_operational_snr_db: Vec<Option<f64>>,
    pub models: Vec<ModelEntry>,
    /// Every metric at every fitted optimum; present when fits were run.
    pub gof_table: Option<GofTable>,
    pub plots: PlotData,
}

impl RunReport {
    pub fn model(&self, label: &str) -> Option<&ModelEntry> {
        self.models.iter().find(|m| m.label == label)
    }

    pub fn fitted(&self, criterion: Criterion) -> Option<&ModelEntry> {
        self.models
            .iter()
            .find(|m| m.fit.as_ref().is_some_and(|f| f.criterion == criterion))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary: fitted parameters, GoF table and gaps.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "samples: {} (n = {}, seed = {})\nKDE bandwidth: {:.6e}\n\n",
            self.samples.source,
            self.samples.n,
            self.samples.seed.map_or("-".into(), |s| s.to_string()),
            self.kde_bandwidth
        );
        out.push_str(&format!(
            "{:<10} {:>10} {:>9} {:>9} {:>12} {:>12} {:>12} {:>10}\n",
            "model", "K", "Delta", "mu", "L", "eps_MSE", "eps_RAD", "eps_KS"
        ));
        for m in &self.models {
            let p = m.params;
            out.push_str(&format!(
                "{:<10} {:>10.4} {:>9.5} {:>9.4} {:>12.5e} {:>12.4e} {:>12.4e} {:>10.4e}\n",
                m.label, p.k, p.delta, p.mu, m.metrics[0], m.metrics[1], m.metrics[2], m.metrics[3]
            ));
        }
        if let Some(t) = &self.gof_table {
            let violations = t.diagonal_violations(1e-9);
            out.push_str(&format!(
                "\ndiagonal dominance: {}\n",
                if violations.is_empty() { "holds".to_string() } else { format!("violated for {violations:?}") }
            ));
        }
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.2}"));
        for (i, target) in self.config.target_op.iter().enumerate() {
            out.push_str(&format!(
                "\ntarget OP {target:e}: empirical operational SNR {} dB\n",
                fmt(self.empirical_operational_snr_db[i])
            ));
            for m in &self.models {
                out.push_str(&format!(
                    "  {:<10} {:>7} dB   gap {:>6} dB\n",
                    m.label,
                    fmt(m.operational_snr_db[i]),
                    fmt(m.gap_db[i])
                ));
            }
        }
        out
    }
}
