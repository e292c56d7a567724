//! Run configuration: a flat TOML table whose defaults reproduce the
//! synthetic experiment (λ = [15, 0.9, 2], n = 10⁶).

use std::path::{Path, PathBuf};

use mtwfit_core::empirical::{KdeOptions, POINTS_PER_DECADE};
use mtwfit_core::fit::{FitOptions, SolutionBox};
use mtwfit_core::gof::Criterion;
use mtwfit_core::optim::NelderMeadOptions;
use mtwfit_core::perf::PerfConfig;
use mtwfit_core::ParamSet;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Generate,
    Fit,
    Evaluate,
    Experiment1,
    Ingest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// Two columns: real and imaginary part.
    ComplexCsv,
    /// One column of amplitudes.
    AmplitudeCsv,
}

/// Every setting that affects the numbers in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Truth for synthetic runs, or the parameter set scored by `evaluate`.
    pub k: Option<f64>,
    pub delta: Option<f64>,
    pub mu: Option<f64>,
    pub n: Option<usize>,
    pub seed: u64,
    pub criteria: Vec<Criterion>,

    pub k_min: f64,
    pub k_max: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,

    pub r_th: f64,
    pub snr_min_db: f64,
    pub snr_max_db: f64,
    pub snr_step_db: f64,
    pub target_op: Vec<f64>,
    /// Average SNRs (dB) at which fitted and empirical capacity are compared.
    pub ec_check_db: Vec<f64>,

    pub kde_points: usize,
    pub kde_bandwidth: Option<f64>,
    pub kde_reflect: bool,
    pub log_points_per_decade: usize,

    pub starts: usize,
    pub max_iterations: usize,
    pub x_tol: f64,
    pub f_tol: f64,
    pub initial_step: f64,
    pub polish: usize,
    pub polish_tol: f64,

    pub input: Option<PathBuf>,
    pub input_format: InputFormat,
    pub output_dir: PathBuf,
    pub tag: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let bx = SolutionBox::default();
        let nm = NelderMeadOptions::default();
        let fit = FitOptions::default();
        let kde = KdeOptions::default();
        Self {
            mode: Mode::Experiment1,
            k: Some(15.0),
            delta: Some(0.9),
            mu: Some(2.0),
            n: Some(1_000_000),
            seed: 1,
            criteria: Criterion::ALL.to_vec(),
            k_min: bx.k[0],
            k_max: bx.k[1],
            delta_min: bx.delta[0],
            delta_max: bx.delta[1],
            mu_min: bx.mu[0],
            mu_max: bx.mu[1],
            r_th: 1.0,
            snr_min_db: 0.0,
            snr_max_db: 40.0,
            snr_step_db: 0.5,
            target_op: vec![1e-4],
            ec_check_db: vec![0.0, 10.0, 20.0, 30.0],
            kde_points: kde.grid_size,
            kde_bandwidth: kde.bandwidth,
            kde_reflect: kde.reflect,
            log_points_per_decade: POINTS_PER_DECADE,
            starts: fit.starts,
            max_iterations: nm.max_iterations,
            x_tol: nm.x_tol,
            f_tol: nm.f_tol,
            initial_step: fit.initial_step,
            polish: fit.polish,
            polish_tol: fit.polish_tol,
            input: None,
            input_format: InputFormat::AmplitudeCsv,
            output_dir: PathBuf::from("out"),
            tag: "e1".into(),
        }
    }
}

fn invalid(what: impl Into<String>) -> PipelineError {
    PipelineError::config(what)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::io(Stage::Config, path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The parameter set given by `k`, `delta`, `mu` (unit power), if all
    /// three are set.
    pub fn params(&self) -> Result<Option<ParamSet>, PipelineError> {
        match (self.k, self.delta, self.mu) {
            (Some(k), Some(d), Some(m)) => ParamSet::unit_power(k, d, m)
                .map(Some)
                .map_err(|e| PipelineError::core(Stage::Config, e)),
            (None, None, None) => Ok(None),
            _ => Err(invalid("k, delta and mu must be given together")),
        }
    }

    pub fn solution_box(&self) -> SolutionBox {
        SolutionBox {
            k: [self.k_min, self.k_max],
            delta: [self.delta_min, self.delta_max],
            mu: [self.mu_min, self.mu_max],
        }
    }

    pub fn perf(&self) -> PerfConfig {
        let steps = ((self.snr_max_db - self.snr_min_db) / self.snr_step_db).round() as usize;
        PerfConfig {
            r_th: self.r_th,
            gamma_bar_db: (0..=steps).map(|i| self.snr_min_db + i as f64 * self.snr_step_db).collect(),
        }
    }

    pub fn kde(&self) -> KdeOptions {
        KdeOptions {
            grid_size: self.kde_points,
            bandwidth: self.kde_bandwidth,
            reflect: self.kde_reflect,
        }
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            starts: self.starts,
            seed: self.seed,
            nelder_mead: NelderMeadOptions {
                max_iterations: self.max_iterations,
                x_tol: self.x_tol,
                f_tol: self.f_tol,
            },
            initial_step: self.initial_step,
            polish: self.polish,
            polish_tol: self.polish_tol,
        }
    }

    /// Checks the settings needed by `self.mode`.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let core = |e| PipelineError::core(Stage::Config, e);
        self.solution_box().validate().map_err(core)?;
        self.perf().validate().map_err(core)?;
        let params = self.params()?;
        if !(self.snr_step_db > 0.0 && self.snr_max_db >= self.snr_min_db) {
            return Err(invalid("SNR grid needs snr_step_db > 0 and snr_max_db >= snr_min_db"));
        }
        if self.criteria.is_empty() && matches!(self.mode, Mode::Fit | Mode::Experiment1) {
            return Err(invalid("at least one criterion is required"));
        }
        if self.target_op.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(invalid("target_op values must lie in (0, 1)"));
        }
        if self.kde_points < 2 || self.log_points_per_decade == 0 || self.starts == 0 {
            return Err(invalid("kde_points >= 2, log_points_per_decade >= 1 and starts >= 1 required"));
        }
        match self.mode {
            Mode::Experiment1 | Mode::Generate => {
                if params.is_none() || self.n.is_none() {
                    return Err(invalid("synthetic runs need k, delta, mu and n"));
                }
                if self.n == Some(0) {
                    return Err(invalid("n must be >= 1"));
                }
            }
            Mode::Fit | Mode::Ingest => {
                if self.input.is_none() {
                    return Err(invalid("an input path is required"));
                }
            }
            Mode::Evaluate => {
                if params.is_none() || self.input.is_none() {
                    return Err(invalid("evaluate needs k, delta, mu and an input path"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let text = c.to_toml();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
        assert!(c.validate().is_ok());
        assert_eq!(c.perf().gamma_bar_db.len(), 81);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml("n = 5000\ncriteria = [\"KS\", \"MSE\"]\n").unwrap();
        assert_eq!(c.n, Some(5000));
        assert_eq!(c.criteria, vec![Criterion::Ks, Criterion::Mse]);
        assert_eq!(c.k, Some(15.0));
    }

    #[test]
    fn rejects_unknown_keys_and_missing_inputs() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        let c = RunConfig {
            mode: Mode::Fit,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        let c = RunConfig {
            k: None,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
