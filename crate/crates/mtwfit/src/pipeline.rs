//! End-to-end runs: sample or ingest, estimate, fit, score, sweep.

use std::path::PathBuf;

use mtwfit_core::density::Mtw;
use mtwfit_core::empirical::normalize;
use mtwfit_core::fit::fit;
use mtwfit_core::gof::{cross_table, Criterion, Statistics, PROB_FLOOR};
use mtwfit_core::perf::{db_to_linear, ec_empirical, ec_model, operational_snr, sweep, PerfConfig, PerfCurve, PerfSource};
use mtwfit_core::{sample_envelope, ParamSet, SampleSet};

use crate::config::{Mode, RunConfig};
use crate::error::{PipelineError, Result, Stage};
use crate::ingest::{ingest, write_amplitudes};
use crate::report::{ModelEntry, PlotData, RunReport, SampleSummary, Series};

fn at(stage: Stage) -> impl Fn(mtwfit_core::Error) -> PipelineError {
    move |e| PipelineError::core(stage, e)
}

fn require_mode(config: &RunConfig, mode: Mode) -> Result<()> {
    if config.mode != mode {
        return Err(PipelineError::config(format!("config mode is {:?}, expected {mode:?}", config.mode)));
    }
    config.validate()
}

/// Raw synthetic draw from the configured truth.
pub fn draw(config: &RunConfig) -> Result<SampleSet> {
    let truth = config.params()?.ok_or_else(|| PipelineError::config("no truth parameters"))?;
    let n = config.n.ok_or_else(|| PipelineError::config("no sample count"))?;
    sample_envelope(&truth, n, config.seed).map_err(at(Stage::Sample))
}

/// Draws samples and writes them to `<output_dir>/samples_<tag>.csv`.
pub fn generate(config: &RunConfig) -> Result<(SampleSet, PathBuf)> {
    require_mode(config, Mode::Generate)?;
    let samples = draw(config)?;
    let path = config.output_dir.join(format!("samples_{}.csv", config.tag));
    std::fs::create_dir_all(&config.output_dir).map_err(|e| PipelineError::io(Stage::Export, &config.output_dir, e))?;
    write_amplitudes(&samples, &path)?;
    Ok((samples, path))
}

/// Reads and normalizes the configured input and writes the normalized
/// amplitudes to `<output_dir>/normalized_<tag>.csv`.
pub fn run_ingest(config: &RunConfig) -> Result<(SampleSet, PathBuf)> {
    require_mode(config, Mode::Ingest)?;
    let samples = load_input(config)?;
    let path = config.output_dir.join(format!("normalized_{}.csv", config.tag));
    std::fs::create_dir_all(&config.output_dir).map_err(|e| PipelineError::io(Stage::Export, &config.output_dir, e))?;
    write_amplitudes(&samples, &path)?;
    Ok((samples, path))
}

fn load_input(config: &RunConfig) -> Result<SampleSet> {
    let input = config.input.as_ref().ok_or_else(|| PipelineError::config("no input path"))?;
    ingest(input, config.input_format)
}

/// Synthetic experiment: draw from the truth, then fit every configured
/// criterion.
pub fn run_experiment1(config: &RunConfig) -> Result<RunReport> {
    require_mode(config, Mode::Experiment1)?;
    let raw = draw(config)?;
    let truth = config.params()?.map(|p| ("truth".to_string(), p));
    analyze(config, &raw, truth, &config.criteria)
}

/// Fits every configured criterion to the input file.
pub fn run_fit(config: &RunConfig) -> Result<RunReport> {
    require_mode(config, Mode::Fit)?;
    let raw = crate::ingest::read_amplitudes(config.input.as_ref().expect("validated"), config.input_format)?;
    analyze(config, &raw, None, &config.criteria)
}

/// Scores the configured parameter set against the input file, without
/// fitting.
pub fn evaluate(config: &RunConfig) -> Result<RunReport> {
    require_mode(config, Mode::Evaluate)?;
    let raw = crate::ingest::read_amplitudes(config.input.as_ref().expect("validated"), config.input_format)?;
    let params = config.params()?.map(|p| ("evaluated".to_string(), p));
    analyze(config, &raw, params, &[])
}

fn operational(curve: &PerfCurve, targets: &[f64]) -> Vec<Option<f64>> {
    targets.iter().map(|&t| operational_snr(curve, t).ok()).collect()
}

struct Context<'a> {
    config: &'a RunConfig,
    perf: PerfConfig,
    samples: &'a SampleSet,
    stats: Statistics,
    empirical: PerfCurve,
    empirical_snr: Vec<Option<f64>>,
    empirical_ec: Vec<f64>,
}

impl Context<'_> {
    fn entry(&self, label: String, params: ParamSet, fit: Option<mtwfit_core::fit::FitResult>) -> Result<ModelEntry> {
        let metrics = self.stats.metrics(&params).map_err(at(Stage::Gof))?;
        let mut curve = sweep(PerfSource::Model(&params), &self.perf).map_err(at(Stage::Performance))?;
        curve.source = label.clone();
        let snr = operational(&curve, &self.config.target_op);
        let gap_db = snr
            .iter()
            .zip(&self.empirical_snr)
            .map(|(m, e)| Some(e.as_ref()? - m.as_ref()?))
            .collect();
        let ec_relative_error = self
            .config
            .ec_check_db
            .iter()
            .zip(&self.empirical_ec)
            .map(|(&db, &emp)| {
                let model = ec_model(&params, db_to_linear(db)).map_err(at(Stage::Performance))?;
                Ok((model - emp) / emp)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(ModelEntry {
            label,
            params,
            fit,
            metrics,
            curve,
            operational_snr_db: snr,
            gap_db,
            ec_relative_error,
        })
    }
}

/// Shared pipeline body. `reference` is scored alongside the fits (the
/// truth of a synthetic run, or the parameter set being evaluated).
pub fn analyze(
    config: &RunConfig,
    raw: &SampleSet,
    reference: Option<(String, ParamSet)>,
    criteria: &[Criterion],
) -> Result<RunReport> {
    let samples = normalize(raw).map_err(at(Stage::Normalize))?;
    let stats = Statistics::new(&samples, &config.kde(), config.log_points_per_decade).map_err(at(Stage::Statistics))?;
    let perf = config.perf();
    let mut empirical = sweep(PerfSource::Empirical(&samples), &perf).map_err(at(Stage::Performance))?;
    empirical.source = "empirical".into();
    let empirical_snr = operational(&empirical, &config.target_op);
    let empirical_ec = config
        .ec_check_db
        .iter()
        .map(|&db| ec_empirical(&samples, db_to_linear(db)).map_err(at(Stage::Performance)))
        .collect::<Result<Vec<f64>>>()?;
    let ctx = Context {
        config,
        perf,
        samples: &samples,
        stats,
        empirical,
        empirical_snr,
        empirical_ec,
    };

    let mut models = Vec::new();
    if let Some((label, params)) = reference {
        models.push(ctx.entry(label, params, None)?);
    }
    let bx = config.solution_box();
    let options = config.fit_options();
    let mut fitted = Vec::new();
    for &criterion in criteria {
        let result = fit(&ctx.stats, criterion, &bx, &options).map_err(at(Stage::Fit(criterion)))?;
        fitted.push((criterion, result.lambda_hat));
        models.push(ctx.entry(criterion.name().to_string(), result.lambda_hat, Some(result))?);
    }
    let gof_table = if fitted.is_empty() {
        None
    } else {
        Some(cross_table(&ctx.stats, &fitted).map_err(at(Stage::Gof))?)
    };

    let plots = plot_data(&ctx, &models)?;
    Ok(RunReport {
        config: config.clone(),
        samples: SampleSummary {
            source: ctx.samples.source.clone(),
            seed: ctx.samples.seed,
            n: ctx.samples.len(),
            raw_mean_square: raw.mean_square(),
        },
        kde_bandwidth: ctx.stats.density.bandwidth,
        empirical_operational_snr_db: ctx.empirical_snr.clone(),
        empirical: ctx.empirical.clone(),
        models,
        gof_table,
        plots,
    })
}

fn plot_data(ctx: &Context<'_>, models: &[ModelEntry]) -> Result<PlotData> {
    let density = &ctx.stats.density;
    let log_grid = &ctx.stats.log_grid;
    let mut pdf = vec![Series {
        name: "empirical".into(),
        values: density.density.clone(),
    }];
    let mut logcdf = vec![Series {
        name: "empirical".into(),
        values: ctx.stats.grid_cdf().iter().map(|f| f.log10()).collect(),
    }];
    for m in models {
        let model = Mtw::new(m.params).map_err(at(Stage::Performance))?;
        pdf.push(Series {
            name: m.label.clone(),
            values: density.grid.iter().map(|&r| model.pdf_at(r)).collect(),
        });
        logcdf.push(Series {
            name: m.label.clone(),
            values: log_grid.iter().map(|&r| model.cdf_at(r).max(PROB_FLOOR).log10()).collect(),
        });
    }
    let curves = std::iter::once(&ctx.empirical).chain(models.iter().map(|m| &m.curve));
    let (ec, op) = curves
        .map(|c| {
            (
                Series {
                    name: c.source.clone(),
                    values: c.ec.clone(),
                },
                Series {
                    name: c.source.clone(),
                    values: c.op.clone(),
                },
            )
        })
        .unzip();
    Ok(PlotData {
        tag: ctx.config.tag.clone(),
        pdf_r: density.grid.clone(),
        pdf,
        logcdf_r_db: log_grid.iter().map(|r| 20.0 * r.log10()).collect(),
        logcdf,
        gamma_bar_db: ctx.empirical.gamma_bar_db.clone(),
        ec,
        op,
    })
}

/// Runs the pipeline selected by `config.mode`; `generate` and `ingest`
/// produce no report.
pub fn run(config: &RunConfig) -> Result<Option<RunReport>> {
    match config.mode {
        Mode::Experiment1 => run_experiment1(config).map(Some),
        Mode::Fit => run_fit(config).map(Some),
        Mode::Evaluate => evaluate(config).map(Some),
        Mode::Generate => generate(config).map(|_| None),
        Mode::Ingest => run_ingest(config).map(|_| None),
    }
}
