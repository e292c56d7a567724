use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtwfit::config::{InputFormat, Mode, RunConfig};
use mtwfit::error::PipelineError;
use mtwfit::gof_criteria_arg as criteria_arg;
use mtwfit::{export, pipeline, OUTPUT_DIR_ENV};
use mtwfit_core::gof::Criterion;

#[derive(Parser)]
#[command(name = "mtwfit", version, about = "Fit MTW fading models to envelope samples and compare link metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw synthetic envelope samples and write them as CSV.
    Generate(RunArgs),
    /// Fit every criterion to an input file.
    Fit(RunArgs),
    /// Score one parameter set against an input file.
    Evaluate(RunArgs),
    /// Synthetic experiment: draw, fit every criterion, compare.
    Experiment1(RunArgs),
    /// Read, validate and normalize a measurement file.
    Ingest(RunArgs),
    /// Write plot CSVs from an existing report.
    Export {
        /// Report produced by `fit`, `evaluate` or `experiment1`.
        report: PathBuf,
        #[arg(long, env = OUTPUT_DIR_ENV)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with run settings; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Number of samples to draw.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of ML, MSE, RAD, KS.
    #[arg(long, value_delimiter = ',', value_parser = criteria_arg)]
    criteria: Option<Vec<Criterion>>,
    #[arg(long)]
    starts: Option<usize>,
    /// Threshold rate R_th in bits/s/Hz.
    #[arg(long)]
    r_th: Option<f64>,
    /// Target outage probabilities for the operational SNR.
    #[arg(long, value_delimiter = ',')]
    target_op: Option<Vec<f64>>,
    /// KDE grid size.
    #[arg(long)]
    kde_points: Option<usize>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    /// Suffix for output file names.
    #[arg(long)]
    tag: Option<String>,
}

impl RunArgs {
    fn resolve(self, mode: Mode) -> Result<RunConfig, PipelineError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        c.mode = mode;
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {$(
                if let Some(v) = self.$field { c.$target = v; }
            )*};
        }
        macro_rules! set_some {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { c.$field = Some(v); }
            )*};
        }
        set_some!(k, delta, mu, n, input);
        set!(seed => seed, criteria => criteria, starts => starts, r_th => r_th,
             target_op => target_op, kde_points => kde_points, format => input_format,
             output_dir => output_dir, tag => tag);
        Ok(c)
    }
}

fn execute(command: Command) -> Result<(), PipelineError> {
    let (mode, args) = match command {
        Command::Export { report, output_dir } => {
            let plots = export::read_plot_data(&report)?;
            let dir = output_dir.unwrap_or_else(|| report.parent().map(PathBuf::from).unwrap_or_default());
            for p in export::export_plot_data(&plots, &dir)? {
                println!("wrote {}", p.display());
            }
            return Ok(());
        }
        Command::Generate(a) => (Mode::Generate, a),
        Command::Fit(a) => (Mode::Fit, a),
        Command::Evaluate(a) => (Mode::Evaluate, a),
        Command::Experiment1(a) => (Mode::Experiment1, a),
        Command::Ingest(a) => (Mode::Ingest, a),
    };
    let config = args.resolve(mode)?;
    config.validate()?;
    match mode {
        Mode::Generate => {
            let (s, path) = pipeline::generate(&config)?;
            println!("wrote {} samples to {}", s.len(), path.display());
        }
        Mode::Ingest => {
            let (s, path) = pipeline::run_ingest(&config)?;
            println!("read {} samples ({}); normalized copy in {}", s.len(), s.source, path.display());
        }
        _ => {
            let report = pipeline::run(&config)?.expect("analysis modes produce a report");
            print!("{}", report.to_text());
            let echo = config.output_dir.join(format!("config_{}.toml", config.tag));
            let mut written = export::write_report(&report, &config.output_dir)?;
            std::fs::write(&echo, config.to_toml())
                .map_err(|e| PipelineError::io(mtwfit::Stage::Export, &echo, e))?;
            written.push(echo);
            for p in written {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
